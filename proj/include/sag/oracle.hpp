#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sag/grid.hpp"
#include "sag/plan.hpp"

namespace sag {

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace oracle {

// Permutation of local vertices: target[u] is where the robot on u goes.
using LocalPermutation = std::vector<std::int8_t>;
// Local vertex -> label. The identity arrangement labels every vertex with itself.
using Arrangement = std::vector<std::int8_t>;

/// Configuration space of a fully occupied tiny grid (at most 10 cells).
///
/// Under full occupancy a synchronized step is exactly a set of
/// vertex-disjoint simple cycles, each rotated by one position. The space
/// enumerates those steps once; the breadth-first search over all n!
/// arrangements runs lazily on the first distance query and is limited to
/// grids of at most 9 cells.
class ConfigSpace {
 public:
  static constexpr int kMaxCells = 10;
  static constexpr int kMaxSearchCells = 9;

  ConfigSpace(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cells() const { return rows_ * cols_; }

  // Simple cycles as local vertex sequences, each listed once.
  const std::vector<std::vector<int>>& cycles() const { return cycles_; }
  // Every legal non-empty step, as the permutation it applies to positions.
  const std::vector<LocalPermutation>& steps() const { return steps_; }

  // Shortest step sequence taking the identity arrangement to `target`,
  // as indices into steps(). Throws InfeasibleError if unreachable.
  std::vector<int> shortest_path(const Arrangement& target) const;
  int distance(const Arrangement& target) const;
  int diameter() const;
  std::size_t reachable_count() const;

  // Shortest step sequence moving the robots on the vertices of `from_mask`
  // onto the vertices of `to_mask` (robots inside a mask are interchangeable).
  std::vector<int> shortest_mask_path(std::uint32_t from_mask, std::uint32_t to_mask) const;

  static Arrangement apply(const LocalPermutation& step, const Arrangement& arr);

 private:
  void search() const;
  std::uint32_t rank(const Arrangement& arr) const;
  Arrangement unrank(std::uint32_t r) const;

  int rows_;
  int cols_;
  std::vector<std::vector<int>> cycles_;
  std::vector<LocalPermutation> steps_;
  std::vector<int> inverse_step_;

  mutable std::once_flag searched_;
  mutable std::vector<std::uint8_t> dist_;
  mutable std::vector<std::uint16_t> parent_;
  mutable int diameter_ = 0;
  mutable std::size_t reachable_ = 0;
};

// Process-wide cache; spaces are built once and are read-only afterwards.
const ConfigSpace& config_space(int rows, int cols);

// Converts step indices into a Plan acting on `region` of `grid`. `occupancy`
// (vertex -> robot) is advanced to the final configuration.
Plan realize(const ConfigSpace& space, const std::vector<int>& path, const GridGraph& grid,
             const Rect& region, std::vector<RobotId>& occupancy);

struct OptimalResult {
  std::size_t makespan = 0;
  Plan plan;
};

// Exact minimum-makespan plan for a grid of at most 9 cells.
OptimalResult optimal_makespan(const Instance& instance);

// Same, restricted to the robots inside `region` (all of which must have
// goals inside it). Used as the base case of the recursive solver.
Plan optimal_region_plan(const GridGraph& grid, const Rect& region,
                         std::vector<RobotId>& occupancy, const Configuration& goal);

// Max over robots of the start-goal Manhattan distance.
std::size_t makespan_lower_bound(const Instance& instance);
// Sum over robots of the start-goal Manhattan distance.
std::size_t distance_lower_bound(const Instance& instance);

}  // namespace oracle
}  // namespace sag
