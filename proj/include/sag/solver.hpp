#pragma once

#include <cstddef>
#include <vector>

#include "sag/grid.hpp"
#include "sag/plan.hpp"

namespace sag {

// One recursion level: all regions at this depth run in parallel.
struct LevelTrace {
  int depth = 0;
  std::size_t regions = 0;
  Rect largest;  // largest region at this depth
  std::size_t makespan = 0;  // longest iteration (or base solve) at this depth
  bool base = false;  // true if every region at this depth was solved exactly
};

struct SolveReport {
  Plan plan;
  std::size_t makespan = 0;
  std::size_t total_distance = 0;
  std::vector<LevelTrace> iterations;
  double runtime_seconds = 0.0;
  int depth() const { return static_cast<int>(iterations.size()); }
};

// Exact minimum-makespan plan for grids with at most 9 vertices.
Plan solve_small(const Instance& instance);

// Recursive split-and-group planner (unverified).
SolveReport sag(const Instance& instance);

// sag followed by verification; throws std::logic_error instead of
// returning an invalid plan.
SolveReport solve(const Instance& instance);

}  // namespace sag
