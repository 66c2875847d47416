#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sag/grid.hpp"
#include "sag/plan.hpp"
#include "sag/primitives.hpp"

namespace sag {

// The follower relation between exit trees contains a cycle.
class CycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Halves of a region cut perpendicular to its longer side. Positions are
/// also addressed in split coordinates: `a` runs along the long side
/// (0 is the far edge of g1, g1 holds a < h1) and `b` along the short side.
/// A "column" is a line of constant b.
struct SplitResult {
  Rect region;
  Rect g1;  // ceil(m_long / 2) x m_short
  Rect g2;  // floor(m_long / 2) x m_short
  Axis cut = Axis::kRows;  // kRows: the split line runs between two rows
  int h1 = 0;

  int long_len() const { return cut == Axis::kRows ? region.rows : region.cols; }
  int short_len() const { return cut == Axis::kRows ? region.cols : region.rows; }
  Cell cell(int a, int b) const {
    return cut == Axis::kRows ? Cell{region.row0 + a, region.col0 + b} : Cell{region.row0 + b, region.col0 + a};
  }
  int along(Cell c) const { return cut == Axis::kRows ? c.row - region.row0 : c.col - region.col0; }
  int across(Cell c) const { return cut == Axis::kRows ? c.col - region.col0 : c.row - region.row0; }
  bool in_g1(Cell c) const { return along(c) < h1; }
};

// Ties (square regions) are split across rows.
SplitResult split(const Rect& region);
SplitResult split(const GridGraph& grid);

struct ColumnDemand {
  // k[b]: robots in column b of g2 whose goals lie in g1.
  std::vector<int> k;
  int total() const;
};

// A g1 robot with its goal in g2, routed horizontally along its own line to
// the exit column and then straight to the split line.
struct ExitRoute {
  RobotId robot = 0;
  int a = 0;
  int b = 0;
  int column = 0;
};

struct ExitAssignment {
  int h1 = 0;
  std::vector<ExitRoute> routes;  // ordered by robot id

  int length(const ExitRoute& r) const { return (h1 - 1 - r.a) + (r.b > r.column ? r.b - r.column : r.column - r.b); }
  std::int64_t total_length() const;
};

// Trunk: the exit column from the deepest assigned robot of g1 through all of
// g2. Side branches: merged horizontal route segments.
struct ExitTree {
  int column = 0;
  int top = 0;  // smallest `a` on the trunk
  std::vector<RobotId> robots;  // g1 robots exiting through this column
  EmbeddedTree tree;
};

struct Bundle {
  std::size_t leader = 0;  // index into the tree list
  std::vector<std::size_t> followers;  // in discovery order from the leader
};

// `placement` arguments map robot -> vertex.
ColumnDemand count_demands(const GridGraph& grid, const SplitResult& split, const Configuration& config,
                           const Configuration& goal);

// Assignments up to this many crossing robots use the Hungarian method;
// larger ones use the equivalent sorted transport on the short axis.
inline constexpr std::size_t kHungarianLimit = 256;

ExitAssignment match_exits(const GridGraph& grid, const SplitResult& split, const Configuration& config,
                           const Configuration& goal, const ColumnDemand& demand);

// True when `x` has a horizontal segment through the trunk of `y`'s column
// at a row where `y` already occupies that trunk.
bool is_crossover(const ExitRoute& x, const ExitRoute& y);
std::size_t count_crossovers(const ExitAssignment& assignment);
ExitAssignment resolve_crossovers(ExitAssignment assignment);

PathSegment route_path(const GridGraph& grid, const SplitResult& split, const ExitAssignment& assignment,
                       const ExitRoute& route);

std::vector<ExitTree> build_trees(const GridGraph& grid, const SplitResult& split,
                                  const ExitAssignment& assignment);
// Follower pairs (follower, followed): a side branch of the followed tree
// runs over the trunk of the follower.
std::vector<std::pair<std::size_t, std::size_t>> follower_pairs(const std::vector<ExitTree>& trees);
std::vector<Bundle> find_bundles(const std::vector<ExitTree>& trees);

struct IterationStats {
  std::size_t isolated_trees = 0;
  std::size_t bundled_trees = 0;
  std::size_t crossing = 0;  // robots moved across the split in each direction
  // FLIP rounds per phase of the general routing.
  std::size_t column_sort_rounds = 0;
  std::size_t row_sort_rounds = 0;
  std::size_t settle_rounds = 0;
  std::size_t herd_rounds = 0;
  std::size_t exchange_rounds = 0;
};

// FLIP schedule moving every robot of `split.region` to the half holding its
// goal; `occupancy` (vertex -> robot) is advanced. Robots that do not cross
// end where they started.
FlipSchedule iteration_schedule(const GridGraph& grid, const SplitResult& split, std::vector<RobotId>& occupancy,
                                const Configuration& goal, IterationStats* stats = nullptr);

std::pair<Plan, Configuration> schedule_iteration(const GridGraph& grid, const SplitResult& split,
                                                  const Configuration& config, const Configuration& goal);

}  // namespace sag
