#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "sag/grid.hpp"
#include "sag/oracle.hpp"
#include "sag/plan.hpp"

namespace sag {

class DisjointnessError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class GroupTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class SizeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class OverlapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class BranchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unordered grid edge, stored with a < b.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;
  static Edge of(VertexId u, VertexId v) { return u < v ? Edge{u, v} : Edge{v, u}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeSet = std::vector<Edge>;
// A sequence of FLIP operations; round i swaps the robots across every edge of flips[i].
using FlipSchedule = std::vector<EdgeSet>;

enum class BlockShape {
  kWide,  // 2 rows x 3 columns
  kTall,  // 3 rows x 2 columns
};

struct Block {
  Cell anchor;  // top-left cell
  BlockShape shape = BlockShape::kWide;

  int rows() const { return shape == BlockShape::kWide ? 2 : 3; }
  int cols() const { return shape == BlockShape::kWide ? 3 : 2; }
  bool contains(Cell c) const {
    return c.row >= anchor.row && c.row < anchor.row + rows() && c.col >= anchor.col &&
           c.col < anchor.col + cols();
  }
  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockPartition {
  std::vector<Block> blocks;
};

// One FLIP round: a set of disjoint blocks and, per block, the edges it swaps.
struct PartitionRound {
  BlockPartition partition;
  std::vector<EdgeSet> edges_per_block;
};

/// Minimal-makespan plans for every permutation of a fully occupied 3x2
/// (or 2x3) block, from exhaustive breadth-first search.
class ExchangeTable {
 public:
  explicit ExchangeTable(BlockShape shape);

  BlockShape shape() const { return shape_; }
  int rows() const { return shape_ == BlockShape::kWide ? 2 : 3; }
  int cols() const { return shape_ == BlockShape::kWide ? 3 : 2; }
  std::size_t size() const { return plans_.size(); }
  // Longest stored plan (the diameter of the block's configuration graph).
  int diameter() const { return diameter_; }
  // Longest plan among permutations that are products of disjoint adjacent
  // transpositions; this is the per-round cost bound of FLIP.
  int flip_diameter() const { return flip_diameter_; }
  const oracle::ConfigSpace& space() const { return *space_; }

  // Step indices taking the identity arrangement to `target`.
  const std::vector<int>& plan(const oracle::Arrangement& target) const;
  // Plan fragment on the block itself (robot ids = starting local vertex).
  Plan fragment(const oracle::Arrangement& target) const;

 private:
  BlockShape shape_;
  const oracle::ConfigSpace* space_;
  std::map<oracle::Arrangement, std::vector<int>> plans_;
  int diameter_ = 0;
  int flip_diameter_ = 0;
};

ExchangeTable build_exchange_table();
// Cached, read-only tables for both shapes.
const ExchangeTable& exchange_table(BlockShape shape);

// Number of partitions used to cover every edge of any grid.
inline constexpr int kMaxPartitionRounds = 4;

std::vector<PartitionRound> partition_rounds(const GridGraph& grid, const EdgeSet& edges);
std::vector<PartitionRound> partition_rounds(const GridGraph& grid, const Rect& region,
                                             const EdgeSet& edges);

// Upper bound on the makespan of one FLIP: rounds times the per-round cost.
int flip_makespan_bound();

Plan flip(const GridGraph& grid, const Configuration& config, const EdgeSet& edges);

enum class FlipCompiler {
  kCanonical,  // the four fixed 3x2/2x3 partitions
  // Greedy cover by 2x4, 4x2, 2x3 and 3x2 windows at every offset, weighing
  // edges covered against exact window cost; falls back to the canonical
  // partitions whenever those are not more expensive.
  kAdaptive,
};

// Compiles a FLIP schedule into synchronized steps using blocks inside
// `region`. `occupancy` (vertex -> robot) is advanced in place.
Plan compile_flips(const GridGraph& grid, const Rect& region, const FlipSchedule& schedule,
                   std::vector<RobotId>& occupancy, FlipCompiler compiler = FlipCompiler::kCanonical);

// Zips schedules acting on disjoint vertex sets into one.
FlipSchedule merge_parallel(const std::vector<FlipSchedule>& parts);
// Each round is an involution, so reversing the order undoes the schedule.
FlipSchedule reversed(const FlipSchedule& schedule);

struct PathSegment {
  std::vector<VertexId> vertices;
  int length() const { return static_cast<int>(vertices.size()) - 1; }
};

struct SideBranch {
  VertexId attachment = 0;  // vertex on the main path
  PathSegment path;         // starts next to the attachment and leads away
};

struct EmbeddedTree {
  PathSegment main_path;
  std::vector<SideBranch> side_branches;

  std::vector<VertexId> vertices() const;
  std::vector<Edge> edges() const;
  int diameter() const;
};

using RobotGroup = std::vector<RobotId>;

enum class PathEnd { kFront, kBack };

// Tree given by an explicit vertex set and edge list (the engine under the
// path and tree primitives).
struct TreeGraph {
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
};

// Moves the marked robots toward `root` with parallel swaps until no marked
// robot has an unmarked parent. Among competing children the lower column,
// then the lower robot id, goes first.
FlipSchedule gather(const GridGraph& grid, const TreeGraph& tree, VertexId root,
                    std::vector<RobotId>& occupancy, const std::vector<char>& marked);

// Schedule forms of the primitives; `occupancy` is advanced as if the
// schedule had run.
FlipSchedule herd_schedule(const GridGraph& grid, const PathSegment& path,
                           std::vector<RobotId>& occupancy, const RobotGroup& group, PathEnd end);
FlipSchedule line_shift_schedule(const GridGraph& grid, const PathSegment& path,
                                 std::vector<RobotId>& occupancy, const RobotGroup& group1,
                                 const RobotGroup& group2);
FlipSchedule tree_shift_schedule(const GridGraph& grid, const EmbeddedTree& tree,
                                 std::vector<RobotId>& occupancy, const PathSegment& branch,
                                 const RobotGroup& group_in, const RobotGroup& group_out);

Plan herd(const GridGraph& grid, const PathSegment& path, const Configuration& config,
          const RobotGroup& group, PathEnd end);
Plan line_shift(const GridGraph& grid, const PathSegment& path, const Configuration& config,
                const RobotGroup& group1, const RobotGroup& group2);
Plan tree_shift(const GridGraph& grid, const EmbeddedTree& tree, const Configuration& config,
                const PathSegment& branch, const RobotGroup& group_in, const RobotGroup& group_out);

}  // namespace sag
