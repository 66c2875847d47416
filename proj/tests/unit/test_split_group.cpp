#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "sag/hungarian.hpp"
#include "sag/split_group.hpp"

namespace sag {
namespace {

Configuration random_goal(int n, std::mt19937_64& rng) {
  std::vector<VertexId> goal(static_cast<std::size_t>(n));
  std::iota(goal.begin(), goal.end(), 0);
  std::shuffle(goal.begin(), goal.end(), rng);
  return Configuration{goal};
}

bool in_g1(const GridGraph& g, const SplitResult& s, VertexId v) { return s.in_g1(g.cell(v)); }

// Identity start on 9x7; per g2 column the first k robots (nearest the
// split) and as many g1 robots trade goals across the split.
Configuration demand_instance(const GridGraph& g, const SplitResult& s, const std::vector<int>& k) {
  std::vector<VertexId> goal(static_cast<std::size_t>(g.vertex_count()));
  std::iota(goal.begin(), goal.end(), 0);
  std::vector<VertexId> upper;
  std::vector<VertexId> lower;
  for (int b = 0; b < s.short_len(); ++b) {
    for (int i = 0; i < k[static_cast<std::size_t>(b)]; ++i) lower.push_back(g.vertex(s.cell(s.h1 + i, b)));
  }
  for (int a = 0; a < s.h1 && upper.size() < lower.size(); ++a) {
    for (int b = s.short_len() - 1; b >= 0 && upper.size() < lower.size(); --b) upper.push_back(g.vertex(s.cell(a, b)));
  }
  for (std::size_t i = 0; i < lower.size(); ++i) std::swap(goal[static_cast<std::size_t>(upper[i])], goal[static_cast<std::size_t>(lower[i])]);
  return Configuration{goal};
}

std::int64_t brute_force_cost(const std::vector<std::vector<std::int64_t>>& cost) {
  std::vector<int> perm(cost.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += cost[i][static_cast<std::size_t>(perm[i])];
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void expect_same_region_cells(const Rect& r, const Rect& x, const Rect& y) {
  std::set<std::pair<int, int>> cells;
  for (const Rect* part : {&x, &y}) {
    for (int i = 0; i < part->rows; ++i) {
      for (int j = 0; j < part->cols; ++j) EXPECT_TRUE(cells.emplace(part->row0 + i, part->col0 + j).second);
    }
  }
  EXPECT_EQ(cells.size(), static_cast<std::size_t>(r.size()));
  for (auto [i, j] : cells) EXPECT_TRUE(r.contains(Cell{i, j}));
}

TEST(Split, Examples) {
  const SplitResult a = split(GridGraph(9, 7));
  EXPECT_EQ(a.g1, (Rect{0, 0, 5, 7}));
  EXPECT_EQ(a.g2, (Rect{5, 0, 4, 7}));
  EXPECT_EQ(a.cut, Axis::kRows);
  EXPECT_EQ(a.h1, 5);

  const SplitResult b = split(GridGraph(8, 4));
  EXPECT_EQ(b.g1, (Rect{0, 0, 4, 4}));
  EXPECT_EQ(b.g2, (Rect{4, 0, 4, 4}));

  const SplitResult c = split(GridGraph(4, 4));
  EXPECT_EQ(c.g1, (Rect{0, 0, 2, 4}));
  EXPECT_EQ(c.g2, (Rect{2, 0, 2, 4}));

  const SplitResult d = split(GridGraph(7, 9));
  EXPECT_EQ(d.cut, Axis::kCols);
  EXPECT_EQ(d.g1, (Rect{0, 0, 7, 5}));
  EXPECT_EQ(d.g2, (Rect{0, 5, 7, 4}));
}

TEST(Split, PartitionsRegion) {
  for (int rows = 2; rows <= 11; ++rows) {
    for (int cols = 2; cols <= 11; ++cols) {
      const Rect r{3, 1, rows, cols};
      if (r.m_long() < 4) continue;
      const SplitResult s = split(r);
      expect_same_region_cells(r, s.g1, s.g2);
      EXPECT_EQ(s.long_len(), r.m_long());
      EXPECT_EQ(s.g1.m_short() == r.m_short() || s.g1.m_long() == r.m_short(), true);
      EXPECT_EQ(s.h1, (r.m_long() + 1) / 2);
    }
  }
}

TEST(CountDemands, FigureAnnotations) {
  const GridGraph g(9, 7);
  const SplitResult s = split(g);
  const std::vector<int> k{2, 3, 2, 4, 0, 1, 3};
  const Configuration start = Configuration::identity(g.vertex_count());
  const ColumnDemand d = count_demands(g, s, start, demand_instance(g, s, k));
  EXPECT_EQ(d.k, k);
  EXPECT_EQ(d.total(), 15);
}

TEST(CountDemands, GroupedIsZero) {
  const GridGraph g(8, 8);
  const Configuration id = Configuration::identity(g.vertex_count());
  const ColumnDemand d = count_demands(g, split(g), id, id);
  EXPECT_EQ(d.total(), 0);
  EXPECT_TRUE(std::all_of(d.k.begin(), d.k.end(), [](int x) { return x == 0; }));
}

TEST(CountDemands, FlowBalanceOnRandomInstances) {
  std::mt19937_64 rng(11);
  const GridGraph g(8, 8);
  const SplitResult s = split(g);
  const Configuration start = Configuration::identity(g.vertex_count());
  for (int trial = 0; trial < 20; ++trial) {
    const Configuration goal = random_goal(g.vertex_count(), rng);
    int down = 0;
    int up = 0;
    for (std::size_t r = 0; r < goal.size(); ++r) {
      const bool from = in_g1(g, s, start.placement[r]);
      const bool to = in_g1(g, s, goal.placement[r]);
      down += from && !to;
      up += !from && to;
    }
    const ColumnDemand d = count_demands(g, s, start, goal);
    EXPECT_EQ(d.total(), up);
    EXPECT_EQ(d.total(), down);
  }
}

TEST(MatchExits, FigureDistances) {
  ExitAssignment asg;
  asg.h1 = 5;
  EXPECT_EQ(asg.length(ExitRoute{0, 0, 0, 0}), 4);
  EXPECT_EQ(asg.length(ExitRoute{0, 0, 0, 6}), 4 + 7 - 1);
}

TEST(MatchExits, StraightRoutesWhenAligned) {
  const GridGraph g(6, 4);
  const SplitResult s = split(g);
  std::vector<VertexId> goal(24);
  std::iota(goal.begin(), goal.end(), 0);
  // Column 1 and column 3 trade one robot each across the split.
  std::swap(goal[static_cast<std::size_t>(g.vertex(0, 1))], goal[static_cast<std::size_t>(g.vertex(5, 1))]);
  std::swap(goal[static_cast<std::size_t>(g.vertex(2, 3))], goal[static_cast<std::size_t>(g.vertex(3, 3))]);
  const Configuration start = Configuration::identity(24);
  const Configuration gl{goal};
  const ExitAssignment asg = match_exits(g, s, start, gl, count_demands(g, s, start, gl));
  ASSERT_EQ(asg.routes.size(), 2u);
  for (const ExitRoute& r : asg.routes) EXPECT_EQ(r.b, r.column);
  EXPECT_EQ(asg.total_length(), 2 + 0);
}

TEST(MatchExits, EqualsBruteForceOnSmallSplits) {
  std::mt19937_64 rng(5);
  const GridGraph g(4, 4);
  const SplitResult s = split(g);
  const Configuration start = Configuration::identity(16);
  int checked = 0;
  while (checked < 50) {
    const Configuration goal = random_goal(16, rng);
    const ColumnDemand d = count_demands(g, s, start, goal);
    if (d.total() == 0 || d.total() > 6) continue;
    const ExitAssignment asg = match_exits(g, s, start, goal, d);
    std::vector<int> slots;
    for (int b = 0; b < 4; ++b) slots.insert(slots.end(), static_cast<std::size_t>(d.k[static_cast<std::size_t>(b)]), b);
    std::vector<std::vector<std::int64_t>> cost(slots.size(), std::vector<std::int64_t>(slots.size()));
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (std::size_t j = 0; j < slots.size(); ++j) {
        ExitRoute r = asg.routes[i];
        r.column = slots[j];
        cost[i][j] = asg.length(r);
      }
    }
    EXPECT_EQ(asg.total_length(), brute_force_cost(cost));
    std::vector<int> used(4, 0);
    for (const ExitRoute& r : asg.routes) ++used[static_cast<std::size_t>(r.column)];
    EXPECT_EQ(used, d.k);
    ++checked;
  }
}

TEST(MatchExits, LargeSplitsMatchHungarianCost) {
  std::mt19937_64 rng(9);
  const GridGraph g(48, 48);
  const SplitResult s = split(g);
  const Configuration start = Configuration::identity(g.vertex_count());
  const Configuration goal = random_goal(g.vertex_count(), rng);
  const ColumnDemand d = count_demands(g, s, start, goal);
  ASSERT_GT(static_cast<std::size_t>(d.total()), kHungarianLimit);
  const ExitAssignment asg = match_exits(g, s, start, goal, d);
  std::vector<int> slots;
  for (int b = 0; b < s.short_len(); ++b) slots.insert(slots.end(), static_cast<std::size_t>(d.k[static_cast<std::size_t>(b)]), b);
  std::vector<std::vector<std::int64_t>> cost(slots.size(), std::vector<std::int64_t>(slots.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (std::size_t j = 0; j < slots.size(); ++j) {
      ExitRoute r = asg.routes[i];
      r.column = slots[j];
      cost[i][j] = asg.length(r);
    }
  }
  EXPECT_EQ(asg.total_length(), assignment_cost(cost, hungarian(cost)));
}

TEST(Hungarian, EqualsBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
    std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n));
    for (auto& row : cost) {
      for (auto& c : row) c = std::uniform_int_distribution<std::int64_t>(0, 20)(rng);
    }
    const std::vector<int> match = hungarian(cost);
    std::vector<int> sorted = match;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(sorted[i], static_cast<int>(i));
    EXPECT_EQ(assignment_cost(cost, match), brute_force_cost(cost));
  }
}

TEST(ResolveCrossovers, FigurePair) {
  ExitAssignment asg;
  asg.h1 = 6;
  // x runs right along a = 3 over column 2, where y's trunk starts at a = 1.
  asg.routes = {ExitRoute{0, 3, 0, 4}, ExitRoute{1, 1, 2, 2}};
  ASSERT_TRUE(is_crossover(asg.routes[0], asg.routes[1]));
  ASSERT_EQ(count_crossovers(asg), 1u);
  const ExitAssignment out = resolve_crossovers(asg);
  EXPECT_EQ(count_crossovers(out), 0u);
  EXPECT_EQ(out.total_length(), asg.total_length());
  EXPECT_EQ(out.routes[0].column, 2);
  EXPECT_EQ(out.routes[1].column, 4);
}

TEST(ResolveCrossovers, FreeAssignmentUnchanged) {
  ExitAssignment asg;
  asg.h1 = 4;
  asg.routes = {ExitRoute{0, 0, 0, 0}, ExitRoute{1, 2, 1, 3}, ExitRoute{2, 3, 5, 5}};
  ASSERT_EQ(count_crossovers(asg), 0u);
  const ExitAssignment out = resolve_crossovers(asg);
  for (std::size_t i = 0; i < asg.routes.size(); ++i) EXPECT_EQ(out.routes[i].column, asg.routes[i].column);
}

TEST(ResolveCrossovers, OptimalAssignmentsKeepTotalLength) {
  std::mt19937_64 rng(17);
  const GridGraph g(12, 12);
  const SplitResult s = split(g);
  const Configuration start = Configuration::identity(144);
  std::size_t with_crossovers = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Only a random subset of robots trades sides, so demands vary widely.
    std::vector<VertexId> goal(144);
    std::iota(goal.begin(), goal.end(), 0);
    std::vector<VertexId> upper;
    std::vector<VertexId> lower;
    for (VertexId v = 0; v < 144; ++v) (s.in_g1(g.cell(v)) ? upper : lower).push_back(v);
    std::shuffle(upper.begin(), upper.end(), rng);
    std::shuffle(lower.begin(), lower.end(), rng);
    const int n = std::uniform_int_distribution<int>(1, 40)(rng);
    for (int i = 0; i < n; ++i) std::swap(goal[static_cast<std::size_t>(upper[static_cast<std::size_t>(i)])], goal[static_cast<std::size_t>(lower[static_cast<std::size_t>(i)])]);
    const Configuration gl{goal};
    const ExitAssignment asg = match_exits(g, s, start, gl, count_demands(g, s, start, gl));
    with_crossovers += count_crossovers(asg) > 0;
    const ExitAssignment out = resolve_crossovers(asg);
    EXPECT_EQ(count_crossovers(out), 0u);
    EXPECT_EQ(out.total_length(), asg.total_length());
  }
  RecordProperty("inputs_with_crossovers", std::to_string(with_crossovers));
}

TEST(ResolveCrossovers, ArbitraryAssignmentsNeverGrow) {
  std::mt19937_64 rng(19);
  const int h1 = 6;
  const int width = 12;
  for (int trial = 0; trial < 200; ++trial) {
    ExitAssignment asg;
    asg.h1 = h1;
    std::vector<std::pair<int, int>> cells;
    for (int a = 0; a < h1; ++a) {
      for (int b = 0; b < width; ++b) cells.emplace_back(a, b);
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    for (int i = 0; i < n; ++i) {
      const int column = std::uniform_int_distribution<int>(0, width - 1)(rng);
      asg.routes.push_back(ExitRoute{i, cells[static_cast<std::size_t>(i)].first, cells[static_cast<std::size_t>(i)].second, column});
    }
    const ExitAssignment out = resolve_crossovers(asg);
    EXPECT_EQ(count_crossovers(out), 0u);
    EXPECT_LE(out.total_length(), asg.total_length());
    std::multiset<int> before_cols;
    std::multiset<int> after_cols;
    for (const ExitRoute& r : asg.routes) before_cols.insert(r.column);
    for (const ExitRoute& r : out.routes) after_cols.insert(r.column);
    EXPECT_EQ(before_cols, after_cols);
  }
}

struct Iteration {
  GridGraph grid;
  SplitResult split;
  Configuration start;
  Configuration goal;
  ExitAssignment assignment;
  std::vector<ExitTree> trees;
};

Iteration random_iteration(int rows, int cols, std::mt19937_64& rng) {
  Iteration it{GridGraph(rows, cols), {}, Configuration::identity(rows * cols), random_goal(rows * cols, rng), {}, {}};
  it.split = split(it.grid);
  const ColumnDemand d = count_demands(it.grid, it.split, it.start, it.goal);
  it.assignment = resolve_crossovers(match_exits(it.grid, it.split, it.start, it.goal, d));
  it.trees = build_trees(it.grid, it.split, it.assignment);
  return it;
}

TEST(BuildTrees, CoverEveryRoute) {
  std::mt19937_64 rng(23);
  for (auto [rows, cols] : {std::pair{8, 8}, {9, 7}, {12, 12}, {7, 12}}) {
    const Iteration it = random_iteration(rows, cols, rng);
    std::set<int> columns;
    for (const ExitRoute& r : it.assignment.routes) columns.insert(r.column);
    ASSERT_EQ(it.trees.size(), columns.size());
    std::map<int, const ExitTree*> by_column;
    for (const ExitTree& t : it.trees) by_column[t.column] = &t;
    for (const ExitRoute& r : it.assignment.routes) {
      const ExitTree& t = *by_column.at(r.column);
      const auto verts = t.tree.vertices();
      const std::set<VertexId> vs(verts.begin(), verts.end());
      for (VertexId v : route_path(it.grid, it.split, it.assignment, r).vertices) EXPECT_TRUE(vs.count(v));
      EXPECT_NE(std::find(t.robots.begin(), t.robots.end(), r.robot), t.robots.end());
    }
    for (const ExitTree& t : it.trees) {
      // The trunk is one straight column through both halves.
      for (VertexId v : t.tree.main_path.vertices) EXPECT_EQ(it.split.across(it.grid.cell(v)), t.column);
      EXPECT_EQ(it.split.along(it.grid.cell(t.tree.main_path.vertices.back())), it.split.long_len() - 1);
    }
  }
}

TEST(BuildTrees, NoDemandNoTrees) {
  const GridGraph g(8, 8);
  const Configuration id = Configuration::identity(64);
  const SplitResult s = split(g);
  const ExitAssignment asg = match_exits(g, s, id, id, count_demands(g, s, id, id));
  EXPECT_TRUE(build_trees(g, s, asg).empty());
}

TEST(FindBundles, RandomIterationsAreAcyclicPartitions) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Iteration it = random_iteration(16, 16, rng);
    const auto pairs = follower_pairs(it.trees);
    // Independent acyclicity check by repeated removal of sinks.
    std::vector<std::set<std::size_t>> out(it.trees.size());
    for (auto [f, l] : pairs) out[f].insert(l);
    std::vector<char> removed(it.trees.size(), 0);
    for (bool progress = true; progress;) {
      progress = false;
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (removed[i]) continue;
        const bool sink = std::all_of(out[i].begin(), out[i].end(), [&](std::size_t j) { return removed[j]; });
        if (sink) removed[i] = 1, progress = true;
      }
    }
    EXPECT_TRUE(std::all_of(removed.begin(), removed.end(), [](char c) { return c; }));

    const std::vector<Bundle> bundles = find_bundles(it.trees);
    std::vector<int> seen(it.trees.size(), 0);
    std::set<std::size_t> followers;
    for (auto [f, l] : pairs) followers.insert(f);
    for (const Bundle& b : bundles) {
      ++seen[b.leader];
      EXPECT_FALSE(followers.count(b.leader) && b.followers.empty() && false);
      for (std::size_t f : b.followers) ++seen[f];
    }
    for (int c : seen) EXPECT_EQ(c, 1);
  }
}

TEST(FindBundles, DisjointTreesAreSingletons) {
  const GridGraph g(8, 8);
  const SplitResult s = split(g);
  ExitAssignment asg;
  asg.h1 = s.h1;
  asg.routes = {ExitRoute{0, 3, 0, 0}, ExitRoute{1, 2, 3, 3}, ExitRoute{2, 1, 6, 6}};
  const auto trees = build_trees(g, s, asg);
  const auto bundles = find_bundles(trees);
  ASSERT_EQ(bundles.size(), 3u);
  for (const Bundle& b : bundles) EXPECT_TRUE(b.followers.empty());
}

void expect_iteration(const GridGraph& g, const SplitResult& s, const Configuration& start, const Configuration& goal) {
  const auto [plan, grouped] = schedule_iteration(g, s, start, goal);
  const Instance inst{g, start, grouped};
  const VerifyReport rep = verify_plan(inst, plan);
  ASSERT_TRUE(rep.ok()) << rep.message;
  for (std::size_t r = 0; r < start.size(); ++r) {
    const bool from = s.in_g1(g.cell(start.placement[r]));
    const bool to = s.in_g1(g.cell(goal.placement[r]));
    EXPECT_EQ(s.in_g1(g.cell(grouped.placement[r])), to) << "robot " << r;
    if (from == to) EXPECT_EQ(grouped.placement[r], start.placement[r]) << "robot " << r;
  }
}

TEST(ScheduleIteration, FigureInstanceGroups) {
  const GridGraph g(9, 7);
  const SplitResult s = split(g);
  const Configuration start = Configuration::identity(63);
  expect_iteration(g, s, start, demand_instance(g, s, {2, 3, 2, 4, 0, 1, 3}));
}

TEST(ScheduleIteration, RandomInstancesGroupWithoutDisplacement) {
  std::mt19937_64 rng(31);
  for (auto [rows, cols] : {std::pair{4, 3}, {5, 2}, {6, 6}, {8, 8}, {9, 7}, {12, 5}, {6, 13}, {16, 16}}) {
    for (int trial = 0; trial < 5; ++trial) {
      const GridGraph g(rows, cols);
      expect_iteration(g, split(g), Configuration::identity(rows * cols), random_goal(rows * cols, rng));
    }
  }
}

TEST(ScheduleIteration, GroupedInstanceIsEmpty) {
  const GridGraph g(8, 6);
  const SplitResult s = split(g);
  std::vector<VertexId> goal(48);
  std::iota(goal.begin(), goal.end(), 0);
  std::swap(goal[0], goal[5]);
  std::swap(goal[40], goal[47]);
  const Configuration start = Configuration::identity(48);
  const auto [plan, grouped] = schedule_iteration(g, s, start, Configuration{goal});
  EXPECT_EQ(plan.makespan(), 0u);
  EXPECT_EQ(grouped, start);
}

TEST(ScheduleIteration, RoutesFromRegionCornerOfLargerGrid) {
  std::mt19937_64 rng(37);
  const GridGraph g(10, 10);
  const Rect region{2, 3, 6, 5};
  const SplitResult s = split(region);
  std::vector<VertexId> cells;
  for (int r = 0; r < region.rows; ++r) {
    for (int c = 0; c < region.cols; ++c) cells.push_back(g.vertex(region.row0 + r, region.col0 + c));
  }
  std::vector<VertexId> shuffled = cells;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<VertexId> goal(100);
  std::iota(goal.begin(), goal.end(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) goal[static_cast<std::size_t>(cells[i])] = shuffled[i];
  const Configuration start = Configuration::identity(100);
  const auto [plan, grouped] = schedule_iteration(g, s, start, Configuration{goal});
  ASSERT_TRUE(verify_plan(Instance{g, start, grouped}, plan).ok());
  for (VertexId v = 0; v < 100; ++v) {
    if (!region.contains(g.cell(v))) EXPECT_EQ(grouped.placement[static_cast<std::size_t>(v)], v);
  }
}

TEST(ScheduleIteration, MakespanPerLongSideBounded) {
  std::mt19937_64 rng(41);
  double worst = 0;
  for (int n : {8, 16, 32}) {
    for (int trial = 0; trial < 3; ++trial) {
      const GridGraph g(n, n);
      const auto [plan, grouped] =
          schedule_iteration(g, split(g), Configuration::identity(n * n), random_goal(n * n, rng));
      worst = std::max(worst, static_cast<double>(plan.makespan()) / n);
    }
  }
  RecordProperty("max_iteration_makespan_per_long_side", std::to_string(worst));
  EXPECT_LT(worst, 40.0);
}

}  // namespace
}  // namespace sag
