#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "sag/oracle.hpp"

namespace sag {
namespace {

using oracle::Arrangement;

// Legal steps found by brute force over every move assignment, checked with
// the grid_core collision rules (independent of the cycle enumeration).
std::set<std::vector<std::int8_t>> brute_force_steps(const GridGraph& g) {
  const int n = g.vertex_count();
  const auto id = Configuration::identity(n);
  std::vector<std::vector<VertexId>> options(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    options[v] = g.neighbors(v);
    options[v].push_back(v);
  }
  std::set<std::vector<std::int8_t>> out;
  std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
  for (;;) {
    Step s;
    std::vector<std::int8_t> perm(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v) {
      const VertexId to = options[v][choice[v]];
      perm[v] = static_cast<std::int8_t>(to);
      if (to != v) s.moves.push_back(Move{v, v, to});
    }
    if (!s.moves.empty() && !check_step(g, id, s)) out.insert(perm);
    int i = 0;
    while (i < n && ++choice[i] == options[i].size()) choice[i++] = 0;
    if (i == n) break;
  }
  return out;
}

Arrangement identity_arrangement(int n) {
  Arrangement a(static_cast<std::size_t>(n));
  std::iota(a.begin(), a.end(), 0);
  return a;
}

TEST(ConfigSpace, CycleAndStepCounts) {
  EXPECT_EQ(oracle::config_space(3, 2).cycles().size(), 3u);
  EXPECT_EQ(oracle::config_space(3, 2).steps().size(), 6u);
  EXPECT_EQ(oracle::config_space(3, 3).cycles().size(), 13u);
  EXPECT_EQ(oracle::config_space(2, 2).cycles().size(), 1u);
}

TEST(ConfigSpace, StepsMatchCollisionRules) {
  for (auto [r, c] : std::vector<std::pair<int, int>>{{3, 2}, {2, 4}, {3, 3}}) {
    const auto& space = oracle::config_space(r, c);
    const auto brute = brute_force_steps(GridGraph(r, c));
    const std::set<std::vector<std::int8_t>> enumerated(space.steps().begin(), space.steps().end());
    EXPECT_EQ(enumerated, brute) << r << "x" << c;
  }
}

TEST(ConfigSpace, DistancesMatchIndependentSearch) {
  // Breadth-first search on the 3x2 grid using brute-force successors.
  const GridGraph g(3, 2);
  const auto steps = brute_force_steps(g);
  std::map<Arrangement, int> dist{{identity_arrangement(6), 0}};
  std::vector<Arrangement> frontier{identity_arrangement(6)};
  for (int d = 1; !frontier.empty(); ++d) {
    std::vector<Arrangement> next;
    for (const auto& a : frontier) {
      for (const auto& s : steps) {
        Arrangement b = oracle::ConfigSpace::apply(s, a);
        if (dist.emplace(b, d).second) next.push_back(b);
      }
    }
    frontier = std::move(next);
  }
  ASSERT_EQ(dist.size(), 720u);
  const auto& space = oracle::config_space(3, 2);
  int diameter = 0;
  for (const auto& [arr, d] : dist) {
    EXPECT_EQ(space.distance(arr), d);
    diameter = std::max(diameter, d);
  }
  EXPECT_EQ(space.diameter(), diameter);
  EXPECT_EQ(space.diameter(), 7);
}

TEST(OptimalMakespan, IdentityAndTranspositions) {
  const auto id = Configuration::identity(6).placement;
  EXPECT_EQ(oracle::optimal_makespan(make_instance(3, 2, id, id)).makespan, 0u);
  const GridGraph g(3, 2);
  for (VertexId u = 0; u < 6; ++u) {
    for (VertexId v = u + 1; v < 6; ++v) {
      if (!g.adjacent(u, v)) continue;
      auto goal = id;
      std::swap(goal[u], goal[v]);
      const Instance inst = make_instance(3, 2, id, goal);
      const auto res = oracle::optimal_makespan(inst);
      EXPECT_TRUE(verify_plan(inst, res.plan).ok());
      // The two end edges of the short side sit on a single 4-cycle and need
      // five steps; every edge shared with the middle row takes three.
      const bool end_edge = (u == 0 && v == 1) || (u == 4 && v == 5);
      EXPECT_EQ(res.makespan, end_edge ? 5u : 3u) << u << "-" << v;
    }
  }
}

TEST(OptimalMakespan, AllSixByOnePermutationsRespectLowerBound) {
  std::vector<VertexId> goal = Configuration::identity(6).placement;
  const auto id = goal;
  int tight = 0, total = 0;
  do {
    const Instance inst = make_instance(3, 2, id, goal);
    const auto res = oracle::optimal_makespan(inst);
    ASSERT_TRUE(verify_plan(inst, res.plan).ok());
    const auto lb = oracle::makespan_lower_bound(inst);
    EXPECT_LE(lb, res.makespan);
    EXPECT_LE(oracle::distance_lower_bound(inst), res.plan.total_distance());
    tight += lb == res.makespan;
    ++total;
  } while (std::next_permutation(goal.begin(), goal.end()));
  EXPECT_EQ(total, 720);
  RecordProperty("lower_bound_tight", tight);
}

TEST(OptimalMakespan, ThreeByThreeWithinDiameter) {
  const auto& space = oracle::config_space(3, 3);
  EXPECT_EQ(space.reachable_count(), 362880u);
  EXPECT_EQ(space.diameter(), 8);
  std::vector<VertexId> goal = {4, 0, 8, 2, 6, 1, 7, 3, 5};
  const Instance inst = make_instance(3, 3, Configuration::identity(9).placement, goal);
  const auto res = oracle::optimal_makespan(inst);
  EXPECT_TRUE(verify_plan(inst, res.plan).ok());
  EXPECT_LE(res.makespan, 8u);
  EXPECT_GE(res.makespan, oracle::makespan_lower_bound(inst));
}

TEST(OptimalMakespan, RejectsLargeGrids) {
  const auto id = Configuration::identity(12).placement;
  EXPECT_THROW(oracle::optimal_makespan(make_instance(4, 3, id, id)), SizeError);
}

TEST(OptimalMakespan, TwoByTwoExchangeIsInfeasible) {
  const auto& space = oracle::config_space(2, 2);
  EXPECT_EQ(space.distance(Arrangement{0, 1, 2, 3}), 0);
  EXPECT_THROW(space.shortest_path(Arrangement{1, 0, 2, 3}), InfeasibleError);
  EXPECT_EQ(space.reachable_count(), 4u);
}

TEST(LowerBounds, Manhattan) {
  auto id = Configuration::identity(16).placement;
  EXPECT_EQ(oracle::makespan_lower_bound(make_instance(4, 4, id, id)), 0u);
  EXPECT_EQ(oracle::distance_lower_bound(make_instance(4, 4, id, id)), 0u);
  auto corner = id;
  std::swap(corner[0], corner[15]);
  EXPECT_EQ(oracle::makespan_lower_bound(make_instance(4, 4, id, corner)), 6u);
  auto adjacent = id;
  std::swap(adjacent[5], adjacent[6]);
  EXPECT_EQ(oracle::distance_lower_bound(make_instance(4, 4, id, adjacent)), 2u);
}

TEST(MaskSearch, MovesUnlabeledGroup) {
  const auto& space = oracle::config_space(2, 5);
  // Left column pair to right column pair.
  const auto path = space.shortest_mask_path(0b0000100001u, 0b1000010000u);
  EXPECT_GE(path.size(), 4u);
}

}  // namespace
}  // namespace sag
