#include <gtest/gtest.h>


#include "sag/grid.hpp"
#include "sag/plan.hpp"

namespace sag {
namespace {

// Ring of the 3x2 grid (row-major ids 0 1 / 2 3 / 4 5).
const std::vector<VertexId> kRing = {0, 1, 3, 5, 4, 2};

Step rotate_ring(const Configuration& config) {
  const auto occ = config.occupancy();
  Step s;
  for (std::size_t i = 0; i < kRing.size(); ++i) {
    const VertexId from = kRing[i];
    const VertexId to = kRing[(i + 1) % kRing.size()];
    s.moves.push_back(Move{occ[static_cast<std::size_t>(from)], from, to});
  }
  return s;
}

TEST(GridGraph, CountsAndAdjacency) {
  const Instance inst = make_instance(3, 2, Configuration::identity(6).placement,
                                      Configuration::identity(6).placement);
  EXPECT_EQ(inst.grid.vertex_count(), 6);
  EXPECT_EQ(inst.grid.edge_count(), 7);
  EXPECT_TRUE(inst.grid.adjacent(0, 1));
  EXPECT_TRUE(inst.grid.adjacent(1, 3));
  EXPECT_FALSE(inst.grid.adjacent(1, 2));
  EXPECT_FALSE(inst.grid.adjacent(0, 3));

  const GridGraph g(9, 7);
  EXPECT_EQ(g.vertex_count(), 63);
  EXPECT_EQ(g.m_long(), 9);
  EXPECT_EQ(g.m_short(), 7);
  EXPECT_EQ(g.long_axis(), Axis::kRows);
  EXPECT_EQ(GridGraph(4, 9).long_axis(), Axis::kCols);

  int degree_sum = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (VertexId w : g.neighbors(v)) {
      EXPECT_TRUE(g.adjacent(w, v));
      ++degree_sum;
    }
  }
  EXPECT_EQ(degree_sum, 2 * g.edge_count());
}

TEST(GridGraph, RejectsSmallGrids) {
  EXPECT_THROW(GridGraph(2, 2), SizeError);
  EXPECT_THROW(GridGraph(1, 5), SizeError);
  EXPECT_THROW(GridGraph(0, 3), SizeError);
  EXPECT_NO_THROW(GridGraph(2, 3));
  EXPECT_THROW(make_instance(2, 2, {0, 1, 2, 3}, {0, 1, 2, 3}), SizeError);
}

TEST(MakeInstance, RejectsNonBijections) {
  EXPECT_THROW(make_instance(3, 2, {0, 1, 2, 3, 4, 4}, {0, 1, 2, 3, 4, 5}), BijectionError);
  EXPECT_THROW(make_instance(3, 2, {0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4}), BijectionError);
  EXPECT_THROW(make_instance(3, 2, {0, 1, 2, 3, 4, 6}, {0, 1, 2, 3, 4, 5}), BijectionError);
}

TEST(ApplyStep, EmptyStepKeepsConfiguration) {
  const GridGraph g(3, 2);
  const auto id = Configuration::identity(6);
  EXPECT_EQ(apply_step(g, id, Step{}), id);
}

TEST(ApplyStep, RingRotationIsBijective) {
  const GridGraph g(3, 2);
  const auto id = Configuration::identity(6);
  const Configuration next = apply_step(g, id, rotate_ring(id));
  EXPECT_EQ(next.placement, (std::vector<VertexId>{1, 3, 0, 5, 2, 4}));
  EXPECT_NO_THROW(require_bijection(next.placement, 6, "next"));
}

TEST(ApplyStep, ReportsEachRule) {
  const GridGraph g(3, 2);
  const auto id = Configuration::identity(6);
  auto rule_of = [&](const Step& s) {
    try {
      apply_step(g, id, s);
    } catch (const ConflictError& e) {
      return e.rule();
    }
    ADD_FAILURE() << "step accepted";
    return ConflictRule::kUnknownRobot;
  };
  EXPECT_EQ(rule_of(Step{{{0, 0, 1}, {1, 1, 0}}}), ConflictRule::kEdgeConflict);
  EXPECT_EQ(rule_of(Step{{{0, 0, 1}}}), ConflictRule::kVertexConflict);
  EXPECT_EQ(rule_of(Step{{{0, 2, 3}}}), ConflictRule::kStaleFrom);
  EXPECT_EQ(rule_of(Step{{{0, 0, 3}}}), ConflictRule::kNotAdjacent);
  EXPECT_EQ(rule_of(Step{{{0, 0, 1}, {0, 0, 2}}}), ConflictRule::kDuplicateRobot);
  EXPECT_EQ(rule_of(Step{{{9, 0, 1}}}), ConflictRule::kUnknownRobot);
}

TEST(VerifyPlan, EmptyPlanOnSolvedInstance) {
  const auto id = Configuration::identity(12).placement;
  const Instance inst = make_instance(4, 3, id, id);
  const VerifyReport r = verify_plan(inst, Plan{});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.makespan, 0u);
  EXPECT_EQ(r.total_distance, 0u);
}

TEST(VerifyPlan, FirstViolationIsReported) {
  const auto id = Configuration::identity(6);
  Plan plan;
  plan.steps.push_back(rotate_ring(id));
  // Robot 0 now sits on vertex 1; moving robot 1 onto vertex 1 while robot 0 waits.
  plan.steps.push_back(Step{{{1, 3, 1}}});
  const Instance inst = make_instance(3, 2, id.placement, id.placement);
  const VerifyReport r = verify_plan(inst, plan);
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.failed_step.has_value());
  EXPECT_EQ(*r.failed_step, 1u);
  EXPECT_EQ(*r.rule, ConflictRule::kVertexConflict);
  EXPECT_EQ(*r.failed_robot, 0);
}

TEST(VerifyPlan, DetectsGoalMismatch) {
  const auto id = Configuration::identity(6);
  Plan plan;
  plan.steps.push_back(rotate_ring(id));
  const Instance inst = make_instance(3, 2, id.placement, id.placement);
  const VerifyReport r = verify_plan(inst, plan);
  EXPECT_TRUE(r.valid);
  EXPECT_FALSE(r.reaches_goal);
}

TEST(Metrics, CountsStepsAndMoves) {
  EXPECT_EQ(metrics(Plan{}), (Metrics{0, 0}));
  Plan one;
  one.steps.push_back(rotate_ring(Configuration::identity(6)));
  EXPECT_EQ(metrics(one), (Metrics{1, 6}));
  Plan two = one;
  two.append(one);
  EXPECT_EQ(metrics(two), (Metrics{2, 12}));
}

TEST(Reversed, UndoesPlan) {
  const GridGraph g(3, 2);
  auto c = Configuration::identity(6);
  Plan p;
  for (int i = 0; i < 3; ++i) {
    p.steps.push_back(rotate_ring(c));
    c = apply_step(g, c, p.steps.back());
  }
  const Instance back{g, c, Configuration::identity(6)};
  EXPECT_TRUE(verify_plan(back, reversed(p)).ok());
}

// Accepted steps under full occupancy decompose into disjoint directed cycles.
TEST(ApplyStep, AcceptedStepsAreCycleUnions) {
  const GridGraph g(3, 2);
  const auto id = Configuration::identity(6);
  std::vector<std::vector<VertexId>> options(6);
  for (VertexId v = 0; v < 6; ++v) {
    options[v] = g.neighbors(v);
    options[v].push_back(v);  // wait
  }
  int accepted = 0;
  std::vector<std::size_t> choice(6, 0);
  for (;;) {
    Step s;
    for (VertexId v = 0; v < 6; ++v) {
      const VertexId to = options[v][choice[v]];
      if (to != v) s.moves.push_back(Move{v, v, to});
    }
    if (!s.moves.empty() && !check_step(g, id, s)) {
      ++accepted;
      std::vector<VertexId> next(6, -1);
      for (const Move& m : s.moves) next[m.from] = m.to;
      for (const Move& m : s.moves) {
        VertexId v = m.from;
        int len = 0;
        do {
          ASSERT_GE(next[v], 0) << "chain leaves the moving set";
          v = next[v];
          ++len;
        } while (v != m.from && len <= 6);
        EXPECT_EQ(v, m.from);
        EXPECT_GE(len, 4);
      }
    }
    std::size_t i = 0;
    while (i < 6 && ++choice[i] == options[i].size()) choice[i++] = 0;
    if (i == 6) break;
  }
  // Two squares and the outer ring, each in two directions.
  EXPECT_EQ(accepted, 6);
}

}  // namespace
}  // namespace sag
