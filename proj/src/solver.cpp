#include "sag/solver.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "sag/oracle.hpp"
#include "sag/split_group.hpp"

namespace sag {
namespace {

int local_index(const Rect& region, Cell c) { return (c.row - region.row0) * region.cols + (c.col - region.col0); }

void concat(Plan& dst, Plan&& src) {
  for (Step& s : src.steps) dst.steps.push_back(std::move(s));
}

// Zips two plans acting on disjoint regions.
Plan zip(Plan x, Plan y) {
  if (x.steps.size() < y.steps.size()) std::swap(x, y);
  for (std::size_t i = 0; i < y.steps.size(); ++i) {
    auto& dst = x.steps[i].moves;
    dst.insert(dst.end(), y.steps[i].moves.begin(), y.steps[i].moves.end());
  }
  return x;
}

class Recursion {
 public:
  Recursion(const GridGraph& grid, const Configuration& goal, std::vector<RobotId>& occ)
      : grid_(grid), goal_(goal), occ_(occ) {}

  Plan run(const Rect& region, int depth) {
    if (region.size() <= oracle::ConfigSpace::kMaxSearchCells) {
      Plan p = oracle::optimal_region_plan(grid_, region, occ_, goal_);
      record(depth, region, p.makespan(), true);
      return p;
    }
    if (region.m_long() == 5 && region.m_short() == 2) {
      Plan p = two_by_five(region);
      record(depth, region, p.makespan(), true);
      return p;
    }
    const SplitResult s = split(region);
    const FlipSchedule schedule = iteration_schedule(grid_, s, occ_, goal_);
    // `occ_` already holds the grouped configuration; compile from the
    // configuration before the iteration.
    std::vector<RobotId> before = occ_;
    for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
      for (const Edge& e : *it) std::swap(before[static_cast<std::size_t>(e.a)], before[static_cast<std::size_t>(e.b)]);
    }
    Plan plan = compile_flips(grid_, region, schedule, before, FlipCompiler::kAdaptive);
    record(depth, region, plan.makespan(), false);
    Plan first = run(s.g1, depth + 1);
    Plan second = run(s.g2, depth + 1);
    concat(plan, zip(std::move(first), std::move(second)));
    return plan;
  }

  std::vector<LevelTrace> levels;

 private:
  void record(int depth, const Rect& region, std::size_t makespan, bool base) {
    if (levels.size() <= static_cast<std::size_t>(depth)) {
      levels.resize(static_cast<std::size_t>(depth) + 1);
      levels[static_cast<std::size_t>(depth)] = LevelTrace{depth, 0, region, 0, true};
    }
    LevelTrace& t = levels[static_cast<std::size_t>(depth)];
    ++t.regions;
    if (region.size() > t.largest.size()) t.largest = region;
    t.makespan = std::max(t.makespan, makespan);
    t.base = t.base && base;
  }

  // A 2x5 region cannot be split (one half would be 2x2). Move the four
  // robots bound for the far 2x2 end into it, then solve the far and the
  // near 2x3 parts exactly.
  Plan two_by_five(const Rect& region) {
    const SplitResult s = split(region);  // h1 = 3 along the long side
    const oracle::ConfigSpace& whole = oracle::config_space(region.rows, region.cols);
    std::uint32_t from = 0, to = 0;
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 2; ++b) {
        const Cell c = s.cell(a, b);
        const RobotId r = occ_[static_cast<std::size_t>(grid_.vertex(c))];
        if (s.along(grid_.cell(goal_[r])) >= 3) from |= 1u << local_index(region, c);
        if (a >= 3) to |= 1u << local_index(region, c);
      }
    }
    Plan plan = oracle::realize(whole, whole.shortest_mask_path(from, to), grid_, region, occ_);

    const Rect far = s.cut == Axis::kRows ? Rect{region.row0 + 2, region.col0, 3, 2}
                                          : Rect{region.row0, region.col0 + 2, 2, 3};
    const oracle::ConfigSpace& block = oracle::config_space(far.rows, far.cols);
    oracle::Arrangement target(6, -1);
    int next_near = 0;
    for (int a = 2; a < 5; ++a) {
      for (int b = 0; b < 2; ++b) {
        const Cell c = s.cell(a, b);
        const RobotId r = occ_[static_cast<std::size_t>(grid_.vertex(c))];
        const Cell g = grid_.cell(goal_[r]);
        const Cell dest = s.along(g) >= 3 ? g : s.cell(2, next_near++);
        target[static_cast<std::size_t>(local_index(far, dest))] = static_cast<std::int8_t>(local_index(far, c));
      }
    }
    concat(plan, oracle::realize(block, block.shortest_path(target), grid_, far, occ_));

    const Rect near = s.cut == Axis::kRows ? Rect{region.row0, region.col0, 3, 2}
                                           : Rect{region.row0, region.col0, 2, 3};
    concat(plan, oracle::optimal_region_plan(grid_, near, occ_, goal_));
    return plan;
  }

  const GridGraph& grid_;
  const Configuration& goal_;
  std::vector<RobotId>& occ_;
};

}  // namespace

Plan solve_small(const Instance& instance) { return oracle::optimal_makespan(instance).plan; }

SolveReport sag(const Instance& instance) {
  const auto t0 = std::chrono::steady_clock::now();
  const GridGraph& grid = instance.grid;
  require_bijection(instance.start.placement, grid.vertex_count(), "start");
  require_bijection(instance.goal.placement, grid.vertex_count(), "goal");
  std::vector<RobotId> occ = instance.start.occupancy();
  Recursion rec(grid, instance.goal, occ);
  SolveReport report;
  report.plan = rec.run(grid.bounds(), 0);
  report.iterations = std::move(rec.levels);
  const Metrics m = metrics(report.plan);
  report.makespan = m.makespan;
  report.total_distance = m.total_distance;
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

SolveReport solve(const Instance& instance) {
  SolveReport report = sag(instance);
  const VerifyReport v = verify_plan(instance, report.plan);
  if (!v.ok()) throw std::logic_error("planner produced an invalid plan: " + v.message);
  return report;
}

}  // namespace sag
