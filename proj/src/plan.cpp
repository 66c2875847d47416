#include "sag/plan.hpp"

#include <algorithm>

namespace sag {

std::size_t Plan::total_distance() const {
  std::size_t total = 0;
  for (const Step& s : steps) total += s.moves.size();
  return total;
}

void Plan::append(const Plan& other) {
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
}

Metrics metrics(const Plan& plan) { return Metrics{plan.makespan(), plan.total_distance()}; }

std::string to_string(ConflictRule rule) {
  switch (rule) {
    case ConflictRule::kUnknownRobot: return "unknown-robot";
    case ConflictRule::kDuplicateRobot: return "duplicate-robot";
    case ConflictRule::kStaleFrom: return "stale-from";
    case ConflictRule::kNotAdjacent: return "adjacency";
    case ConflictRule::kVertexConflict: return "injectivity";
    case ConflictRule::kEdgeConflict: return "edge-swap";
  }
  return "unknown";
}

namespace {

// Validates steps against a configuration while keeping the vertex ->
// robot map incrementally, so long plans verify in time linear in the
// number of moves.
class StepChecker {
 public:
  StepChecker(const GridGraph& grid, const Configuration& config)
      : grid_(grid),
        config_(config),
        occ_(config.occupancy()),
        move_of_robot_(config.size(), -1),
        entering_(occ_.size(), -1),
        leaving_(occ_.size(), -1) {}

  const Configuration& config() const { return config_; }

  std::optional<StepViolation> check(const Step& step) {
    std::optional<StepViolation> best;
    auto consider = [&best](ConflictRule rule, RobotId robot, std::string detail) {
      if (!best || robot < best->robot ||
          (robot == best->robot && static_cast<int>(rule) < static_cast<int>(best->rule))) {
        best = StepViolation{rule, robot, std::move(detail)};
      }
    };
    const auto n = static_cast<RobotId>(config_.size());
    std::vector<std::size_t> legal;
    legal.reserve(step.moves.size());
    for (std::size_t i = 0; i < step.moves.size(); ++i) {
      const Move& m = step.moves[i];
      if (m.robot < 0 || m.robot >= n) {
        consider(ConflictRule::kUnknownRobot, m.robot, "robot id out of range");
        continue;
      }
      auto& slot = move_of_robot_[static_cast<std::size_t>(m.robot)];
      if (slot >= 0) {
        consider(ConflictRule::kDuplicateRobot, m.robot, "robot moves twice in one step");
        continue;
      }
      slot = static_cast<std::int64_t>(i);
      touched_robots_.push_back(m.robot);
      if (config_[m.robot] != m.from) {
        consider(ConflictRule::kStaleFrom, m.robot,
                 "move starts at " + std::to_string(m.from) + " but robot is at " +
                     std::to_string(config_[m.robot]));
        continue;
      }
      if (!grid_.adjacent(m.from, m.to)) {
        consider(ConflictRule::kNotAdjacent, m.robot,
                 std::to_string(m.from) + " and " + std::to_string(m.to) + " are not adjacent");
        continue;
      }
      legal.push_back(i);
    }
    if (!best) {
      for (std::size_t i : legal) {
        const Move& m = step.moves[i];
        leaving_[static_cast<std::size_t>(m.from)] = m.robot;
        touched_vertices_.push_back(m.from);
      }
      for (std::size_t i : legal) {
        const Move& m = step.moves[i];
        auto& in = entering_[static_cast<std::size_t>(m.to)];
        touched_vertices_.push_back(m.to);
        if (in >= 0) {
          consider(ConflictRule::kVertexConflict, std::min(m.robot, in),
                   "two robots enter vertex " + std::to_string(m.to));
          continue;
        }
        in = m.robot;
        const RobotId occupant = occ_[static_cast<std::size_t>(m.to)];
        const RobotId mover = leaving_[static_cast<std::size_t>(m.to)];
        if (occupant >= 0 && mover < 0) {
          consider(ConflictRule::kVertexConflict, std::min(m.robot, occupant),
                   "vertex " + std::to_string(m.to) + " is held by waiting robot " +
                       std::to_string(occupant));
          continue;
        }
        if (mover >= 0 && mover != m.robot) {
          const Move& other =
              step.moves[static_cast<std::size_t>(move_of_robot_[static_cast<std::size_t>(mover)])];
          if (other.to == m.from) {
            consider(ConflictRule::kEdgeConflict, std::min(m.robot, mover),
                     "robots " + std::to_string(m.robot) + " and " + std::to_string(mover) +
                         " swap along edge " + std::to_string(m.from) + "-" + std::to_string(m.to));
          }
        }
      }
    }
    for (RobotId r : touched_robots_) move_of_robot_[static_cast<std::size_t>(r)] = -1;
    for (VertexId v : touched_vertices_) {
      entering_[static_cast<std::size_t>(v)] = -1;
      leaving_[static_cast<std::size_t>(v)] = -1;
    }
    touched_robots_.clear();
    touched_vertices_.clear();
    return best;
  }

  // Applies a step already accepted by check().
  void commit(const Step& step) {
    for (const Move& m : step.moves) occ_[static_cast<std::size_t>(m.from)] = -1;
    for (const Move& m : step.moves) {
      occ_[static_cast<std::size_t>(m.to)] = m.robot;
      config_.placement[static_cast<std::size_t>(m.robot)] = m.to;
    }
  }

 private:
  const GridGraph& grid_;
  Configuration config_;
  std::vector<RobotId> occ_;
  std::vector<std::int64_t> move_of_robot_;
  std::vector<RobotId> entering_;
  std::vector<RobotId> leaving_;
  std::vector<RobotId> touched_robots_;
  std::vector<VertexId> touched_vertices_;
};

}  // namespace

std::optional<StepViolation> check_step(const GridGraph& grid, const Configuration& config,
                                        const Step& step) {
  StepChecker checker(grid, config);
  return checker.check(step);
}

Configuration apply_step(const GridGraph& grid, const Configuration& config, const Step& step) {
  if (auto v = check_step(grid, config, step)) {
    throw ConflictError(v->rule, v->robot, to_string(v->rule) + ": " + v->detail);
  }
  Configuration next = config;
  for (const Move& m : step.moves) next.placement[static_cast<std::size_t>(m.robot)] = m.to;
  return next;
}

VerifyReport verify_plan(const Instance& instance, const Plan& plan) {
  VerifyReport report;
  StepChecker checker(instance.grid, instance.start);
  for (std::size_t t = 0; t < plan.steps.size(); ++t) {
    const Step& step = plan.steps[t];
    if (auto v = checker.check(step)) {
      report.valid = false;
      report.failed_step = t;
      report.failed_robot = v->robot;
      report.rule = v->rule;
      report.message = "step " + std::to_string(t) + ", robot " + std::to_string(v->robot) +
                       ": " + to_string(v->rule) + " (" + v->detail + ")";
      return report;
    }
    checker.commit(step);
  }
  report.valid = true;
  report.makespan = plan.makespan();
  report.total_distance = plan.total_distance();
  report.reaches_goal = checker.config() == instance.goal;
  report.message = report.reaches_goal ? "valid"
                                       : "all steps legal but final configuration differs from goal";
  return report;
}

Plan reversed(const Plan& plan) {
  Plan out;
  out.steps.reserve(plan.steps.size());
  for (auto it = plan.steps.rbegin(); it != plan.steps.rend(); ++it) {
    Step s;
    s.moves.reserve(it->moves.size());
    for (const Move& m : it->moves) s.moves.push_back(Move{m.robot, m.to, m.from});
    out.steps.push_back(std::move(s));
  }
  return out;
}

}  // namespace sag
