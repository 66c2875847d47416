#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sag/grid.hpp"

namespace sag {

struct Move {
  RobotId robot = 0;
  VertexId from = 0;
  VertexId to = 0;
  friend bool operator==(const Move&, const Move&) = default;
};

// One synchronized time step. Robots without a Move wait in place.
struct Step {
  std::vector<Move> moves;
  friend bool operator==(const Step&, const Step&) = default;
};

struct Plan {
  std::vector<Step> steps;

  std::size_t makespan() const { return steps.size(); }
  std::size_t total_distance() const;
  void append(const Plan& other);
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct Metrics {
  std::size_t makespan = 0;
  std::size_t total_distance = 0;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

Metrics metrics(const Plan& plan);

enum class ConflictRule {
  kUnknownRobot,
  kDuplicateRobot,
  kStaleFrom,
  kNotAdjacent,
  kVertexConflict,
  kEdgeConflict,
};

std::string to_string(ConflictRule rule);

class ConflictError : public std::runtime_error {
 public:
  ConflictError(ConflictRule rule, RobotId robot, const std::string& what)
      : std::runtime_error(what), rule_(rule), robot_(robot) {}
  ConflictRule rule() const { return rule_; }
  RobotId robot() const { return robot_; }

 private:
  ConflictRule rule_;
  RobotId robot_;
};

struct StepViolation {
  ConflictRule rule;
  RobotId robot;
  std::string detail;
};

// Checks the collision rules for one step; returns the violation with the
// lowest robot id (rule order breaks ties), or nullopt when the step is legal.
std::optional<StepViolation> check_step(const GridGraph& grid, const Configuration& config,
                                        const Step& step);

Configuration apply_step(const GridGraph& grid, const Configuration& config, const Step& step);

struct VerifyReport {
  bool valid = false;         // every step obeys the collision rules
  bool reaches_goal = false;  // final configuration equals the goal
  std::size_t makespan = 0;
  std::size_t total_distance = 0;
  std::optional<std::size_t> failed_step;
  std::optional<RobotId> failed_robot;
  std::optional<ConflictRule> rule;
  std::string message;

  bool ok() const { return valid && reaches_goal; }
};

VerifyReport verify_plan(const Instance& instance, const Plan& plan);

// Reverses a plan: steps in reverse order, each move with from/to swapped.
// The result undoes `plan` when run from the configuration `plan` ends in.
Plan reversed(const Plan& plan);

}  // namespace sag
