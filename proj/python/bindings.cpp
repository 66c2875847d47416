#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sag/io.hpp"
#include "sag/oracle.hpp"
#include "sag/solver.hpp"

namespace py = pybind11;

namespace {

using MoveTuple = std::tuple<sag::RobotId, sag::VertexId, sag::VertexId>;
using PlanList = std::vector<std::vector<MoveTuple>>;

PlanList to_list(const sag::Plan& plan) {
  PlanList out;
  out.reserve(plan.steps.size());
  for (const sag::Step& s : plan.steps) {
    std::vector<MoveTuple> step;
    for (const sag::Move& m : s.moves) step.emplace_back(m.robot, m.from, m.to);
    out.push_back(std::move(step));
  }
  return out;
}

sag::Plan from_list(const PlanList& steps) {
  sag::Plan plan;
  for (const auto& s : steps) {
    sag::Step step;
    for (const auto& [r, u, v] : s) step.moves.push_back(sag::Move{r, u, v});
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

py::dict instance_dict(const sag::Instance& inst) {
  py::dict d;
  d["rows"] = inst.grid.rows();
  d["cols"] = inst.grid.cols();
  d["start"] = inst.start.placement;
  d["goal"] = inst.goal.placement;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sag, m) {
  m.doc() = "Split-and-group planner for fully occupied grid graphs";

  static py::exception<sag::InfeasibleError> infeasible(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sag::InfeasibleError& e) {
      py::set_error(infeasible, e.what());
    }
  });

  m.def(
      "generate_instance",
      [](int rows, int cols, std::uint64_t seed) { return instance_dict(sag::generate_instance(rows, cols, seed)); },
      py::arg("rows"), py::arg("cols"), py::arg("seed"));

  m.def(
      "solve",
      [](int rows, int cols, std::vector<sag::VertexId> start, std::vector<sag::VertexId> goal) {
        const sag::Instance inst = sag::make_instance(rows, cols, std::move(start), std::move(goal));
        sag::SolveReport rep;
        {
          py::gil_scoped_release release;
          rep = sag::solve(inst);
        }
        py::dict d;
        d["plan"] = to_list(rep.plan);
        d["makespan"] = rep.makespan;
        d["total_distance"] = rep.total_distance;
        d["runtime"] = rep.runtime_seconds;
        py::list levels;
        for (const sag::LevelTrace& l : rep.iterations) {
          py::dict level;
          level["depth"] = l.depth;
          level["regions"] = l.regions;
          level["largest"] = py::make_tuple(l.largest.rows, l.largest.cols);
          level["makespan"] = l.makespan;
          level["base"] = l.base;
          levels.append(level);
        }
        d["levels"] = levels;
        return d;
      },
      py::arg("rows"), py::arg("cols"), py::arg("start"), py::arg("goal"),
      "Solve an instance; returns the verified plan as a list of steps of (robot, from, to) moves.");

  m.def(
      "verify",
      [](int rows, int cols, std::vector<sag::VertexId> start, std::vector<sag::VertexId> goal, const PlanList& plan) {
        const sag::Instance inst = sag::make_instance(rows, cols, std::move(start), std::move(goal));
        const sag::VerifyReport rep = sag::verify_plan(inst, from_list(plan));
        py::dict d;
        d["valid"] = rep.valid;
        d["reaches_goal"] = rep.reaches_goal;
        d["makespan"] = rep.makespan;
        d["total_distance"] = rep.total_distance;
        d["message"] = rep.message;
        return d;
      },
      py::arg("rows"), py::arg("cols"), py::arg("start"), py::arg("goal"), py::arg("plan"));

  m.def(
      "optimal_makespan",
      [](int rows, int cols, std::vector<sag::VertexId> start, std::vector<sag::VertexId> goal) {
        const sag::Instance inst = sag::make_instance(rows, cols, std::move(start), std::move(goal));
        return sag::oracle::optimal_makespan(inst).makespan;
      },
      py::arg("rows"), py::arg("cols"), py::arg("start"), py::arg("goal"),
      "Exact minimum makespan for grids of at most 9 vertices.");

  m.def(
      "lower_bounds",
      [](int rows, int cols, std::vector<sag::VertexId> start, std::vector<sag::VertexId> goal) {
        const sag::Instance inst = sag::make_instance(rows, cols, std::move(start), std::move(goal));
        return py::make_tuple(sag::oracle::makespan_lower_bound(inst), sag::oracle::distance_lower_bound(inst));
      },
      py::arg("rows"), py::arg("cols"), py::arg("start"), py::arg("goal"),
      "(max, sum) of per-robot Manhattan distances.");

  m.def(
      "instance_to_json",
      [](int rows, int cols, std::vector<sag::VertexId> start, std::vector<sag::VertexId> goal) {
        return sag::instance_to_json(sag::make_instance(rows, cols, std::move(start), std::move(goal)));
      },
      py::arg("rows"), py::arg("cols"), py::arg("start"), py::arg("goal"));
  m.def("plan_to_json", [](const PlanList& plan) { return sag::plan_to_json(from_list(plan)); }, py::arg("plan"));
}
