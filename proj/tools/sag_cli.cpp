#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sag/io.hpp"
#include "sag/oracle.hpp"
#include "sag/solver.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 1;
constexpr int kVerificationFailure = 2;
constexpr int kInfeasible = 3;

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    sag::write_file(out, text);
  }
}

std::vector<std::pair<int, int>> parse_sizes(const std::string& list) {
  std::vector<std::pair<int, int>> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    try {
      if (x == std::string::npos) {
        const int n = std::stoi(item);
        sizes.emplace_back(n, n);
      } else {
        sizes.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)));
      }
    } catch (const std::logic_error&) {
      throw sag::FormatError("bad size \"" + item + "\" (expected N or RxC)");
    }
  }
  if (sizes.empty()) throw sag::FormatError("empty size list");
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-and-group planner for fully occupied grid graphs"};
  app.require_subcommand(1);

  int rows = 0;
  int cols = 0;
  std::uint64_t seed = 1;
  int count = 1;
  std::string out;
  std::string format;
  std::string instance_path;
  std::string plan_path;
  std::string sizes;
  std::string csv_in;
  bool no_runtime = false;
  bool splits = false;

  const auto format_check = [](std::vector<std::string> allowed) { return CLI::IsMember(std::move(allowed)); };

  auto* gen = app.add_subcommand("gen", "Generate random instances (identity start, shuffled goal)");
  gen->add_option("--rows", rows, "Grid rows")->required();
  gen->add_option("--cols", cols, "Grid columns")->required();
  gen->add_option("--seed", seed, "First seed");
  gen->add_option("--count", count, "Number of instances (seeds seed, seed+1, ...)")->check(CLI::PositiveNumber);
  gen->add_option("--out", out, "Output file (count 1) or directory; stdout if omitted");
  gen->add_option("--format", format, "Output format")->check(format_check({"json"}));

  auto* solve = app.add_subcommand("solve", "Solve an instance and write the verified plan");
  solve->add_option("instance", instance_path, "Instance JSON")->required();
  solve->add_option("--out", out, "Plan output file; stdout if omitted");
  solve->add_option("--format", format, "Output format")->check(format_check({"json"}));

  auto* verify = app.add_subcommand("verify", "Check a plan against an instance");
  verify->add_option("instance", instance_path, "Instance JSON")->required();
  verify->add_option("plan", plan_path, "Plan JSON")->required();

  auto* oracle = app.add_subcommand("oracle", "Exact minimum-makespan plan (at most 9 vertices)");
  oracle->add_option("instance", instance_path, "Instance JSON")->required();
  oracle->add_option("--out", out, "Plan output file; stdout if omitted");
  oracle->add_option("--format", format, "Output format")->check(format_check({"json"}));

  auto* bench = app.add_subcommand(
      "bench",
      std::string("Benchmark sweep. CSV columns: ") + sag::kBenchColumns +
          ". Ratios divide by the Manhattan lower bounds; runtime_s is wall time of the solve; depth is the number "
          "of recursion levels. The summary is recomputed from the CSV text.");
  bench->add_option("--sizes", sizes, "Comma-separated sizes, N or RxC (default: --rows x --cols)");
  bench->add_option("--rows", rows, "Grid rows when --sizes is omitted");
  bench->add_option("--cols", cols, "Grid columns when --sizes is omitted");
  bench->add_option("--seed", seed, "First seed");
  bench->add_option("--count", count, "Seeds per size")->check(CLI::PositiveNumber);
  bench->add_option("--out", out, "CSV output file; stdout if omitted");
  bench->add_option("--format", format, "Output format")->check(format_check({"csv"}));
  bench->add_option("--summarize", csv_in, "Only print the summary of an existing CSV file");
  bench->add_flag("--no-runtime", no_runtime, "Write runtime_s as 0 for byte-reproducible CSV");

  auto* render = app.add_subcommand("render", "Render a plan frame by frame");
  render->add_option("instance", instance_path, "Instance JSON")->required();
  render->add_option("plan", plan_path, "Plan JSON")->required();
  render->add_option("--format", format, "Frame format")->check(format_check({"ascii", "svg"}));
  render->add_option("--out", out, "Output file; stdout if omitted");
  render->add_flag("--splits", splits, "Overlay the first split line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (gen->parsed()) {
      const bool to_dir = !out.empty() && (count > 1 || std::filesystem::is_directory(out));
      if (to_dir) std::filesystem::create_directories(out);
      std::string text;
      for (int i = 0; i < count; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        const std::string json = sag::instance_to_json(sag::generate_instance(rows, cols, s), s);
        if (to_dir) {
          const std::string name = "instance_" + std::to_string(rows) + "x" + std::to_string(cols) + "_s" +
                                   std::to_string(s) + ".json";
          sag::write_file((std::filesystem::path(out) / name).string(), json);
        } else {
          text += json;
        }
      }
      if (!to_dir) emit(out, text);
      return kOk;
    }
    if (solve->parsed()) {
      const sag::Instance inst = sag::instance_from_json(sag::read_file(instance_path));
      const sag::SolveReport rep = sag::sag(inst);
      const sag::VerifyReport check = sag::verify_plan(inst, rep.plan);
      if (!check.ok()) throw VerificationFailure("internal verification failed: " + check.message);
      emit(out, sag::plan_to_json(rep.plan));
      std::cerr << sag::format_report(rep);
      return kOk;
    }
    if (verify->parsed()) {
      const sag::Instance inst = sag::instance_from_json(sag::read_file(instance_path));
      const sag::Plan plan = sag::plan_from_json(sag::read_file(plan_path));
      const sag::VerifyReport rep = sag::verify_plan(inst, plan);
      if (rep.ok()) {
        std::cout << "valid makespan " << rep.makespan << " total_distance " << rep.total_distance << "\n";
        return kOk;
      }
      std::cout << "invalid: " << rep.message << "\n";
      return kVerificationFailure;
    }
    if (oracle->parsed()) {
      const sag::Instance inst = sag::instance_from_json(sag::read_file(instance_path));
      if (inst.grid.vertex_count() > sag::oracle::ConfigSpace::kMaxSearchCells) {
        std::cerr << "error: the oracle only handles grids with at most "
                  << sag::oracle::ConfigSpace::kMaxSearchCells << " vertices (got " << inst.grid.vertex_count()
                  << ")\n";
        return kInvalidInput;
      }
      const sag::oracle::OptimalResult res = sag::oracle::optimal_makespan(inst);
      if (!sag::verify_plan(inst, res.plan).ok()) throw VerificationFailure("oracle plan failed verification");
      emit(out, sag::plan_to_json(res.plan));
      std::cerr << "optimal makespan " << res.makespan << "\n";
      return kOk;
    }
    if (bench->parsed()) {
      std::string csv;
      if (!csv_in.empty()) {
        csv = sag::read_file(csv_in);
      } else {
        std::vector<std::pair<int, int>> dims;
        if (!sizes.empty()) {
          dims = parse_sizes(sizes);
        } else if (rows > 0 && cols > 0) {
          dims.emplace_back(rows, cols);
        } else {
          throw sag::FormatError("bench needs --sizes or --rows and --cols");
        }
        std::vector<sag::BenchRecord> records;
        for (auto [r, c] : dims) {
          for (int i = 0; i < count; ++i) records.push_back(sag::bench_one(r, c, seed + static_cast<std::uint64_t>(i)));
        }
        csv = sag::bench_csv(std::move(records), !no_runtime);
        emit(out, csv);
      }
      const std::string summary = sag::format_summary(sag::summarize(sag::parse_bench_csv(csv)));
      (out.empty() && csv_in.empty() ? std::cerr : std::cout) << summary;
      return kOk;
    }
    if (render->parsed()) {
      const sag::Instance inst = sag::instance_from_json(sag::read_file(instance_path));
      const sag::Plan plan = sag::plan_from_json(sag::read_file(plan_path));
      const sag::VerifyReport rep = sag::verify_plan(inst, plan);
      if (!rep.valid) {
        std::cerr << "invalid plan: " << rep.message << "\n";
        return kVerificationFailure;
      }
      emit(out, format == "svg" ? sag::render_svg(inst, plan, splits) : sag::render_ascii(inst, plan, splits));
      return kOk;
    }
  } catch (const VerificationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const sag::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}
