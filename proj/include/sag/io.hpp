#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sag/grid.hpp"
#include "sag/plan.hpp"
#include "sag/solver.hpp"

namespace sag {

// Malformed file contents (bad JSON, missing keys, wrong types).
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kGeneratorName = "mt19937_64-fisher-yates";

/// Reproducible generator: std::mt19937_64 seeded with `seed`, then a
/// Fisher-Yates pass (i from n-1 down to 1) drawing j in [0, i] by rejection
/// sampling on the raw 64-bit outputs. Start is the identity.
Instance generate_instance(int rows, int cols, std::uint64_t seed);

// Instance JSON: {"rows":R,"cols":C,"start":[...],"goal":[...]}, optionally
// followed by "generator" and "seed" when the instance came from gen.
std::string instance_to_json(const Instance& instance);
std::string instance_to_json(const Instance& instance, std::uint64_t seed);
Instance instance_from_json(const std::string& text);

// Plan JSON: {"steps":[[{"robot":r,"from":u,"to":v},...],...]}
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Human-readable solve report with the per-level trace.
std::string format_report(const SolveReport& report);

struct BenchRecord {
  int rows = 0;
  int cols = 0;
  std::uint64_t seed = 0;
  std::size_t makespan = 0;
  std::size_t total_distance = 0;
  std::size_t makespan_lb = 0;
  std::size_t distance_lb = 0;
  double makespan_ratio = 0.0;  // makespan / makespan_lb, 1 when the bound is 0
  double distance_ratio = 0.0;
  double runtime_seconds = 0.0;
  int depth = 0;
};

inline constexpr const char* kBenchColumns =
    "rows,cols,seed,makespan,total_distance,makespan_lb,distance_lb,makespan_ratio,distance_ratio,runtime_s,depth";

// Solves generate_instance(rows, cols, seed) and fills a record. Throws
// std::logic_error if the plan fails verification.
BenchRecord bench_one(int rows, int cols, std::uint64_t seed);

// Records sorted by (rows, cols, seed). With `include_runtime` false the
// runtime column is written as 0 so the output is byte-reproducible.
std::string bench_csv(std::vector<BenchRecord> records, bool include_runtime = true);
std::vector<BenchRecord> parse_bench_csv(const std::string& text);

struct SizeSummary {
  int rows = 0;
  int cols = 0;
  std::size_t count = 0;
  double mean_makespan_ratio = 0.0;
  double max_makespan_ratio = 0.0;
  double mean_makespan_per_long = 0.0;  // makespan / m_long
  double max_makespan_per_long = 0.0;
  double mean_distance_ratio = 0.0;
  double mean_runtime = 0.0;
};

struct BenchSummary {
  std::vector<SizeSummary> sizes;  // in (rows, cols) order
  // Least-squares slope of log(mean runtime) against log(|V|); 0 when fewer
  // than two sizes have positive runtime.
  double runtime_exponent = 0.0;
};

BenchSummary summarize(const std::vector<BenchRecord>& records);
std::string format_summary(const BenchSummary& summary);

// One frame for the start plus one per step. `split_lines` overlays the
// first split of the grid.
std::string render_ascii(const Instance& instance, const Plan& plan, bool split_lines = false);
std::string render_svg(const Instance& instance, const Plan& plan, bool split_lines = false);

}  // namespace sag
