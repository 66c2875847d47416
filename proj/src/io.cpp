#include "sag/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "sag/oracle.hpp"
#include "sag/split_group.hpp"

namespace sag {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

ordered_json parse(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("key \"") + key + "\" has the wrong type");
  }
}

ordered_json instance_json(const Instance& instance) {
  ordered_json j;
  j["rows"] = instance.grid.rows();
  j["cols"] = instance.grid.cols();
  j["start"] = instance.start.placement;
  j["goal"] = instance.goal.placement;
  return j;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

double ratio(std::size_t value, std::size_t bound) {
  return bound == 0 ? 1.0 : static_cast<double>(value) / static_cast<double>(bound);
}

}  // namespace

Instance generate_instance(int rows, int cols, std::uint64_t seed) {
  GridGraph grid(rows, cols);
  const int n = grid.vertex_count();
  std::vector<VertexId> goal(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) goal[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = bounded(rng, static_cast<std::uint64_t>(i) + 1);
    std::swap(goal[static_cast<std::size_t>(i)], goal[static_cast<std::size_t>(j)]);
  }
  return make_instance(rows, cols, Configuration::identity(n).placement, std::move(goal));
}

std::string instance_to_json(const Instance& instance) { return instance_json(instance).dump() + "\n"; }

std::string instance_to_json(const Instance& instance, std::uint64_t seed) {
  ordered_json j = instance_json(instance);
  j["generator"] = kGeneratorName;
  j["seed"] = seed;
  return j.dump() + "\n";
}

Instance instance_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  return make_instance(field<int>(j, "rows"), field<int>(j, "cols"), field<std::vector<VertexId>>(j, "start"),
                       field<std::vector<VertexId>>(j, "goal"));
}

std::string plan_to_json(const Plan& plan) {
  std::string out = "{\"steps\":[";
  for (std::size_t t = 0; t < plan.steps.size(); ++t) {
    if (t) out += ',';
    out += '[';
    const auto& moves = plan.steps[t].moves;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      if (i) out += ',';
      out += "{\"robot\":" + std::to_string(moves[i].robot) + ",\"from\":" + std::to_string(moves[i].from) +
             ",\"to\":" + std::to_string(moves[i].to) + "}";
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

Plan plan_from_json(const std::string& text) {
  const ordered_json j = parse(text);
  const auto& steps = j.contains("steps") ? j.at("steps") : throw FormatError("missing key \"steps\"");
  if (!steps.is_array()) throw FormatError("key \"steps\" has the wrong type");
  Plan plan;
  for (const auto& s : steps) {
    if (!s.is_array()) throw FormatError("each step must be an array of moves");
    Step step;
    for (const auto& m : s) {
      step.moves.push_back(Move{field<RobotId>(m, "robot"), field<VertexId>(m, "from"), field<VertexId>(m, "to")});
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string format_report(const SolveReport& report) {
  std::ostringstream os;
  os << "makespan " << report.makespan << "\n";
  os << "total_distance " << report.total_distance << "\n";
  os << "runtime_s " << format_double(report.runtime_seconds) << "\n";
  os << "depth " << report.depth() << "\n";
  for (const LevelTrace& l : report.iterations) {
    os << "level " << l.depth << ": " << l.regions << " region(s), largest " << l.largest.rows << "x"
       << l.largest.cols << ", makespan " << l.makespan << (l.base ? " (exact)" : "") << "\n";
  }
  return os.str();
}

BenchRecord bench_one(int rows, int cols, std::uint64_t seed) {
  const Instance inst = generate_instance(rows, cols, seed);
  const SolveReport rep = solve(inst);
  BenchRecord r;
  r.rows = rows;
  r.cols = cols;
  r.seed = seed;
  r.makespan = rep.makespan;
  r.total_distance = rep.total_distance;
  r.makespan_lb = oracle::makespan_lower_bound(inst);
  r.distance_lb = oracle::distance_lower_bound(inst);
  r.makespan_ratio = ratio(r.makespan, r.makespan_lb);
  r.distance_ratio = ratio(r.total_distance, r.distance_lb);
  r.runtime_seconds = rep.runtime_seconds;
  r.depth = rep.depth();
  return r;
}

std::string bench_csv(std::vector<BenchRecord> records, bool include_runtime) {
  std::stable_sort(records.begin(), records.end(), [](const BenchRecord& x, const BenchRecord& y) {
    return std::tie(x.rows, x.cols, x.seed) < std::tie(y.rows, y.cols, y.seed);
  });
  std::string out = std::string(kBenchColumns) + "\n";
  for (const BenchRecord& r : records) {
    out += std::to_string(r.rows) + "," + std::to_string(r.cols) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.makespan) + "," + std::to_string(r.total_distance) + "," + std::to_string(r.makespan_lb) +
           "," + std::to_string(r.distance_lb) + "," + format_double(r.makespan_ratio) + "," +
           format_double(r.distance_ratio) + "," + format_double(include_runtime ? r.runtime_seconds : 0.0) + "," +
           std::to_string(r.depth) + "\n";
  }
  return out;
}

std::vector<BenchRecord> parse_bench_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBenchColumns) throw FormatError("unexpected CSV header");
  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw FormatError("CSV row with " + std::to_string(f.size()) + " fields");
    try {
      BenchRecord r;
      r.rows = std::stoi(f[0]);
      r.cols = std::stoi(f[1]);
      r.seed = std::stoull(f[2]);
      r.makespan = std::stoull(f[3]);
      r.total_distance = std::stoull(f[4]);
      r.makespan_lb = std::stoull(f[5]);
      r.distance_lb = std::stoull(f[6]);
      r.makespan_ratio = std::stod(f[7]);
      r.distance_ratio = std::stod(f[8]);
      r.runtime_seconds = std::stod(f[9]);
      r.depth = std::stoi(f[10]);
      records.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError("malformed CSV row: " + line);
    }
  }
  return records;
}

BenchSummary summarize(const std::vector<BenchRecord>& records) {
  std::map<std::pair<int, int>, std::vector<const BenchRecord*>> groups;
  for (const BenchRecord& r : records) groups[{r.rows, r.cols}].push_back(&r);
  BenchSummary out;
  std::vector<std::pair<double, double>> points;
  for (const auto& [dims, rs] : groups) {
    SizeSummary s;
    s.rows = dims.first;
    s.cols = dims.second;
    s.count = rs.size();
    const double m_long = std::max(s.rows, s.cols);
    for (const BenchRecord* r : rs) {
      s.mean_makespan_ratio += r->makespan_ratio;
      s.max_makespan_ratio = std::max(s.max_makespan_ratio, r->makespan_ratio);
      s.mean_makespan_per_long += static_cast<double>(r->makespan) / m_long;
      s.max_makespan_per_long = std::max(s.max_makespan_per_long, static_cast<double>(r->makespan) / m_long);
      s.mean_distance_ratio += r->distance_ratio;
      s.mean_runtime += r->runtime_seconds;
    }
    const double n = static_cast<double>(s.count);
    s.mean_makespan_ratio /= n;
    s.mean_makespan_per_long /= n;
    s.mean_distance_ratio /= n;
    s.mean_runtime /= n;
    if (s.mean_runtime > 0) points.emplace_back(std::log(static_cast<double>(s.rows * s.cols)), std::log(s.mean_runtime));
    out.sizes.push_back(s);
  }
  if (points.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : points) mx += x, my += y;
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0, sxx = 0;
    for (auto [x, y] : points) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    out.runtime_exponent = sxx > 0 ? sxy / sxx : 0.0;
  }
  return out;
}

std::string format_summary(const BenchSummary& summary) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-9s %5s %12s %12s %12s %12s %12s\n", "size", "runs", "mean_ms/lb", "max_ms/lb",
                "mean_ms/m_l", "mean_d/lb", "mean_rt_s");
  os << buf;
  for (const SizeSummary& s : summary.sizes) {
    const std::string dims = std::to_string(s.rows) + "x" + std::to_string(s.cols);
    std::snprintf(buf, sizeof buf, "%-9s %5zu %12.4f %12.4f %12.4f %12.4f %12.6f\n", dims.c_str(), s.count,
                  s.mean_makespan_ratio, s.max_makespan_ratio, s.mean_makespan_per_long, s.mean_distance_ratio,
                  s.mean_runtime);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "runtime exponent vs |V|: %.4f\n", summary.runtime_exponent);
  os << buf;
  return os.str();
}

namespace {

// Frames of vertex -> robot, starting configuration first.
std::vector<std::vector<RobotId>> frames(const Instance& instance, const Plan& plan) {
  std::vector<std::vector<RobotId>> out;
  Configuration config = instance.start;
  out.push_back(config.occupancy());
  for (const Step& s : plan.steps) {
    config = apply_step(instance.grid, config, s);
    out.push_back(config.occupancy());
  }
  return out;
}

}  // namespace

std::string render_ascii(const Instance& instance, const Plan& plan, bool split_lines) {
  const GridGraph& g = instance.grid;
  const int width = static_cast<int>(std::to_string(g.vertex_count() - 1).size());
  const SplitResult s = split(g);
  std::ostringstream os;
  const auto fs = frames(instance, plan);
  for (std::size_t t = 0; t < fs.size(); ++t) {
    os << "t=" << t << "\n";
    for (int r = 0; r < g.rows(); ++r) {
      if (split_lines && s.cut == Axis::kRows && r == s.h1) {
        os << std::string(static_cast<std::size_t>(g.cols() * (width + 1) + 1), '-') << "\n";
      }
      for (int c = 0; c < g.cols(); ++c) {
        if (c) os << ' ';
        if (split_lines && s.cut == Axis::kCols && c == s.h1) os << "| ";
        const std::string id = std::to_string(fs[t][static_cast<std::size_t>(g.vertex(r, c))]);
        os << std::string(static_cast<std::size_t>(width) - id.size(), ' ') << id;
      }
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

std::string render_svg(const Instance& instance, const Plan& plan, bool split_lines) {
  const GridGraph& g = instance.grid;
  constexpr int kCell = 24;
  constexpr int kGap = 16;
  const int fw = g.cols() * kCell;
  const int fh = g.rows() * kCell;
  const auto fs = frames(instance, plan);
  const SplitResult s = split(g);
  const int n = g.vertex_count();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fw + 2 * kGap << "\" height=\""
     << static_cast<int>(fs.size()) * (fh + 2 * kGap) << "\" font-family=\"monospace\" font-size=\"9\">\n";
  for (std::size_t t = 0; t < fs.size(); ++t) {
    const int y0 = static_cast<int>(t) * (fh + 2 * kGap) + kGap;
    os << "<g id=\"t" << t << "\" transform=\"translate(" << kGap << "," << y0 << ")\">\n";
    os << "<text x=\"0\" y=\"-4\">t=" << t << "</text>\n";
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < g.cols(); ++c) {
        const RobotId robot = fs[t][static_cast<std::size_t>(g.vertex(r, c))];
        const int hue = static_cast<int>((360LL * robot) / n);
        os << "<rect x=\"" << c * kCell << "\" y=\"" << r * kCell << "\" width=\"" << kCell << "\" height=\"" << kCell
           << "\" fill=\"hsl(" << hue << ",60%,75%)\" stroke=\"#444\"/>";
        os << "<text x=\"" << c * kCell + kCell / 2 << "\" y=\"" << r * kCell + kCell / 2 + 3
           << "\" text-anchor=\"middle\">" << robot << "</text>\n";
      }
    }
    if (split_lines) {
      if (s.cut == Axis::kRows) {
        os << "<line x1=\"0\" y1=\"" << s.h1 * kCell << "\" x2=\"" << fw << "\" y2=\"" << s.h1 * kCell;
      } else {
        os << "<line x1=\"" << s.h1 * kCell << "\" y1=\"0\" x2=\"" << s.h1 * kCell << "\" y2=\"" << fh;
      }
      os << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sag
