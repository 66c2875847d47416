#include <algorithm>
#include <array>
#include <cstdlib>
#include <optional>

#include "sag/primitives.hpp"

namespace sag {
namespace {

// Canonical tilings of a region: row bands (pairs) crossed with column
// triples for wide blocks, transposed for tall blocks. Two band phases and
// two triple phases cover every edge, so four tilings suffice.
struct Tiling {
  BlockShape shape;
  int pair_phase;
  int triple_phase;
};

BlockShape region_shape(const Rect& region) {
  if (region.cols >= 3 && region.rows >= 2) return BlockShape::kWide;
  if (region.rows >= 3 && region.cols >= 2) return BlockShape::kTall;
  throw SizeError("region too small to hold a 3x2 block");
}

std::array<Tiling, kMaxPartitionRounds> tilings_for(const Rect& region) {
  const BlockShape shape = region_shape(region);
  const int triple_len = shape == BlockShape::kWide ? region.cols : region.rows;
  const int alt = triple_len % 3 == 2 ? 2 : 1;
  return {Tiling{shape, 0, 0}, Tiling{shape, 0, alt}, Tiling{shape, 1, 0}, Tiling{shape, 1, alt}};
}

// Start of the segment of `len` cells, aligned to `phase` within [0, extent),
// that contains offset x; -1 if that segment does not fit.
int segment_start(int x, int phase, int len, int extent) {
  if (x < phase) return -1;
  const int s = phase + ((x - phase) / len) * len;
  return s + len <= extent ? s : -1;
}

std::optional<Block> covering_block(const Rect& region, const Tiling& t, Cell a, Cell b) {
  auto block_of = [&](Cell c) -> std::optional<Cell> {
    const int lr = c.row - region.row0;
    const int lc = c.col - region.col0;
    int r, col;
    if (t.shape == BlockShape::kWide) {
      r = segment_start(lr, t.pair_phase, 2, region.rows);
      col = segment_start(lc, t.triple_phase, 3, region.cols);
    } else {
      r = segment_start(lr, t.triple_phase, 3, region.rows);
      col = segment_start(lc, t.pair_phase, 2, region.cols);
    }
    if (r < 0 || col < 0) return std::nullopt;
    return Cell{region.row0 + r, region.col0 + col};
  };
  auto ba = block_of(a);
  auto bb = block_of(b);
  if (!ba || !bb || !(*ba == *bb)) return std::nullopt;
  return Block{*ba, t.shape};
}

void require_disjoint(const GridGraph& grid, const Rect& region, const EdgeSet& edges) {
  std::vector<char> seen(static_cast<std::size_t>(grid.vertex_count()), 0);
  for (const Edge& e : edges) {
    if (!grid.adjacent(e.a, e.b)) {
      throw DisjointnessError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                              " is not a grid edge");
    }
    if (!region.contains(grid.cell(e.a)) || !region.contains(grid.cell(e.b))) {
      throw DisjointnessError("edge lies outside the region");
    }
    for (VertexId v : {e.a, e.b}) {
      if (seen[static_cast<std::size_t>(v)]) {
        throw DisjointnessError("edges share vertex " + std::to_string(v));
      }
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
}

}  // namespace

std::vector<PartitionRound> partition_rounds(const GridGraph& grid, const Rect& region,
                                             const EdgeSet& edges) {
  require_disjoint(grid, region, edges);
  if (edges.empty()) return {};
  const auto tilings = tilings_for(region);

  struct Placed {
    Block block;
    EdgeSet edges;
    int round;
  };
  std::vector<Placed> placed;
  std::map<std::pair<int, std::pair<int, int>>, std::size_t> index;  // (tiling, anchor) -> placed
  for (const Edge& e : edges) {
    const Cell a = grid.cell(e.a);
    const Cell b = grid.cell(e.b);
    bool covered = false;
    for (int t = 0; t < kMaxPartitionRounds && !covered; ++t) {
      auto block = covering_block(region, tilings[static_cast<std::size_t>(t)], a, b);
      if (!block) continue;
      const auto key = std::make_pair(t, std::make_pair(block->anchor.row, block->anchor.col));
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, placed.size());
        placed.push_back(Placed{*block, {e}, t});
      } else {
        placed[it->second].edges.push_back(e);
      }
      covered = true;
    }
    if (!covered) throw DisjointnessError("edge not covered by any partition");
  }

  // Pull blocks into the earliest round where they do not overlap.
  std::stable_sort(placed.begin(), placed.end(),
                   [](const Placed& x, const Placed& y) { return x.round < y.round; });
  std::vector<std::uint8_t> busy(static_cast<std::size_t>(region.size()), 0);
  auto cells_of = [&](const Block& blk) {
    std::array<std::size_t, 6> out{};
    std::size_t k = 0;
    for (int r = 0; r < blk.rows(); ++r) {
      for (int c = 0; c < blk.cols(); ++c) {
        out[k++] = static_cast<std::size_t>((blk.anchor.row + r - region.row0) * region.cols +
                                            (blk.anchor.col + c - region.col0));
      }
    }
    return out;
  };
  for (Placed& p : placed) {
    const auto cells = cells_of(p.block);
    for (int r = 0; r <= p.round; ++r) {
      const auto bit = static_cast<std::uint8_t>(1u << r);
      const bool free = std::none_of(cells.begin(), cells.end(),
                                     [&](std::size_t c) { return busy[c] & bit; });
      if (free) {
        p.round = r;
        for (std::size_t c : cells) busy[c] |= bit;
        break;
      }
    }
  }

  std::vector<PartitionRound> rounds(kMaxPartitionRounds);
  for (Placed& p : placed) {
    auto& round = rounds[static_cast<std::size_t>(p.round)];
    round.partition.blocks.push_back(p.block);
    std::sort(p.edges.begin(), p.edges.end());
    round.edges_per_block.push_back(std::move(p.edges));
  }
  std::erase_if(rounds, [](const PartitionRound& r) { return r.partition.blocks.empty(); });
  return rounds;
}

std::vector<PartitionRound> partition_rounds(const GridGraph& grid, const EdgeSet& edges) {
  return partition_rounds(grid, grid.bounds(), edges);
}

int flip_makespan_bound() {
  const int per_round = std::max(exchange_table(BlockShape::kWide).flip_diameter(),
                                 exchange_table(BlockShape::kTall).flip_diameter());
  return kMaxPartitionRounds * per_round;
}

namespace {

// A rectangular window of the grid and the edges it exchanges in one round.
struct Window {
  Cell anchor;
  int rows = 0;
  int cols = 0;
  EdgeSet edges;
};

oracle::Arrangement window_target(const GridGraph& grid, const Window& w) {
  oracle::Arrangement target(static_cast<std::size_t>(w.rows * w.cols));
  for (std::size_t u = 0; u < target.size(); ++u) target[u] = static_cast<std::int8_t>(u);
  for (const Edge& e : w.edges) {
    const Cell a = grid.cell(e.a), b = grid.cell(e.b);
    std::swap(target[static_cast<std::size_t>((a.row - w.anchor.row) * w.cols + (a.col - w.anchor.col))],
              target[static_cast<std::size_t>((b.row - w.anchor.row) * w.cols + (b.col - w.anchor.col))]);
  }
  return target;
}

int window_cost(const GridGraph& grid, const Window& w) {
  return oracle::config_space(w.rows, w.cols).distance(window_target(grid, w));
}

void emit_round(const GridGraph& grid, const std::vector<Window>& windows, std::vector<RobotId>& occupancy,
                Plan& plan) {
  struct Active {
    const Window* window;
    const oracle::ConfigSpace* space;
    std::vector<int> path;
  };
  std::vector<Active> active;
  std::size_t longest = 0;
  for (const Window& w : windows) {
    const oracle::ConfigSpace& space = oracle::config_space(w.rows, w.cols);
    active.push_back(Active{&w, &space, space.shortest_path(window_target(grid, w))});
    longest = std::max(longest, active.back().path.size());
  }
  std::array<VertexId, oracle::ConfigSpace::kMaxCells> global{};
  std::array<RobotId, oracle::ConfigSpace::kMaxCells> robots{};
  for (std::size_t t = 0; t < longest; ++t) {
    Step step;
    for (const Active& a : active) {
      if (t >= a.path.size()) continue;
      const auto& perm = a.space->steps()[static_cast<std::size_t>(a.path[t])];
      const int cols = a.window->cols;
      const int n = a.window->rows * cols;
      for (int u = 0; u < n; ++u) {
        global[u] = grid.vertex(a.window->anchor.row + u / cols, a.window->anchor.col + u % cols);
        robots[u] = occupancy[static_cast<std::size_t>(global[u])];
      }
      for (int u = 0; u < n; ++u) {
        if (perm[u] == u) continue;
        const VertexId to = global[perm[u]];
        step.moves.push_back(Move{robots[u], global[u], to});
        occupancy[static_cast<std::size_t>(to)] = robots[u];
      }
    }
    plan.steps.push_back(std::move(step));
  }
}

std::vector<std::vector<Window>> canonical_windows(const GridGraph& grid, const Rect& region, const EdgeSet& edges) {
  std::vector<std::vector<Window>> out;
  for (const PartitionRound& round : partition_rounds(grid, region, edges)) {
    std::vector<Window> ws;
    for (std::size_t i = 0; i < round.partition.blocks.size(); ++i) {
      const Block& b = round.partition.blocks[i];
      ws.push_back(Window{b.anchor, b.rows(), b.cols(), round.edges_per_block[i]});
    }
    out.push_back(std::move(ws));
  }
  return out;
}

struct WindowTiling {
  int rows;
  int cols;
  int row_phase;
  int col_phase;
};

std::vector<WindowTiling> window_tilings(const Rect& region) {
  std::vector<WindowTiling> out;
  for (auto [h, w] : {std::pair{2, 4}, std::pair{4, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
    if (h > region.rows || w > region.cols) continue;
    for (int oy = 0; oy < h; ++oy) {
      for (int ox = 0; ox < w; ++ox) out.push_back(WindowTiling{h, w, oy, ox});
    }
  }
  return out;
}

std::vector<std::vector<Window>> greedy_windows(const GridGraph& grid, const Rect& region, const EdgeSet& edges,
                                                int& total_cost) {
  const auto tilings = window_tilings(region);
  std::vector<std::vector<Window>> rounds;
  EdgeSet remaining = edges;
  total_cost = 0;
  std::vector<std::pair<int, std::size_t>> keyed;
  while (!remaining.empty()) {
    std::vector<Window> best;
    std::size_t best_covered = 0;
    int best_cost = 0;
    for (const WindowTiling& t : tilings) {
      keyed.clear();
      const int nbx = (region.cols - t.col_phase) / t.cols;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        const Cell a = grid.cell(remaining[i].a), b = grid.cell(remaining[i].b);
        const int ra = segment_start(a.row - region.row0, t.row_phase, t.rows, region.rows);
        const int rb = segment_start(b.row - region.row0, t.row_phase, t.rows, region.rows);
        const int ca = segment_start(a.col - region.col0, t.col_phase, t.cols, region.cols);
        const int cb = segment_start(b.col - region.col0, t.col_phase, t.cols, region.cols);
        if (ra < 0 || ca < 0 || ra != rb || ca != cb) continue;
        keyed.emplace_back(((ra - t.row_phase) / t.rows) * nbx + (ca - t.col_phase) / t.cols, i);
      }
      if (keyed.empty()) continue;
      std::sort(keyed.begin(), keyed.end());
      std::vector<Window> ws;
      int cost = 0;
      for (std::size_t i = 0; i < keyed.size();) {
        Window w;
        const Cell a = grid.cell(remaining[keyed[i].second].a);
        w.rows = t.rows;
        w.cols = t.cols;
        w.anchor = Cell{region.row0 + segment_start(a.row - region.row0, t.row_phase, t.rows, region.rows),
                        region.col0 + segment_start(a.col - region.col0, t.col_phase, t.cols, region.cols)};
        std::size_t j = i;
        for (; j < keyed.size() && keyed[j].first == keyed[i].first; ++j) w.edges.push_back(remaining[keyed[j].second]);
        cost = std::max(cost, window_cost(grid, w));
        ws.push_back(std::move(w));
        i = j;
      }
      // Maximize edges covered per step; prefer the cheaper round on ties.
      const std::size_t covered = keyed.size();
      const bool better = best.empty() ||
                          covered * static_cast<std::size_t>(best_cost) > best_covered * static_cast<std::size_t>(cost) ||
                          (covered * static_cast<std::size_t>(best_cost) == best_covered * static_cast<std::size_t>(cost) &&
                           cost < best_cost);
      if (better) {
        best = std::move(ws);
        best_covered = covered;
        best_cost = cost;
      }
    }
    if (best.empty()) throw DisjointnessError("edge not covered by any window");
    EdgeSet used;
    for (const Window& w : best) used.insert(used.end(), w.edges.begin(), w.edges.end());
    std::sort(used.begin(), used.end());
    std::erase_if(remaining, [&](const Edge& e) { return std::binary_search(used.begin(), used.end(), e); });
    total_cost += best_cost;
    rounds.push_back(std::move(best));
  }
  return rounds;
}

}  // namespace

Plan compile_flips(const GridGraph& grid, const Rect& region, const FlipSchedule& schedule,
                   std::vector<RobotId>& occupancy, FlipCompiler compiler) {
  Plan plan;
  for (const EdgeSet& edges : schedule) {
    auto rounds = canonical_windows(grid, region, edges);
    if (compiler == FlipCompiler::kAdaptive) {
      int canonical_cost = 0;
      for (const auto& ws : rounds) {
        int c = 0;
        for (const Window& w : ws) c = std::max(c, window_cost(grid, w));
        canonical_cost += c;
      }
      int greedy_cost = 0;
      auto greedy = greedy_windows(grid, region, edges, greedy_cost);
      if (greedy_cost < canonical_cost) rounds = std::move(greedy);
    }
    for (const auto& ws : rounds) emit_round(grid, ws, occupancy, plan);
  }
  return plan;
}

Plan flip(const GridGraph& grid, const Configuration& config, const EdgeSet& edges) {
  std::vector<RobotId> occ = config.occupancy();
  return compile_flips(grid, grid.bounds(), FlipSchedule{edges}, occ);
}

FlipSchedule merge_parallel(const std::vector<FlipSchedule>& parts) {
  std::size_t longest = 0;
  for (const auto& p : parts) longest = std::max(longest, p.size());
  FlipSchedule out(longest);
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i) out[i].insert(out[i].end(), p[i].begin(), p[i].end());
  }
  return out;
}

FlipSchedule reversed(const FlipSchedule& schedule) {
  return FlipSchedule(schedule.rbegin(), schedule.rend());
}

}  // namespace sag
