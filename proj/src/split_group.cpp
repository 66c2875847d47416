#include "sag/split_group.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "sag/hungarian.hpp"

namespace sag {
namespace {

void apply_schedule(std::vector<RobotId>& occ, const FlipSchedule& schedule) {
  for (const EdgeSet& round : schedule) {
    for (const Edge& e : round) std::swap(occ[static_cast<std::size_t>(e.a)], occ[static_cast<std::size_t>(e.b)]);
  }
}

void append(FlipSchedule& dst, const FlipSchedule& src) { dst.insert(dst.end(), src.begin(), src.end()); }

// Parallel odd-even transposition sort: every line is sorted by the key of
// the robot on it. Keys along one line must be distinct.
FlipSchedule odd_even_sort(const std::vector<std::vector<VertexId>>& lines, std::vector<RobotId>& occ,
                           const std::vector<int>& key) {
  FlipSchedule out;
  int idle = 0;
  for (int parity = 0;; parity ^= 1) {
    EdgeSet round;
    for (const auto& line : lines) {
      for (std::size_t i = static_cast<std::size_t>(parity); i + 1 < line.size(); i += 2) {
        RobotId& x = occ[static_cast<std::size_t>(line[i])];
        RobotId& y = occ[static_cast<std::size_t>(line[i + 1])];
        if (key[static_cast<std::size_t>(x)] > key[static_cast<std::size_t>(y)]) {
          std::swap(x, y);
          round.push_back(Edge::of(line[i], line[i + 1]));
        }
      }
    }
    if (round.empty()) {
      if (++idle == 2) break;
      continue;
    }
    idle = 0;
    std::sort(round.begin(), round.end());
    out.push_back(std::move(round));
  }
  return out;
}

struct BipartiteEdge {
  int left = 0;
  int right = 0;
  int preferred = 0;
};

// Proper edge colouring of a regular bipartite multigraph with `colours`
// colours (one per unit of degree), flipping alternating paths when the two
// endpoints have no common free colour.
std::vector<int> colour_regular_bipartite(int nodes, int colours, const std::vector<BipartiteEdge>& edges) {
  const auto slot = [colours](int node, int c) { return static_cast<std::size_t>(node * colours + c); };
  std::vector<int> left_at(static_cast<std::size_t>(nodes * colours), -1);
  std::vector<int> right_at(left_at.size(), -1);
  std::vector<int> colour(edges.size(), -1);
  auto set = [&](int e, int c) {
    colour[static_cast<std::size_t>(e)] = c;
    left_at[slot(edges[static_cast<std::size_t>(e)].left, c)] = e;
    right_at[slot(edges[static_cast<std::size_t>(e)].right, c)] = e;
  };
  // Free colour closest to `p` (ties to the lower colour).
  auto nearest_free = [&](int p, auto&& is_free) {
    for (int d = 0; d < colours; ++d) {
      if (p - d >= 0 && is_free(p - d)) return p - d;
      if (p + d < colours && is_free(p + d)) return p + d;
    }
    return -1;
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const int e = static_cast<int>(i);
    const int u = edges[i].left, v = edges[i].right;
    const int p = std::clamp(edges[i].preferred, 0, colours - 1);
    const int common = nearest_free(p, [&](int c) { return left_at[slot(u, c)] < 0 && right_at[slot(v, c)] < 0; });
    if (common >= 0) {
      set(e, common);
      continue;
    }
    const int alpha = nearest_free(p, [&](int c) { return left_at[slot(u, c)] < 0; });
    const int beta = nearest_free(p, [&](int c) { return right_at[slot(v, c)] < 0; });
    if (alpha < 0 || beta < 0) throw std::logic_error("edge colouring: node degree exceeds colour count");
    // Alternating alpha/beta path from v; swapping it frees alpha at v.
    std::vector<int> path;
    int node = v;
    bool on_right = true;
    int c = alpha;
    for (;;) {
      const int f = on_right ? right_at[slot(node, c)] : left_at[slot(node, c)];
      if (f < 0) break;
      path.push_back(f);
      node = on_right ? edges[static_cast<std::size_t>(f)].left : edges[static_cast<std::size_t>(f)].right;
      on_right = !on_right;
      c = c == alpha ? beta : alpha;
    }
    for (int f : path) {
      const int old = colour[static_cast<std::size_t>(f)];
      left_at[slot(edges[static_cast<std::size_t>(f)].left, old)] = -1;
      right_at[slot(edges[static_cast<std::size_t>(f)].right, old)] = -1;
    }
    for (int f : path) set(f, colour[static_cast<std::size_t>(f)] == alpha ? beta : alpha);
    if (left_at[slot(u, alpha)] >= 0 || right_at[slot(v, alpha)] >= 0) {
      throw std::logic_error("edge colouring: alternating path reached its start");
    }
    set(e, alpha);
  }
  return colour;
}

struct Geometry {
  const GridGraph& grid;
  const SplitResult& split;

  VertexId vertex(int a, int b) const { return grid.vertex(split.cell(a, b)); }
  int along(VertexId v) const { return split.along(grid.cell(v)); }
  int across(VertexId v) const { return split.across(grid.cell(v)); }
  bool inside(VertexId v) const { return split.region.contains(grid.cell(v)); }
  std::vector<VertexId> column(int b, int a0, int a1) const {
    std::vector<VertexId> out;
    for (int a = a0; a < a1; ++a) out.push_back(vertex(a, b));
    return out;
  }
};

// Exit columns for robots that travel along their own row: robot i sits at
// (a[i], b[i]), column c takes quota[c] robots and no row sends two robots
// to the same column. Minimizes the sum of squared horizontal travel by
// successive shortest paths, starting from the zero-cost flow that keeps
// robots in their own columns. Returns nullopt if no such choice exists.
std::optional<std::vector<int>> row_distinct_exits(const std::vector<std::pair<int, int>>& at,
                                                   const std::vector<int>& quota, int rows) {
  const int n = static_cast<int>(at.size());
  const int cols = static_cast<int>(quota.size());
  struct Arc {
    int to;
    int cap;
    std::int64_t cost;
  };
  for (int window : {4, cols}) {
    // Nodes: source, robots, cells (row, column), columns, sink.
    const int source = 0;
    const int robot0 = 1;
    const int cell0 = robot0 + n;
    const int col0 = cell0 + rows * cols;
    const int sink = col0 + cols;
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(sink + 1));
    auto add = [&](int u, int v, int cap, std::int64_t cost) {
      out[static_cast<std::size_t>(u)].push_back(static_cast<int>(arcs.size()));
      arcs.push_back(Arc{v, cap, cost});
      out[static_cast<std::size_t>(v)].push_back(static_cast<int>(arcs.size()));
      arcs.push_back(Arc{u, 0, -cost});
    };
    auto push = [&](int arc) {
      arcs[static_cast<std::size_t>(arc)].cap -= 1;
      arcs[static_cast<std::size_t>(arc ^ 1)].cap += 1;
    };
    std::vector<int> robot_arc(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> choice_arcs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      robot_arc[static_cast<std::size_t>(i)] = static_cast<int>(arcs.size());
      add(source, robot0 + i, 1, 0);
      const auto [a, b] = at[static_cast<std::size_t>(i)];
      for (int c = std::max(0, b - window); c <= std::min(cols - 1, b + window); ++c) {
        choice_arcs[static_cast<std::size_t>(i)].push_back(static_cast<int>(arcs.size()));
        add(robot0 + i, cell0 + a * cols + c, 1, static_cast<std::int64_t>(b - c) * (b - c));
      }
    }
    std::vector<int> cell_arc(static_cast<std::size_t>(rows * cols));
    for (int a = 0; a < rows; ++a) {
      for (int c = 0; c < cols; ++c) {
        cell_arc[static_cast<std::size_t>(a * cols + c)] = static_cast<int>(arcs.size());
        add(cell0 + a * cols + c, col0 + c, 1, 0);
      }
    }
    std::vector<int> sink_arc(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c) {
      sink_arc[static_cast<std::size_t>(c)] = static_cast<int>(arcs.size());
      add(col0 + c, sink, quota[static_cast<std::size_t>(c)], 0);
    }
    // Zero-cost start: robots stay in their own column while it has room.
    int flow = 0;
    for (int i = 0; i < n; ++i) {
      const auto [a, b] = at[static_cast<std::size_t>(i)];
      const int sa = sink_arc[static_cast<std::size_t>(b)];
      if (arcs[static_cast<std::size_t>(sa)].cap == 0) continue;
      for (int arc : choice_arcs[static_cast<std::size_t>(i)]) {
        if (arcs[static_cast<std::size_t>(arc)].to == cell0 + a * cols + b) {
          push(robot_arc[static_cast<std::size_t>(i)]);
          push(arc);
          push(cell_arc[static_cast<std::size_t>(a * cols + b)]);
          push(sa);
          ++flow;
        }
      }
    }
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> potential(static_cast<std::size_t>(sink + 1), 0);
    while (flow < n) {
      std::vector<std::int64_t> dist(potential.size(), kInf);
      std::vector<int> via(potential.size(), -1);
      using Item = std::pair<std::int64_t, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
      dist[source] = 0;
      queue.emplace(0, source);
      while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d != dist[static_cast<std::size_t>(u)]) continue;
        for (int arc : out[static_cast<std::size_t>(u)]) {
          const Arc& e = arcs[static_cast<std::size_t>(arc)];
          if (e.cap == 0) continue;
          const std::int64_t nd = d + e.cost + potential[static_cast<std::size_t>(u)] - potential[static_cast<std::size_t>(e.to)];
          if (nd < dist[static_cast<std::size_t>(e.to)]) {
            dist[static_cast<std::size_t>(e.to)] = nd;
            via[static_cast<std::size_t>(e.to)] = arc;
            queue.emplace(nd, e.to);
          }
        }
      }
      if (dist[static_cast<std::size_t>(sink)] >= kInf) break;
      const std::int64_t reach = dist[static_cast<std::size_t>(sink)];
      for (std::size_t v = 0; v < potential.size(); ++v) potential[v] += std::min(dist[v], reach);
      for (int v = sink; v != source; v = arcs[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to) {
        push(via[static_cast<std::size_t>(v)]);
      }
      ++flow;
    }
    if (flow < n) continue;
    std::vector<int> exit(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      for (int arc : choice_arcs[static_cast<std::size_t>(i)]) {
        if (arcs[static_cast<std::size_t>(arc)].cap == 0) exit[static_cast<std::size_t>(i)] = (arcs[static_cast<std::size_t>(arc)].to - cell0) % cols;
      }
    }
    return exit;
  }
  return std::nullopt;
}

void require_region(const GridGraph& grid, const SplitResult& split, const Configuration& config,
                    const Configuration& goal) {
  const int n = grid.vertex_count();
  if (static_cast<int>(config.size()) != n || static_cast<int>(goal.size()) != n) {
    throw BijectionError("configuration size does not match the grid");
  }
  (void)split;
}

}  // namespace

SplitResult split(const Rect& region) {
  if (region.m_long() < 3 || region.m_short() < 2) {
    throw SizeError("region too small to split");
  }
  SplitResult s;
  s.region = region;
  if (region.rows >= region.cols) {
    s.cut = Axis::kRows;
    s.h1 = (region.rows + 1) / 2;
    s.g1 = Rect{region.row0, region.col0, s.h1, region.cols};
    s.g2 = Rect{region.row0 + s.h1, region.col0, region.rows - s.h1, region.cols};
  } else {
    s.cut = Axis::kCols;
    s.h1 = (region.cols + 1) / 2;
    s.g1 = Rect{region.row0, region.col0, region.rows, s.h1};
    s.g2 = Rect{region.row0, region.col0 + s.h1, region.rows, region.cols - s.h1};
  }
  return s;
}

SplitResult split(const GridGraph& grid) { return split(grid.bounds()); }

int ColumnDemand::total() const { return std::accumulate(k.begin(), k.end(), 0); }

std::int64_t ExitAssignment::total_length() const {
  std::int64_t total = 0;
  for (const ExitRoute& r : routes) total += length(r);
  return total;
}

ColumnDemand count_demands(const GridGraph& grid, const SplitResult& split, const Configuration& config,
                           const Configuration& goal) {
  require_region(grid, split, config, goal);
  ColumnDemand d;
  d.k.assign(static_cast<std::size_t>(split.short_len()), 0);
  for (std::size_t r = 0; r < config.size(); ++r) {
    const Cell at = grid.cell(config.placement[r]);
    const Cell to = grid.cell(goal.placement[r]);
    if (!split.region.contains(at) || !split.region.contains(to)) continue;
    if (!split.in_g1(at) && split.in_g1(to)) ++d.k[static_cast<std::size_t>(split.across(at))];
  }
  return d;
}

ExitAssignment match_exits(const GridGraph& grid, const SplitResult& split, const Configuration& config,
                           const Configuration& goal, const ColumnDemand& demand) {
  require_region(grid, split, config, goal);
  ExitAssignment out;
  out.h1 = split.h1;
  for (std::size_t r = 0; r < config.size(); ++r) {
    const Cell at = grid.cell(config.placement[r]);
    const Cell to = grid.cell(goal.placement[r]);
    if (!split.region.contains(at) || !split.region.contains(to)) continue;
    if (split.in_g1(at) && !split.in_g1(to)) {
      out.routes.push_back(ExitRoute{static_cast<RobotId>(r), split.along(at), split.across(at), -1});
    }
  }
  std::vector<int> slots;
  for (std::size_t b = 0; b < demand.k.size(); ++b) slots.insert(slots.end(), static_cast<std::size_t>(demand.k[b]), static_cast<int>(b));
  if (slots.size() != out.routes.size()) {
    throw std::invalid_argument("column demands do not balance the robots leaving g1");
  }
  const std::size_t n = slots.size();
  if (n <= kHungarianLimit) {
    std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        ExitRoute r = out.routes[i];
        r.column = slots[j];
        cost[i][j] = out.length(r);
      }
    }
    const std::vector<int> match = hungarian(cost);
    for (std::size_t i = 0; i < n; ++i) out.routes[i].column = slots[static_cast<std::size_t>(match[i])];
  } else {
    // The vertical part of each cost is fixed, so the problem reduces to
    // transport on a line, where the order-preserving matching is optimal.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return std::tie(out.routes[x].b, out.routes[x].a) < std::tie(out.routes[y].b, out.routes[y].a);
    });
    for (std::size_t i = 0; i < n; ++i) out.routes[order[i]].column = slots[i];
  }
  return out;
}

bool is_crossover(const ExitRoute& x, const ExitRoute& y) {
  if (y.a >= x.a || y.column == x.column) return false;
  if (x.b <= x.column) return x.b <= y.column && y.column < x.column;
  return x.column < y.column && y.column <= x.b;
}

std::size_t count_crossovers(const ExitAssignment& assignment) {
  std::size_t count = 0;
  for (const ExitRoute& x : assignment.routes) {
    for (const ExitRoute& y : assignment.routes) count += is_crossover(x, y);
  }
  return count;
}

ExitAssignment resolve_crossovers(ExitAssignment assignment) {
  auto& routes = assignment.routes;
  if (routes.empty()) return assignment;
  int columns = 0;
  std::int64_t potential = 0;
  for (const ExitRoute& r : routes) {
    columns = std::max({columns, r.b + 1, r.column + 1});
    potential += static_cast<std::int64_t>(r.a + 1) * std::abs(r.b - r.column);
  }
  std::vector<std::vector<std::size_t>> by_column(static_cast<std::size_t>(columns));
  for (std::size_t i = 0; i < routes.size(); ++i) by_column[static_cast<std::size_t>(routes[i].column)].push_back(i);
  // Deepest route of a column (smallest a, then lowest robot id).
  auto deepest = [&](int c) -> std::ptrdiff_t {
    std::ptrdiff_t best = -1;
    for (std::size_t i : by_column[static_cast<std::size_t>(c)]) {
      if (best < 0 || std::tie(routes[i].a, routes[i].robot) <
                          std::tie(routes[static_cast<std::size_t>(best)].a, routes[static_cast<std::size_t>(best)].robot)) {
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    return best;
  };
  // Each rewrite lowers sum((a + 1) * horizontal length) by at least one.
  std::int64_t budget = potential;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < routes.size(); ++i) {
      for (bool again = true; again;) {
        again = false;
        ExitRoute& x = routes[i];
        if (x.b == x.column) break;
        const int dir = x.column > x.b ? 1 : -1;
        for (int c = x.b; c != x.column; c += dir) {
          const std::ptrdiff_t j = deepest(c);
          if (j < 0 || routes[static_cast<std::size_t>(j)].a >= x.a) continue;
          if (--budget < 0) throw std::logic_error("crossover removal did not terminate");
          ExitRoute& y = routes[static_cast<std::size_t>(j)];
          auto& from = by_column[static_cast<std::size_t>(x.column)];
          auto& to = by_column[static_cast<std::size_t>(y.column)];
          std::replace(from.begin(), from.end(), i, static_cast<std::size_t>(j));
          std::replace(to.begin(), to.end(), static_cast<std::size_t>(j), i);
          std::swap(x.column, y.column);
          changed = again = true;
          break;
        }
      }
    }
  }
  return assignment;
}

PathSegment route_path(const GridGraph& grid, const SplitResult& split, const ExitAssignment& assignment,
                       const ExitRoute& route) {
  PathSegment p;
  const int dir = route.column >= route.b ? 1 : -1;
  for (int b = route.b; b != route.column; b += dir) p.vertices.push_back(grid.vertex(split.cell(route.a, b)));
  for (int a = route.a; a < assignment.h1; ++a) p.vertices.push_back(grid.vertex(split.cell(a, route.column)));
  return p;
}

std::vector<ExitTree> build_trees(const GridGraph& grid, const SplitResult& split,
                                  const ExitAssignment& assignment) {
  const Geometry geo{grid, split};
  std::vector<std::vector<const ExitRoute*>> by_column(static_cast<std::size_t>(split.short_len()));
  for (const ExitRoute& r : assignment.routes) by_column[static_cast<std::size_t>(r.column)].push_back(&r);
  std::vector<ExitTree> trees;
  for (int c = 0; c < split.short_len(); ++c) {
    const auto& members = by_column[static_cast<std::size_t>(c)];
    if (members.empty()) continue;
    ExitTree t;
    t.column = c;
    t.top = split.h1;
    std::vector<int> reach_left(static_cast<std::size_t>(split.h1), c);
    std::vector<int> reach_right(static_cast<std::size_t>(split.h1), c);
    for (const ExitRoute* r : members) {
      t.robots.push_back(r->robot);
      t.top = std::min(t.top, r->a);
      reach_left[static_cast<std::size_t>(r->a)] = std::min(reach_left[static_cast<std::size_t>(r->a)], r->b);
      reach_right[static_cast<std::size_t>(r->a)] = std::max(reach_right[static_cast<std::size_t>(r->a)], r->b);
    }
    t.tree.main_path.vertices = geo.column(c, t.top, split.long_len());
    for (int a = split.h1 - 1; a >= t.top; --a) {
      if (reach_left[static_cast<std::size_t>(a)] < c) {
        SideBranch br{geo.vertex(a, c), {}};
        for (int b = c - 1; b >= reach_left[static_cast<std::size_t>(a)]; --b) br.path.vertices.push_back(geo.vertex(a, b));
        t.tree.side_branches.push_back(std::move(br));
      }
      if (reach_right[static_cast<std::size_t>(a)] > c) {
        SideBranch br{geo.vertex(a, c), {}};
        for (int b = c + 1; b <= reach_right[static_cast<std::size_t>(a)]; ++b) br.path.vertices.push_back(geo.vertex(a, b));
        t.tree.side_branches.push_back(std::move(br));
      }
    }
    trees.push_back(std::move(t));
  }
  return trees;
}

std::vector<std::pair<std::size_t, std::size_t>> follower_pairs(const std::vector<ExitTree>& trees) {
  std::unordered_map<VertexId, std::size_t> trunk_owner;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (VertexId v : trees[i].tree.main_path.vertices) trunk_owner.emplace(v, i);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < trees.size(); ++j) {
    for (const SideBranch& br : trees[j].tree.side_branches) {
      for (VertexId v : br.path.vertices) {
        auto it = trunk_owner.find(v);
        if (it != trunk_owner.end() && it->second != j) pairs.emplace_back(it->second, j);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::vector<Bundle> find_bundles(const std::vector<ExitTree>& trees) {
  const std::size_t n = trees.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<VertexId, std::size_t> owner;
  for (std::size_t i = 0; i < n; ++i) {
    for (VertexId v : trees[i].tree.vertices()) {
      auto [it, fresh] = owner.emplace(v, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  }
  const auto pairs = follower_pairs(trees);
  std::vector<std::vector<std::size_t>> followers_of(n);
  std::vector<int> indegree(n, 0);
  for (auto [follower, followed] : pairs) {
    followers_of[followed].push_back(follower);
    ++indegree[follower];
  }
  // Kahn's algorithm detects a cyclic follower relation.
  {
    std::vector<int> deg = indegree;
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
      if (deg[i] == 0) queue.push_back(i);
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      for (std::size_t f : followers_of[queue[q]]) {
        if (--deg[f] == 0) queue.push_back(f);
      }
    }
    if (queue.size() != n) throw CycleError("follower relation between exit trees is cyclic");
  }
  std::vector<Bundle> bundles;
  std::vector<std::ptrdiff_t> bundle_of_root(n, -1);
  std::vector<char> placed(n, 0);
  // Trees are ordered by column, so the first non-follower seen leads.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (bundle_of_root[root] >= 0 || indegree[i] != 0) continue;
    bundle_of_root[root] = static_cast<std::ptrdiff_t>(bundles.size());
    Bundle b;
    b.leader = i;
    placed[i] = 1;
    std::vector<std::size_t> queue{i};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      for (std::size_t f : followers_of[queue[q]]) {
        if (placed[f]) continue;
        placed[f] = 1;
        b.followers.push_back(f);
        queue.push_back(f);
      }
    }
    bundles.push_back(std::move(b));
  }
  // Trees that only touch through shared branches join their component's bundle.
  for (std::size_t i = 0; i < n; ++i) {
    if (placed[i]) continue;
    const std::ptrdiff_t k = bundle_of_root[find(i)];
    if (k < 0) throw CycleError("bundle without a leader");
    bundles[static_cast<std::size_t>(k)].followers.push_back(i);
    placed[i] = 1;
  }
  return bundles;
}

FlipSchedule iteration_schedule(const GridGraph& grid, const SplitResult& split, std::vector<RobotId>& occupancy,
                                const Configuration& goal, IterationStats* stats) {
  const Geometry geo{grid, split};
  const int L = split.long_len(), S = split.short_len(), h1 = split.h1;
  Configuration config;
  config.placement.assign(occupancy.size(), -1);
  for (std::size_t v = 0; v < occupancy.size(); ++v) config.placement[static_cast<std::size_t>(occupancy[v])] = static_cast<VertexId>(v);
  auto goes_to_g1 = [&](RobotId r) { return split.in_g1(grid.cell(goal[r])); };

  const ColumnDemand demand = count_demands(grid, split, config, goal);
  const ExitAssignment assignment =
      resolve_crossovers(match_exits(grid, split, config, goal, demand));
  const std::vector<ExitTree> trees = build_trees(grid, split, assignment);
  const std::vector<Bundle> bundles = find_bundles(trees);
  if (stats) {
    *stats = IterationStats{};
    stats->crossing = assignment.routes.size();
  }

  // Incoming robots of column b: those in g2 with goals in g1.
  auto incoming = [&](int b) {
    RobotGroup in;
    for (int a = h1; a < L; ++a) {
      const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, b))];
      if (goes_to_g1(r)) in.push_back(r);
    }
    return in;
  };

  // Trees that share no vertex with any other tree can exchange through
  // their own trunks, all in parallel. The general routing below costs the
  // same however many trees it carries, so the tree exchange is only used
  // when it settles every tree and is the shorter of the two.
  const bool all_isolated =
      std::all_of(bundles.begin(), bundles.end(), [](const Bundle& b) { return b.followers.empty(); });
  if (trees.empty()) return {};
  std::optional<FlipSchedule> by_trees;
  std::vector<RobotId> tree_occ;
  if (all_isolated) {
    tree_occ = occupancy;
    std::vector<FlipSchedule> parts;
    for (const ExitTree& t : trees) {
      PathSegment branch{geo.column(t.column, h1, L)};
      parts.push_back(tree_shift_schedule(grid, t.tree, tree_occ, branch, incoming(t.column), t.robots));
    }
    by_trees = merge_parallel(parts);
  }

  // General routing. Crossing robots of g1 are brought to their exit
  // columns next to the split line by a column-row-column permutation, the
  // incoming robots are gathered at the split in their columns, the two
  // packs swap, and the routing is undone so everybody else returns home.
  std::vector<int> exit_column(occupancy.size(), -1);
  std::vector<int> quota(static_cast<std::size_t>(S), 0);
  for (const ExitTree& t : trees) {
    for (RobotId r : t.robots) exit_column[static_cast<std::size_t>(r)] = t.column;
    quota[static_cast<std::size_t>(t.column)] = static_cast<int>(t.robots.size());
  }

  const std::size_t n = occupancy.size();
  std::vector<std::vector<VertexId>> g1_columns, g1_rows;
  for (int b = 0; b < S; ++b) g1_columns.push_back(geo.column(b, 0, h1));
  for (int a = 0; a < h1; ++a) {
    std::vector<VertexId> row;
    for (int b = 0; b < S; ++b) row.push_back(geo.vertex(a, b));
    g1_rows.push_back(std::move(row));
  }
  std::vector<int> key(n, 0);
  FlipSchedule sort_columns, sort_rows, settle_columns;

  std::vector<std::pair<int, int>> leaving_at;
  for (const ExitRoute& r : assignment.routes) leaving_at.emplace_back(r.a, r.b);
  const std::optional<std::vector<int>> row_exits = row_distinct_exits(leaving_at, quota, h1);
  if (row_exits) {
    // Each leaving robot walks along its row to its exit column, the others
    // of the row close ranks in order; then every exit column stacks its
    // leaving robots against the split line, the rest keeping their order.
    for (std::size_t i = 0; i < assignment.routes.size(); ++i) {
      exit_column[static_cast<std::size_t>(assignment.routes[i].robot)] = (*row_exits)[i];
    }
    for (int a = 0; a < h1; ++a) {
      std::vector<char> taken(static_cast<std::size_t>(S), 0);
      for (int b = 0; b < S; ++b) {
        const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, b))];
        if (exit_column[static_cast<std::size_t>(r)] >= 0) {
          key[static_cast<std::size_t>(r)] = exit_column[static_cast<std::size_t>(r)];
          taken[static_cast<std::size_t>(exit_column[static_cast<std::size_t>(r)])] = 1;
        }
      }
      int next = 0;
      for (int b = 0; b < S; ++b) {
        const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, b))];
        if (exit_column[static_cast<std::size_t>(r)] >= 0) continue;
        while (taken[static_cast<std::size_t>(next)]) ++next;
        key[static_cast<std::size_t>(r)] = next++;
      }
    }
    sort_rows = odd_even_sort(g1_rows, occupancy, key);
    for (int c = 0; c < S; ++c) {
      const int k = quota[static_cast<std::size_t>(c)];
      int up = h1 - 1;
      int down = 0;
      for (int a = h1 - 1; a >= 0; --a) {
        const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, c))];
        if (exit_column[static_cast<std::size_t>(r)] == c) key[static_cast<std::size_t>(r)] = up--;
      }
      for (int a = 0; a < h1; ++a) {
        const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, c))];
        if (exit_column[static_cast<std::size_t>(r)] != c) key[static_cast<std::size_t>(r)] = down++;
      }
      if (up != h1 - 1 - k) throw std::logic_error("row routing delivered the wrong number of robots to a column");
    }
    settle_columns = odd_even_sort(g1_columns, occupancy, key);
  } else {
    // Target cell (a, b) inside g1 for every robot of g1.
    std::vector<int> ta(n, -1), tb(n, -1);
    std::vector<std::vector<char>> is_slot(static_cast<std::size_t>(h1), std::vector<char>(static_cast<std::size_t>(S), 0));
    for (int c = 0; c < S; ++c) {
      std::vector<RobotId> leaving;
      for (int a = h1 - 1; a >= 0; --a) {
        for (int b = 0; b < S; ++b) {
          const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, b))];
          if (exit_column[static_cast<std::size_t>(r)] == c) leaving.push_back(r);
        }
      }
      for (std::size_t i = 0; i < leaving.size(); ++i) {
        const int a = h1 - 1 - static_cast<int>(i);
        ta[static_cast<std::size_t>(leaving[i])] = a;
        tb[static_cast<std::size_t>(leaving[i])] = c;
        is_slot[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = 1;
      }
    }
    std::vector<std::pair<int, int>> vacated;
    std::vector<RobotId> displaced;
    for (int a = 0; a < h1; ++a) {
      for (int b = 0; b < S; ++b) {
        const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, b))];
        const bool slot = is_slot[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (exit_column[static_cast<std::size_t>(r)] >= 0) {
          if (!slot) vacated.emplace_back(a, b);
        } else if (slot) {
          displaced.push_back(r);
        } else {
          ta[static_cast<std::size_t>(r)] = a;
          tb[static_cast<std::size_t>(r)] = b;
        }
      }
    }
    // Robots pushed out of the slots refill the vacated cells in column order,
    // which keeps their horizontal travel short.
    auto by_column = [](const std::pair<int, int>& x, const std::pair<int, int>& y) {
      return std::tie(x.second, x.first) < std::tie(y.second, y.first);
    };
    std::vector<std::pair<int, int>> displaced_at;
    for (RobotId r : displaced) {
      const Cell at = grid.cell(config.placement[static_cast<std::size_t>(r)]);
      displaced_at.emplace_back(split.along(at), split.across(at));
    }
    std::vector<std::size_t> order(displaced.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return by_column(displaced_at[x], displaced_at[y]); });
    std::sort(vacated.begin(), vacated.end(), by_column);
    std::vector<RobotId> sorted_displaced;
    for (std::size_t i : order) sorted_displaced.push_back(displaced[i]);
    displaced = std::move(sorted_displaced);
    for (std::size_t i = 0; i < displaced.size(); ++i) {
      ta[static_cast<std::size_t>(displaced[i])] = vacated[i].first;
      tb[static_cast<std::size_t>(displaced[i])] = vacated[i].second;
    }

    // Rows of the intermediate layout come from an h1-colouring of the
    // source-column / target-column multigraph.
    std::vector<BipartiteEdge> edges;
    std::vector<RobotId> edge_robot;
    for (int b = 0; b < S; ++b) {
      for (int a = 0; a < h1; ++a) {
        const RobotId r = occupancy[static_cast<std::size_t>(geo.vertex(a, b))];
        edges.push_back(BipartiteEdge{b, tb[static_cast<std::size_t>(r)], a});
        edge_robot.push_back(r);
      }
    }
    const std::vector<int> colour = colour_regular_bipartite(S, h1, edges);
    for (std::size_t i = 0; i < edges.size(); ++i) key[static_cast<std::size_t>(edge_robot[i])] = colour[i];
    sort_columns = odd_even_sort(g1_columns, occupancy, key);
    for (std::size_t i = 0; i < edges.size(); ++i) key[static_cast<std::size_t>(edge_robot[i])] = tb[static_cast<std::size_t>(edge_robot[i])];
    sort_rows = odd_even_sort(g1_rows, occupancy, key);
    for (std::size_t i = 0; i < edges.size(); ++i) key[static_cast<std::size_t>(edge_robot[i])] = ta[static_cast<std::size_t>(edge_robot[i])];
    settle_columns = odd_even_sort(g1_columns, occupancy, key);
  }

  std::vector<FlipSchedule> herds;
  std::vector<char> marked(n, 0);
  for (int c = 0; c < S; ++c) {
    if (quota[static_cast<std::size_t>(c)] == 0) continue;
    const RobotGroup in = incoming(c);
    if (static_cast<int>(in.size()) != quota[static_cast<std::size_t>(c)]) {
      throw std::logic_error("column demand does not match its exit quota");
    }
    for (RobotId r : in) marked[static_cast<std::size_t>(r)] = 1;
    const std::vector<VertexId> col = geo.column(c, h1, L);
    TreeGraph line{col, {}};
    for (std::size_t i = 0; i + 1 < col.size(); ++i) line.edges.push_back(Edge::of(col[i], col[i + 1]));
    herds.push_back(gather(grid, line, col.front(), occupancy, marked));
  }
  // The herding in g2 is vertical like the column sorts, so it runs beside
  // them and pauses during the row sort.
  const FlipSchedule herd = merge_parallel(herds);
  const auto head = static_cast<std::ptrdiff_t>(std::min(herd.size(), sort_columns.size()));
  FlipSchedule staging = merge_parallel({sort_columns, FlipSchedule(herd.begin(), herd.begin() + head)});
  append(staging, sort_rows);
  append(staging, merge_parallel({settle_columns, FlipSchedule(herd.begin() + head, herd.end())}));

  // Swap the two packs of each column across the split line.
  std::vector<std::vector<VertexId>> segments;
  for (int c = 0; c < S; ++c) {
    const int k = quota[static_cast<std::size_t>(c)];
    if (k == 0) continue;
    std::vector<VertexId> seg = geo.column(c, h1 - k, h1 + k);
    for (int i = 0; i < 2 * k; ++i) {
      const RobotId r = occupancy[static_cast<std::size_t>(seg[static_cast<std::size_t>(i)])];
      const bool leaving = exit_column[static_cast<std::size_t>(r)] == c;
      if (leaving != (i < k) || (i >= k && !marked[static_cast<std::size_t>(r)])) {
        throw std::logic_error("staging did not pack the crossing robots at the split line");
      }
      key[static_cast<std::size_t>(r)] = i < k ? i + k : i - k;
    }
    segments.push_back(std::move(seg));
  }
  const FlipSchedule exchange = odd_even_sort(segments, occupancy, key);
  const FlipSchedule unstage = reversed(staging);
  apply_schedule(occupancy, unstage);
  FlipSchedule schedule = staging;
  append(schedule, exchange);
  append(schedule, unstage);
  if (by_trees && by_trees->size() <= schedule.size()) {
    if (stats) stats->isolated_trees = trees.size();
    occupancy = std::move(tree_occ);
    return *by_trees;
  }
  if (stats) {
    stats->bundled_trees = trees.size();
    stats->column_sort_rounds = sort_columns.size();
    stats->row_sort_rounds = sort_rows.size();
    stats->settle_rounds = settle_columns.size();
    stats->herd_rounds = herd.size();
    stats->exchange_rounds = exchange.size();
  }
  return schedule;
}

std::pair<Plan, Configuration> schedule_iteration(const GridGraph& grid, const SplitResult& split,
                                                  const Configuration& config, const Configuration& goal) {
  require_region(grid, split, config, goal);
  std::vector<RobotId> occ = config.occupancy();
  const FlipSchedule schedule = iteration_schedule(grid, split, occ, goal);
  std::vector<RobotId> run = config.occupancy();
  Plan plan = compile_flips(grid, split.region, schedule, run, FlipCompiler::kAdaptive);
  Configuration after;
  after.placement.assign(config.size(), 0);
  for (std::size_t v = 0; v < run.size(); ++v) after.placement[static_cast<std::size_t>(run[v])] = static_cast<VertexId>(v);
  return {std::move(plan), std::move(after)};
}

}  // namespace sag
