#include "sag/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <numeric>

namespace sag::oracle {
namespace {

constexpr std::uint8_t kUnseen = 0xFF;

std::uint32_t factorial(int n) {
  std::uint32_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint32_t>(i);
  return f;
}

int local_index(const Rect& region, Cell c) { return (c.row - region.row0) * region.cols + (c.col - region.col0); }

VertexId global_vertex(const GridGraph& grid, const Rect& region, int local) {
  return grid.vertex(region.row0 + local / region.cols, region.col0 + local % region.cols);
}

}  // namespace

ConfigSpace::ConfigSpace(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1 || rows * cols > kMaxCells) {
    throw SizeError("configuration space supports at most " + std::to_string(kMaxCells) + " cells");
  }
  const int n = cells();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const int r = v / cols, c = v % cols;
    if (r > 0) adj[v].push_back(v - cols);
    if (c > 0) adj[v].push_back(v - 1);
    if (c + 1 < cols) adj[v].push_back(v + 1);
    if (r + 1 < rows) adj[v].push_back(v + cols);
  }

  // Each cycle is rooted at its smallest vertex and kept in the orientation
  // whose second vertex is smaller than its last one.
  std::vector<int> path;
  std::vector<char> on_path(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> extend = [&](int root, int v) {
    for (int w : adj[v]) {
      if (w == root && path.size() >= 3 && path[1] < path.back()) {
        cycles_.push_back(path);
      }
      if (w <= root || on_path[w]) continue;
      on_path[w] = 1;
      path.push_back(w);
      extend(root, w);
      path.pop_back();
      on_path[w] = 0;
    }
  };
  for (int root = 0; root < n; ++root) {
    path = {root};
    on_path[root] = 1;
    extend(root, root);
    on_path[root] = 0;
  }

  // Steps: every non-empty set of disjoint cycles, each in either direction.
  std::vector<std::uint32_t> masks;
  for (const auto& cyc : cycles_) {
    std::uint32_t m = 0;
    for (int v : cyc) m |= 1u << v;
    masks.push_back(m);
  }
  LocalPermutation current(static_cast<std::size_t>(n));
  std::iota(current.begin(), current.end(), 0);
  std::function<void(std::size_t, std::uint32_t, bool)> choose = [&](std::size_t i, std::uint32_t used,
                                                                     bool any) {
    if (i == cycles_.size()) {
      if (any) steps_.push_back(current);
      return;
    }
    choose(i + 1, used, any);
    if (used & masks[i]) return;
    const auto& cyc = cycles_[i];
    const std::size_t len = cyc.size();
    for (int dir = 0; dir < 2; ++dir) {
      for (std::size_t k = 0; k < len; ++k) {
        const int from = cyc[k];
        const int to = dir == 0 ? cyc[(k + 1) % len] : cyc[(k + len - 1) % len];
        current[from] = static_cast<std::int8_t>(to);
      }
      choose(i + 1, used | masks[i], true);
      for (int v : cyc) current[v] = static_cast<std::int8_t>(v);
    }
  };
  choose(0, 0, false);
  std::sort(steps_.begin(), steps_.end());

  inverse_step_.resize(steps_.size());
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    LocalPermutation inv(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) inv[steps_[i][u]] = static_cast<std::int8_t>(u);
    auto it = std::lower_bound(steps_.begin(), steps_.end(), inv);
    inverse_step_[i] = static_cast<int>(it - steps_.begin());
  }
}

Arrangement ConfigSpace::apply(const LocalPermutation& step, const Arrangement& arr) {
  Arrangement next(arr.size());
  for (std::size_t u = 0; u < arr.size(); ++u) next[static_cast<std::size_t>(step[u])] = arr[u];
  return next;
}

std::uint32_t ConfigSpace::rank(const Arrangement& arr) const {
  const int n = cells();
  std::uint32_t r = 0;
  std::uint32_t used = 0;
  for (int i = 0; i < n; ++i) {
    const int x = arr[i];
    const int smaller_unused = x - std::popcount(used & ((1u << x) - 1u));
    r = r * static_cast<std::uint32_t>(n - i) + static_cast<std::uint32_t>(smaller_unused);
    used |= 1u << x;
  }
  return r;
}

Arrangement ConfigSpace::unrank(std::uint32_t r) const {
  const int n = cells();
  std::array<int, kMaxCells> digits{};
  for (int i = n - 1; i >= 0; --i) {
    const auto base = static_cast<std::uint32_t>(n - i);
    digits[i] = static_cast<int>(r % base);
    r /= base;
  }
  Arrangement arr(static_cast<std::size_t>(n));
  std::uint32_t used = 0;
  for (int i = 0; i < n; ++i) {
    int k = digits[i];
    int x = 0;
    for (;; ++x) {
      if (used & (1u << x)) continue;
      if (k == 0) break;
      --k;
    }
    arr[i] = static_cast<std::int8_t>(x);
    used |= 1u << x;
  }
  return arr;
}

void ConfigSpace::search() const {
  std::call_once(searched_, [this] {
    const int n = cells();
    if (n > kMaxSearchCells) {
      throw SizeError("exhaustive search is limited to " + std::to_string(kMaxSearchCells) + " cells");
    }
    const std::uint32_t total = factorial(n);
    dist_.assign(total, kUnseen);
    parent_.assign(total, 0);
    Arrangement id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::uint32_t> frontier{rank(id)};
    dist_[frontier[0]] = 0;
    reachable_ = 1;
    std::uint8_t depth = 0;
    Arrangement next(static_cast<std::size_t>(n));
    while (!frontier.empty()) {
      std::vector<std::uint32_t> upcoming;
      for (std::uint32_t r : frontier) {
        const Arrangement arr = unrank(r);
        for (std::size_t s = 0; s < steps_.size(); ++s) {
          for (int u = 0; u < n; ++u) next[steps_[s][u]] = arr[u];
          const std::uint32_t nr = rank(next);
          if (dist_[nr] != kUnseen) continue;
          dist_[nr] = static_cast<std::uint8_t>(depth + 1);
          parent_[nr] = static_cast<std::uint16_t>(s);
          upcoming.push_back(nr);
        }
      }
      if (upcoming.empty()) break;
      ++depth;
      reachable_ += upcoming.size();
      frontier = std::move(upcoming);
    }
    diameter_ = depth;
  });
}

std::vector<int> ConfigSpace::shortest_path(const Arrangement& target) const {
  search();
  std::uint32_t r = rank(target);
  if (dist_[r] == kUnseen) throw InfeasibleError("target arrangement is unreachable");
  std::vector<int> path;
  Arrangement cur = target;
  while (dist_[r] != 0) {
    const int s = parent_[r];
    path.push_back(s);
    cur = apply(steps_[static_cast<std::size_t>(inverse_step_[static_cast<std::size_t>(s)])], cur);
    r = rank(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

int ConfigSpace::distance(const Arrangement& target) const {
  search();
  const std::uint8_t d = dist_[rank(target)];
  if (d == kUnseen) throw InfeasibleError("target arrangement is unreachable");
  return d;
}

int ConfigSpace::diameter() const {
  search();
  return diameter_;
}

std::size_t ConfigSpace::reachable_count() const {
  search();
  return reachable_;
}

std::vector<int> ConfigSpace::shortest_mask_path(std::uint32_t from_mask, std::uint32_t to_mask) const {
  const int n = cells();
  if (std::popcount(from_mask) != std::popcount(to_mask)) {
    throw InfeasibleError("masks hold different robot counts");
  }
  const std::uint32_t states = 1u << n;
  std::vector<int> parent(states, -2);
  std::vector<std::uint32_t> prev(states, 0);
  std::deque<std::uint32_t> queue{from_mask};
  parent[from_mask] = -1;
  while (!queue.empty() && parent[to_mask] == -2) {
    const std::uint32_t m = queue.front();
    queue.pop_front();
    for (std::size_t s = 0; s < steps_.size(); ++s) {
      std::uint32_t next = 0;
      for (int u = 0; u < n; ++u) {
        if (m & (1u << u)) next |= 1u << steps_[s][u];
      }
      if (parent[next] != -2) continue;
      parent[next] = static_cast<int>(s);
      prev[next] = m;
      queue.push_back(next);
    }
  }
  if (parent[to_mask] == -2) throw InfeasibleError("target mask is unreachable");
  std::vector<int> path;
  for (std::uint32_t m = to_mask; parent[m] != -1; m = prev[m]) path.push_back(parent[m]);
  std::reverse(path.begin(), path.end());
  return path;
}

const ConfigSpace& config_space(int rows, int cols) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<ConfigSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{rows, cols}];
  if (!slot) slot = std::make_unique<ConfigSpace>(rows, cols);
  return *slot;
}

Plan realize(const ConfigSpace& space, const std::vector<int>& path, const GridGraph& grid,
             const Rect& region, std::vector<RobotId>& occupancy) {
  Plan plan;
  plan.steps.reserve(path.size());
  const int n = space.cells();
  std::vector<RobotId> local(static_cast<std::size_t>(n));
  for (int s : path) {
    const LocalPermutation& perm = space.steps()[static_cast<std::size_t>(s)];
    Step step;
    for (int u = 0; u < n; ++u) {
      local[u] = occupancy[static_cast<std::size_t>(global_vertex(grid, region, u))];
    }
    for (int u = 0; u < n; ++u) {
      if (perm[u] == u) continue;
      const VertexId from = global_vertex(grid, region, u);
      const VertexId to = global_vertex(grid, region, perm[u]);
      step.moves.push_back(Move{local[u], from, to});
      occupancy[static_cast<std::size_t>(to)] = local[u];
    }
    std::sort(step.moves.begin(), step.moves.end(),
              [](const Move& a, const Move& b) { return a.robot < b.robot; });
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

Plan optimal_region_plan(const GridGraph& grid, const Rect& region, std::vector<RobotId>& occupancy,
                         const Configuration& goal) {
  const ConfigSpace& space = config_space(region.rows, region.cols);
  const int n = region.size();
  Arrangement target(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const RobotId r = occupancy[static_cast<std::size_t>(global_vertex(grid, region, u))];
    const Cell gc = grid.cell(goal[r]);
    if (!region.contains(gc)) throw InfeasibleError("robot goal lies outside the region");
    target[static_cast<std::size_t>(local_index(region, gc))] = static_cast<std::int8_t>(u);
  }
  return realize(space, space.shortest_path(target), grid, region, occupancy);
}

OptimalResult optimal_makespan(const Instance& instance) {
  const GridGraph& grid = instance.grid;
  if (grid.vertex_count() > ConfigSpace::kMaxSearchCells) {
    throw SizeError("exact search supports grids of at most " +
                    std::to_string(ConfigSpace::kMaxSearchCells) + " vertices");
  }
  std::vector<RobotId> occ = instance.start.occupancy();
  OptimalResult result;
  result.plan = optimal_region_plan(grid, grid.bounds(), occ, instance.goal);
  result.makespan = result.plan.makespan();
  return result;
}

std::size_t makespan_lower_bound(const Instance& instance) {
  std::size_t best = 0;
  for (std::size_t r = 0; r < instance.start.size(); ++r) {
    best = std::max<std::size_t>(
        best, static_cast<std::size_t>(instance.grid.manhattan(instance.start.placement[r],
                                                               instance.goal.placement[r])));
  }
  return best;
}

std::size_t distance_lower_bound(const Instance& instance) {
  std::size_t total = 0;
  for (std::size_t r = 0; r < instance.start.size(); ++r) {
    total += static_cast<std::size_t>(
        instance.grid.manhattan(instance.start.placement[r], instance.goal.placement[r]));
  }
  return total;
}

}  // namespace sag::oracle
