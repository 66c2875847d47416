#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "sag/primitives.hpp"

namespace sag {
namespace {

void apply_round(std::vector<RobotId>& occ, const EdgeSet& round) {
  for (const Edge& e : round) std::swap(occ[static_cast<std::size_t>(e.a)], occ[static_cast<std::size_t>(e.b)]);
}

void apply_schedule(std::vector<RobotId>& occ, const FlipSchedule& schedule) {
  for (const EdgeSet& round : schedule) apply_round(occ, round);
}

FlipSchedule concat(std::initializer_list<const FlipSchedule*> parts) {
  FlipSchedule out;
  for (const FlipSchedule* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

std::vector<char> mark(std::size_t robots, const RobotGroup& group) {
  std::vector<char> marked(robots, 0);
  for (RobotId r : group) marked[static_cast<std::size_t>(r)] = 1;
  return marked;
}

TreeGraph path_tree(const PathSegment& path) {
  TreeGraph t;
  t.vertices = path.vertices;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    t.edges.push_back(Edge::of(path.vertices[i], path.vertices[i + 1]));
  }
  return t;
}

void require_path(const GridGraph& grid, const PathSegment& path) {
  if (path.vertices.empty()) throw std::invalid_argument("empty path");
  std::unordered_set<VertexId> seen;
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    if (!grid.valid(path.vertices[i]) || !seen.insert(path.vertices[i]).second) {
      throw std::invalid_argument("path repeats or leaves the grid");
    }
    if (i > 0 && !grid.adjacent(path.vertices[i - 1], path.vertices[i])) {
      throw std::invalid_argument("path vertices are not consecutive grid neighbours");
    }
  }
}

// Index of each group member's vertex along the path; throws if off the path.
std::vector<std::size_t> positions_on(const PathSegment& path, const std::vector<RobotId>& occ,
                                      const RobotGroup& group) {
  std::unordered_map<RobotId, std::size_t> where;
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    where.emplace(occ[static_cast<std::size_t>(path.vertices[i])], i);
  }
  std::vector<std::size_t> pos;
  for (RobotId r : group) {
    auto it = where.find(r);
    if (it == where.end()) throw std::invalid_argument("robot " + std::to_string(r) + " is not on the path");
    pos.push_back(it->second);
  }
  std::sort(pos.begin(), pos.end());
  return pos;
}

}  // namespace

std::vector<VertexId> EmbeddedTree::vertices() const {
  std::vector<VertexId> out = main_path.vertices;
  for (const SideBranch& b : side_branches) out.insert(out.end(), b.path.vertices.begin(), b.path.vertices.end());
  return out;
}

std::vector<Edge> EmbeddedTree::edges() const {
  std::vector<Edge> out = path_tree(main_path).edges;
  for (const SideBranch& b : side_branches) {
    if (b.path.vertices.empty()) continue;
    out.push_back(Edge::of(b.attachment, b.path.vertices.front()));
    const auto inner = path_tree(b.path).edges;
    out.insert(out.end(), inner.begin(), inner.end());
  }
  return out;
}

int EmbeddedTree::diameter() const {
  std::unordered_map<VertexId, std::vector<VertexId>> adj;
  for (VertexId v : vertices()) adj[v];
  for (const Edge& e : edges()) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  if (adj.empty()) return 0;
  auto farthest = [&](VertexId src) {
    std::unordered_map<VertexId, int> dist{{src, 0}};
    std::deque<VertexId> q{src};
    std::pair<VertexId, int> best{src, 0};
    while (!q.empty()) {
      const VertexId v = q.front();
      q.pop_front();
      for (VertexId w : adj[v]) {
        if (dist.contains(w)) continue;
        dist[w] = dist[v] + 1;
        if (dist[w] > best.second) best = {w, dist[w]};
        q.push_back(w);
      }
    }
    return best;
  };
  return farthest(farthest(main_path.vertices.front()).first).second;
}

FlipSchedule gather(const GridGraph& grid, const TreeGraph& tree, VertexId root,
                    std::vector<RobotId>& occupancy, const std::vector<char>& marked) {
  const std::size_t n = tree.vertices.size();
  std::unordered_map<VertexId, std::size_t> local;
  local.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) local.emplace(tree.vertices[i], i);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const Edge& e : tree.edges) {
    const std::size_t a = local.at(e.a), b = local.at(e.b);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<char> seen(n, 0);
  order.push_back(local.at(root));
  seen[order[0]] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t w : adj[order[i]]) {
      if (seen[w]) continue;
      seen[w] = 1;
      children[order[i]].push_back(w);
      order.push_back(w);
    }
  }
  if (order.size() != n) throw std::invalid_argument("tree is not connected");

  auto is_marked = [&](std::size_t v) {
    return marked[static_cast<std::size_t>(occupancy[static_cast<std::size_t>(tree.vertices[v])])] != 0;
  };
  FlipSchedule schedule;
  std::vector<char> used(n, 0);
  for (;;) {
    std::fill(used.begin(), used.end(), 0);
    EdgeSet round;
    for (std::size_t v : order) {
      if (used[v] || is_marked(v)) continue;
      std::size_t best = n;
      for (std::size_t u : children[v]) {
        if (used[u] || !is_marked(u)) continue;
        if (best == n) {
          best = u;
          continue;
        }
        const Cell cu = grid.cell(tree.vertices[u]);
        const Cell cb = grid.cell(tree.vertices[best]);
        const RobotId ru = occupancy[static_cast<std::size_t>(tree.vertices[u])];
        const RobotId rb = occupancy[static_cast<std::size_t>(tree.vertices[best])];
        if (std::tie(cu.col, ru) < std::tie(cb.col, rb)) best = u;
      }
      if (best == n) continue;
      used[v] = used[best] = 1;
      const VertexId a = tree.vertices[v], b = tree.vertices[best];
      std::swap(occupancy[static_cast<std::size_t>(a)], occupancy[static_cast<std::size_t>(b)]);
      round.push_back(Edge::of(a, b));
    }
    if (round.empty()) break;
    std::sort(round.begin(), round.end());
    schedule.push_back(std::move(round));
  }
  return schedule;
}

FlipSchedule herd_schedule(const GridGraph& grid, const PathSegment& path, std::vector<RobotId>& occupancy,
                           const RobotGroup& group, PathEnd end) {
  require_path(grid, path);
  positions_on(path, occupancy, group);
  if (static_cast<int>(group.size()) > path.length() / 2) {
    throw GroupTooLarge("group of " + std::to_string(group.size()) + " exceeds half the path length " +
                        std::to_string(path.length()));
  }
  const VertexId root = end == PathEnd::kFront ? path.vertices.front() : path.vertices.back();
  return gather(grid, path_tree(path), root, occupancy, mark(occupancy.size(), group));
}

FlipSchedule line_shift_schedule(const GridGraph& grid, const PathSegment& path, std::vector<RobotId>& occupancy,
                                 const RobotGroup& group1, const RobotGroup& group2) {
  require_path(grid, path);
  if (group1.size() != group2.size()) throw SizeMismatch("groups differ in size");
  if (group1.empty()) return {};
  const auto p1 = positions_on(path, occupancy, group1);
  const auto p2 = positions_on(path, occupancy, group2);
  if (!(p1.back() < p2.front() || p2.back() < p1.front())) {
    throw OverlapError("groups do not occupy disjoint segments of the path");
  }
  const TreeGraph tree = path_tree(path);
  const auto m1 = mark(occupancy.size(), group1);
  const auto m2 = mark(occupancy.size(), group2);
  const VertexId front = path.vertices.front(), back = path.vertices.back();

  // Goal: the groups trade vertex sets, keeping their internal order.
  std::vector<RobotId> goal = occupancy;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    goal[static_cast<std::size_t>(path.vertices[p2[i]])] = occupancy[static_cast<std::size_t>(path.vertices[p1[i]])];
    goal[static_cast<std::size_t>(path.vertices[p1[i]])] = occupancy[static_cast<std::size_t>(path.vertices[p2[i]])];
  }
  const std::vector<RobotId> final_occ = goal;

  // Herd group1 to the back and group2 to the front, from the start and
  // from the goal; both meet in the same intermediate configuration.
  std::vector<RobotId> mid = occupancy;
  const FlipSchedule f1 = gather(grid, tree, back, mid, m1);
  const FlipSchedule f2 = gather(grid, tree, front, mid, m2);
  const FlipSchedule g1 = gather(grid, tree, back, goal, m1);
  const FlipSchedule g2 = gather(grid, tree, front, goal, m2);
  if (mid != goal) throw std::logic_error("line_shift: herded configurations disagree");
  const FlipSchedule back_half = reversed(concat({&g1, &g2}));
  occupancy = final_occ;
  return concat({&f1, &f2, &back_half});
}

FlipSchedule tree_shift_schedule(const GridGraph& grid, const EmbeddedTree& tree, std::vector<RobotId>& occupancy,
                                 const PathSegment& branch, const RobotGroup& group_in,
                                 const RobotGroup& group_out) {
  if (group_in.size() != group_out.size()) throw SizeMismatch("groups differ in size");
  TreeGraph whole{tree.vertices(), tree.edges()};
  std::unordered_map<VertexId, std::vector<VertexId>> adj;
  for (VertexId v : whole.vertices) {
    if (adj.contains(v)) throw BranchError("tree repeats vertex " + std::to_string(v));
    adj[v];
  }
  for (const Edge& e : whole.edges) {
    if (!grid.adjacent(e.a, e.b)) throw BranchError("tree edge is not a grid edge");
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  if (whole.edges.size() + 1 != whole.vertices.size()) throw BranchError("structure is not a tree");

  require_path(grid, branch);
  std::unordered_set<VertexId> in_branch(branch.vertices.begin(), branch.vertices.end());
  for (std::size_t i = 0; i < branch.vertices.size(); ++i) {
    const VertexId v = branch.vertices[i];
    if (!adj.contains(v)) throw BranchError("branch leaves the tree");
    if (adj[v].size() > 2) throw BranchError("branch vertex " + std::to_string(v) + " has tree degree above two");
  }
  // Orient the branch so that front() touches the rest of the tree.
  PathSegment p = branch;
  auto outside_neighbours = [&](VertexId v) {
    std::vector<VertexId> out;
    for (VertexId w : adj[v]) {
      if (!in_branch.contains(w)) out.push_back(w);
    }
    return out;
  };
  if (!outside_neighbours(p.vertices.back()).empty()) std::reverse(p.vertices.begin(), p.vertices.end());
  if (!outside_neighbours(p.vertices.back()).empty()) throw BranchError("branch has no free end");
  for (std::size_t i = 1; i < p.vertices.size(); ++i) {
    if (!outside_neighbours(p.vertices[i]).empty()) throw BranchError("branch has an interior attachment");
  }
  const auto junction_links = outside_neighbours(p.vertices.front());
  if (junction_links.size() > 1) throw BranchError("branch attaches to the tree twice");

  const std::size_t k = group_in.size();
  if (k == 0) return {};
  if (junction_links.empty()) throw SizeMismatch("no robots outside the branch to exchange with");
  const VertexId junction = junction_links.front();

  positions_on(p, occupancy, group_in);
  TreeGraph rest;
  for (VertexId v : whole.vertices) {
    if (!in_branch.contains(v)) rest.vertices.push_back(v);
  }
  for (const Edge& e : whole.edges) {
    if (!in_branch.contains(e.a) && !in_branch.contains(e.b)) rest.edges.push_back(e);
  }
  {
    std::unordered_set<RobotId> on_rest;
    for (VertexId v : rest.vertices) on_rest.insert(occupancy[static_cast<std::size_t>(v)]);
    for (RobotId r : group_out) {
      if (!on_rest.contains(r)) throw std::invalid_argument("robot " + std::to_string(r) + " is not on the tree outside the branch");
    }
  }

  const auto out_marks = mark(occupancy.size(), group_out);
  const auto in_marks = mark(occupancy.size(), group_in);
  std::vector<RobotId> occ = occupancy;

  // Stage: pack the outgoing group around the junction and the incoming
  // group at the branch mouth, in parallel.
  const FlipSchedule stage_out = gather(grid, rest, junction, occ, out_marks);
  const FlipSchedule stage_in = gather(grid, path_tree(p), p.vertices.front(), occ, in_marks);
  const FlipSchedule stage = merge_parallel({stage_out, stage_in});

  // Exchange: the packed groups form a subtree; draining the outgoing group
  // to the far end of the mouth segment fills its old spots with the
  // incoming group in reverse priority order.
  TreeGraph packed;
  std::unordered_set<VertexId> packed_set;
  for (VertexId v : rest.vertices) {
    if (out_marks[static_cast<std::size_t>(occ[static_cast<std::size_t>(v)])]) packed_set.insert(v);
  }
  for (std::size_t i = 0; i < k; ++i) packed_set.insert(p.vertices[i]);
  for (VertexId v : whole.vertices) {
    if (packed_set.contains(v)) packed.vertices.push_back(v);
  }
  for (const Edge& e : whole.edges) {
    if (packed_set.contains(e.a) && packed_set.contains(e.b)) packed.edges.push_back(e);
  }
  const FlipSchedule exchange = gather(grid, packed, p.vertices[k - 1], occ, out_marks);
  const FlipSchedule unstage = reversed(stage);
  apply_schedule(occ, unstage);
  occupancy = std::move(occ);
  return concat({&stage, &exchange, &unstage});
}

Plan herd(const GridGraph& grid, const PathSegment& path, const Configuration& config, const RobotGroup& group,
          PathEnd end) {
  std::vector<RobotId> occ = config.occupancy();
  const FlipSchedule s = herd_schedule(grid, path, occ, group, end);
  occ = config.occupancy();
  return compile_flips(grid, grid.bounds(), s, occ, FlipCompiler::kAdaptive);
}

Plan line_shift(const GridGraph& grid, const PathSegment& path, const Configuration& config,
                const RobotGroup& group1, const RobotGroup& group2) {
  std::vector<RobotId> occ = config.occupancy();
  const FlipSchedule s = line_shift_schedule(grid, path, occ, group1, group2);
  occ = config.occupancy();
  return compile_flips(grid, grid.bounds(), s, occ, FlipCompiler::kAdaptive);
}

Plan tree_shift(const GridGraph& grid, const EmbeddedTree& tree, const Configuration& config,
                const PathSegment& branch, const RobotGroup& group_in, const RobotGroup& group_out) {
  std::vector<RobotId> occ = config.occupancy();
  const FlipSchedule s = tree_shift_schedule(grid, tree, occ, branch, group_in, group_out);
  occ = config.occupancy();
  return compile_flips(grid, grid.bounds(), s, occ, FlipCompiler::kAdaptive);
}

}  // namespace sag
