#include "sag/grid.hpp"

#include <cstdlib>
#include <numeric>

namespace sag {

GridGraph::GridGraph(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw SizeError("grid dimensions must be positive");
  }
  if (m_long() < 3 || m_short() < 2) {
    throw SizeError("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " is too small: need long side >= 3 and short side >= 2");
  }
}

bool GridGraph::adjacent(VertexId a, VertexId b) const {
  if (!valid(a) || !valid(b)) return false;
  return manhattan(a, b) == 1;
}

std::vector<VertexId> GridGraph::neighbors(VertexId v) const {
  std::vector<VertexId> out;
  const Cell c = cell(v);
  if (c.row > 0) out.push_back(vertex(c.row - 1, c.col));
  if (c.col > 0) out.push_back(vertex(c.row, c.col - 1));
  if (c.col + 1 < cols_) out.push_back(vertex(c.row, c.col + 1));
  if (c.row + 1 < rows_) out.push_back(vertex(c.row + 1, c.col));
  return out;
}

int GridGraph::manhattan(VertexId a, VertexId b) const {
  const Cell ca = cell(a);
  const Cell cb = cell(b);
  return std::abs(ca.row - cb.row) + std::abs(ca.col - cb.col);
}

std::vector<RobotId> Configuration::occupancy() const {
  std::vector<RobotId> occ(placement.size(), -1);
  for (std::size_t r = 0; r < placement.size(); ++r) {
    occ[static_cast<std::size_t>(placement[r])] = static_cast<RobotId>(r);
  }
  return occ;
}

Configuration Configuration::identity(int n) {
  Configuration c;
  c.placement.resize(static_cast<std::size_t>(n));
  std::iota(c.placement.begin(), c.placement.end(), 0);
  return c;
}

void require_bijection(const std::vector<VertexId>& placement, int n, const std::string& what) {
  if (static_cast<int>(placement.size()) != n) {
    throw BijectionError(what + ": expected " + std::to_string(n) + " entries, got " +
                         std::to_string(placement.size()));
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (std::size_t r = 0; r < placement.size(); ++r) {
    const VertexId v = placement[r];
    if (v < 0 || v >= n) {
      throw BijectionError(what + ": robot " + std::to_string(r) + " placed on invalid vertex " +
                           std::to_string(v));
    }
    if (seen[static_cast<std::size_t>(v)]) {
      throw BijectionError(what + ": vertex " + std::to_string(v) + " occupied twice");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Instance make_instance(int rows, int cols, std::vector<VertexId> start, std::vector<VertexId> goal) {
  GridGraph grid(rows, cols);
  require_bijection(start, grid.vertex_count(), "start");
  require_bijection(goal, grid.vertex_count(), "goal");
  return Instance{grid, Configuration{std::move(start)}, Configuration{std::move(goal)}};
}

}  // namespace sag
