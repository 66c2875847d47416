#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sag {

using VertexId = std::int32_t;
using RobotId = std::int32_t;

class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BijectionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Axis { kRows, kCols };

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Axis-aligned rectangle of cells inside a grid. Used for the sub-grids
// produced by recursive splitting; vertex ids stay global.
struct Rect {
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;

  int size() const { return rows * cols; }
  int m_long() const { return rows >= cols ? rows : cols; }
  int m_short() const { return rows >= cols ? cols : rows; }
  bool contains(Cell c) const {
    return c.row >= row0 && c.row < row0 + rows && c.col >= col0 && c.col < col0 + cols;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Rectangular grid graph with 4-neighbour adjacency. Vertex ids are
/// row-major and 0-based. Construction enforces m_long >= 3 and m_short >= 2.
class GridGraph {
 public:
  GridGraph(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int m_long() const { return rows_ >= cols_ ? rows_ : cols_; }
  int m_short() const { return rows_ >= cols_ ? cols_ : rows_; }
  // Rows when rows >= cols (ties split across rows).
  Axis long_axis() const { return rows_ >= cols_ ? Axis::kRows : Axis::kCols; }

  int vertex_count() const { return rows_ * cols_; }
  int edge_count() const { return rows_ * (cols_ - 1) + cols_ * (rows_ - 1); }
  Rect bounds() const { return Rect{0, 0, rows_, cols_}; }

  VertexId vertex(int row, int col) const { return row * cols_ + col; }
  VertexId vertex(Cell c) const { return vertex(c.row, c.col); }
  Cell cell(VertexId v) const { return Cell{v / cols_, v % cols_}; }
  bool valid(VertexId v) const { return v >= 0 && v < vertex_count(); }

  bool adjacent(VertexId a, VertexId b) const;
  std::vector<VertexId> neighbors(VertexId v) const;
  int manhattan(VertexId a, VertexId b) const;

  friend bool operator==(const GridGraph&, const GridGraph&) = default;

 private:
  int rows_;
  int cols_;
};

/// Robot id -> vertex id. Under full occupancy this is a bijection.
struct Configuration {
  std::vector<VertexId> placement;

  std::size_t size() const { return placement.size(); }
  VertexId operator[](RobotId r) const { return placement[static_cast<std::size_t>(r)]; }
  // vertex -> robot; assumes a bijection onto 0..n-1.
  std::vector<RobotId> occupancy() const;
  static Configuration identity(int n);
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Throws BijectionError unless `placement` is a permutation of 0..n-1.
void require_bijection(const std::vector<VertexId>& placement, int n, const std::string& what);

struct Instance {
  GridGraph grid;
  Configuration start;
  Configuration goal;
};

Instance make_instance(int rows, int cols, std::vector<VertexId> start, std::vector<VertexId> goal);

}  // namespace sag
