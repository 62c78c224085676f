#pragma once

// Districts as unions of cells on a g x g raster of the unit square.
//
// Cells are indexed row-major with row 0 at the bottom: cell (row, col)
// covers [col/g, (col+1)/g) x [row/g, (row+1)/g) and has index row*g + col.
// District ids run 1..k. Area and perimeter are exact rationals.

#include <cstdint>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "gerrylab/error.hpp"
#include "gerrylab/rational.hpp"

namespace gerrylab {

using DistrictId = int;

class CellPartition {
 public:
  CellPartition() = default;

  CellPartition(int g, int k, std::vector<DistrictId> assignment)
      : g_(g), k_(k), assignment_(std::move(assignment)) {
    if (g < 1) throw DomainError("grid resolution must be positive");
    if (k < 1) throw DomainError("district count must be positive");
  }

  /// Every cell assigned to district 1.
  static CellPartition whole_square(int g = 1) {
    return CellPartition(g, 1, std::vector<DistrictId>(cell_count_for(g), 1));
  }

  static std::size_t cell_count_for(int g) {
    return static_cast<std::size_t>(g) * static_cast<std::size_t>(g);
  }

  int resolution() const { return g_; }
  int districts() const { return k_; }
  std::size_t cell_count() const { return cell_count_for(g_); }

  const std::vector<DistrictId>& assignment() const { return assignment_; }
  DistrictId operator[](std::size_t cell) const { return assignment_[cell]; }
  DistrictId at(int row, int col) const {
    return assignment_[static_cast<std::size_t>(row) * g_ + col];
  }

  void assign(std::size_t cell, DistrictId id) { assignment_[cell] = id; }

  bool operator==(const CellPartition&) const = default;

 private:
  int g_ = 1;
  int k_ = 1;
  std::vector<DistrictId> assignment_;
};

struct Violation {
  enum class Kind { SizeMismatch, IdOutOfRange, EmptyDistrict };
  Kind kind;
  std::int64_t where;  // cell index or district id
  std::string message;
};

inline std::vector<Violation> validate_partition(const CellPartition& p) {
  std::vector<Violation> out;
  const auto& cells = p.assignment();
  if (cells.size() != p.cell_count()) {
    out.push_back({Violation::Kind::SizeMismatch,
                   static_cast<std::int64_t>(cells.size()),
                   "assignment has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(p.cell_count())});
    return out;
  }
  std::vector<std::int64_t> owned(static_cast<std::size_t>(p.districts()) + 1, 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const DistrictId id = cells[c];
    if (id < 1 || id > p.districts()) {
      out.push_back({Violation::Kind::IdOutOfRange, static_cast<std::int64_t>(c),
                     "cell " + std::to_string(c) + " has district id " +
                         std::to_string(id) + " outside 1.." +
                         std::to_string(p.districts())});
    } else {
      ++owned[id];
    }
  }
  for (DistrictId id = 1; id <= p.districts(); ++id) {
    if (owned[id] == 0) {
      out.push_back({Violation::Kind::EmptyDistrict, id,
                     "empty district " + std::to_string(id)});
    }
  }
  return out;
}

/// Number of cells and boundary edges of a district. Area is cells/g^2 and
/// perimeter is boundary_edges/g, where a boundary edge separates a district
/// cell from a cell of another district or from the exterior.
struct DistrictShape {
  std::int64_t cells = 0;
  std::int64_t boundary_edges = 0;
  int resolution = 1;
  bool connected = false;

  Rational area() const {
    return Rational(cells, static_cast<std::int64_t>(resolution) * resolution);
  }
  Rational perimeter() const { return Rational(boundary_edges, resolution); }
};

namespace detail {

inline void require_district(const CellPartition& p, DistrictId i) {
  if (i < 1 || i > p.districts()) {
    throw DomainError("unknown district id " + std::to_string(i));
  }
}

// Boundary edges of the district owning `cell` that touch `cell`.
inline int exposed_edges(const CellPartition& p, int row, int col) {
  const int g = p.resolution();
  const DistrictId id = p.at(row, col);
  int edges = 0;
  edges += (row == 0 || p.at(row - 1, col) != id);
  edges += (row == g - 1 || p.at(row + 1, col) != id);
  edges += (col == 0 || p.at(row, col - 1) != id);
  edges += (col == g - 1 || p.at(row, col + 1) != id);
  return edges;
}

}  // namespace detail

/// 4-connectivity of district i. Throws for unknown ids; false when empty.
inline bool is_connected(const CellPartition& p, DistrictId i) {
  detail::require_district(p, i);
  const int g = p.resolution();
  const auto& cells = p.assignment();
  std::size_t total = 0;
  std::size_t start = cells.size();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c] == i) {
      if (total++ == 0) start = c;
    }
  }
  if (total == 0) return false;

  std::vector<char> seen(cells.size(), 0);
  std::queue<std::size_t> frontier;
  frontier.push(start);
  seen[start] = 1;
  std::size_t reached = 0;
  while (!frontier.empty()) {
    const std::size_t c = frontier.front();
    frontier.pop();
    ++reached;
    const int row = static_cast<int>(c / g);
    const int col = static_cast<int>(c % g);
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      const int r = row + dr[d];
      const int q = col + dc[d];
      if (r < 0 || r >= g || q < 0 || q >= g) continue;
      const std::size_t n = static_cast<std::size_t>(r) * g + q;
      if (!seen[n] && cells[n] == i) {
        seen[n] = 1;
        frontier.push(n);
      }
    }
  }
  return reached == total;
}

inline DistrictShape district_shape(const CellPartition& p, DistrictId i) {
  detail::require_district(p, i);
  DistrictShape s;
  s.resolution = p.resolution();
  const int g = p.resolution();
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      if (p.at(row, col) != i) continue;
      ++s.cells;
      s.boundary_edges += detail::exposed_edges(p, row, col);
    }
  }
  if (s.cells == 0) {
    throw DomainError("district " + std::to_string(i) + " is empty");
  }
  s.connected = is_connected(p, i);
  return s;
}

/// Shapes of districts 1..k in one pass; empty districts get cells == 0.
inline std::vector<DistrictShape> all_district_shapes(const CellPartition& p) {
  std::vector<DistrictShape> shapes(static_cast<std::size_t>(p.districts()));
  for (auto& s : shapes) s.resolution = p.resolution();
  const int g = p.resolution();
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      const DistrictId id = p.at(row, col);
      if (id < 1 || id > p.districts()) continue;
      auto& s = shapes[id - 1];
      ++s.cells;
      s.boundary_edges += detail::exposed_edges(p, row, col);
    }
  }
  for (DistrictId id = 1; id <= p.districts(); ++id) {
    if (shapes[id - 1].cells > 0) shapes[id - 1].connected = is_connected(p, id);
  }
  return shapes;
}

/// Polsby-Popper score 4*pi*area/perimeter^2, kept as an exact multiple of pi.
/// On a grid the maximum is pi/4, reached by square blocks.
struct PpScore {
  Rational pi_multiple;

  double value() const { return std::numbers::pi * to_double(pi_multiple); }
  bool operator==(const PpScore& o) const { return pi_multiple == o.pi_multiple; }
  bool operator<(const PpScore& o) const { return pi_multiple < o.pi_multiple; }
};

inline PpScore polsby_popper(const DistrictShape& shape) {
  // 4*pi*(cells/g^2) / (edges/g)^2 == pi * 4*cells/edges^2
  return PpScore{Rational(4 * shape.cells, shape.boundary_edges * shape.boundary_edges)};
}

}  // namespace gerrylab
