#pragma once

// Two-party voter sets in the unit square, including the lattice electorate
// used to build impossibility witnesses.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"
#include "gerrylab/rational.hpp"

namespace gerrylab {

struct Point {
  double x = 0;
  double y = 0;
  auto operator<=>(const Point&) const = default;
};

/// Order in which the l*l slots of one square are handed to A (first a
/// slots) and then B. Slots are numbered row-major from the bottom-left.
///   RowMajor:     slot order as numbered.
///   Checkerboard: slots with even row+col first, then odd, each row-major.
///                 For odd l and a = (l^2+1)/2 this is an exact checkerboard.
enum class LatticePattern { Checkerboard, RowMajor };

inline const char* to_string(LatticePattern p) {
  return p == LatticePattern::RowMajor ? "row_major" : "checkerboard";
}

/// Lattice electorate: the square is cut into n x n squares of side 1/n, each
/// holding an l x l block of voters at ((i + 1/2)/(n l), (j + 1/2)/(n l)).
struct LatticeParams {
  std::int64_t n = 1;
  std::int64_t l = 1;
  std::int64_t a = 1;
  std::int64_t b = 0;
  LatticePattern pattern = LatticePattern::Checkerboard;

  std::int64_t side() const { return n * l; }
  bool operator==(const LatticeParams&) const = default;
};

inline void validate_lattice(const LatticeParams& p) {
  if (p.n < 1) throw DomainError("n must be positive");
  if (p.l < 1) throw DomainError("l must be positive");
  if (p.a < 0 || p.b < 0) throw DomainError("a and b must be nonnegative");
  if (p.a + p.b != p.l * p.l) throw DomainError("a+b must equal l^2");
}

/// mask[r*l + c] != 0 iff slot (row r, col c) of every square votes A.
inline std::vector<char> lattice_slot_mask(const LatticeParams& p) {
  const std::int64_t slots = p.l * p.l;
  std::vector<std::int64_t> order;
  order.reserve(static_cast<std::size_t>(slots));
  if (p.pattern == LatticePattern::RowMajor) {
    for (std::int64_t s = 0; s < slots; ++s) order.push_back(s);
  } else {
    for (const int parity : {0, 1}) {
      for (std::int64_t s = 0; s < slots; ++s) {
        if ((s / p.l + s % p.l) % 2 == parity) order.push_back(s);
      }
    }
  }
  std::vector<char> mask(static_cast<std::size_t>(slots), 0);
  for (std::int64_t i = 0; i < p.a; ++i) mask[order[i]] = 1;
  return mask;
}

/// Axis-aligned rectangle [x0, x1) x [y0, y1); an edge lying on the top or
/// right side of the unit square is closed.
struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

/// Per-cell voter counts for a g x g raster.
struct CellTally {
  int resolution = 1;
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;

  std::int64_t pop(std::size_t cell) const { return a[cell] + b[cell]; }
  bool operator==(const CellTally&) const = default;
};

// Cell-boundary snap, in units of cell width. Voters lying on a cell edge
// (up to floating-point noise) belong to the upper/right cell.
inline constexpr double kBoundarySnap = 1e-9;

inline int cell_coordinate(double v, int g) {
  const auto c = static_cast<std::int64_t>(std::floor(v * g + kBoundarySnap));
  return static_cast<int>(std::clamp<std::int64_t>(c, 0, g - 1));
}

inline std::size_t cell_of(const Point& p, int g) {
  return static_cast<std::size_t>(cell_coordinate(p.y, g)) * g + cell_coordinate(p.x, g);
}

namespace detail {

inline constexpr std::int64_t kMaxMaterializedVoters = 50'000'000;

inline bool in_unit_square(const Point& p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

inline bool in_half_open(double v, double lo, double hi) {
  return v >= lo && (v < hi || (hi >= 1.0 && v <= hi));
}

inline bool contains(const Rect& r, const Point& p) {
  return in_half_open(p.x, r.x0, r.x1) && in_half_open(p.y, r.y0, r.y1);
}

// Lattice coordinate (2i+1)/(2 n l) along one axis.
inline double lattice_coordinate(std::int64_t i, std::int64_t side) {
  return static_cast<double>(2 * i + 1) / static_cast<double>(2 * side);
}

// For each raster column j, how many lattice indices i with i mod l == r fall
// in [j/g, (j+1)/g). Exact integer arithmetic: index i lies in column j iff
// 2*side*j <= g*(2i+1) < 2*side*(j+1).
inline std::vector<std::vector<std::int64_t>> residue_histogram(std::int64_t side,
                                                                std::int64_t l, int g) {
  auto first_index = [&](std::int64_t j) {
    return std::max<std::int64_t>(0, ceil_div(2 * side * j - g, 2 * static_cast<std::int64_t>(g)));
  };
  std::vector<std::vector<std::int64_t>> hist(static_cast<std::size_t>(g),
                                              std::vector<std::int64_t>(l, 0));
  for (int j = 0; j < g; ++j) {
    const std::int64_t lo = first_index(j);
    const std::int64_t hi = std::min(side, first_index(j + 1));
    if (hi <= lo) continue;
    for (std::int64_t r = 0; r < l; ++r) {
      // count of i in [lo, hi) with i = r (mod l)
      const std::int64_t first = lo + ((r - lo % l) % l + l) % l;
      hist[j][r] = first < hi ? (hi - 1 - first) / l + 1 : 0;
    }
  }
  return hist;
}

}  // namespace detail

class Electorate {
 public:
  Electorate() = default;

  /// Explicit point lists. Throws DomainError on out-of-range coordinates or
  /// a point listed for both parties.
  Electorate(std::vector<Point> a_points, std::vector<Point> b_points)
      : a_(std::move(a_points)), b_(std::move(b_points)) {
    for (const auto* set : {&a_, &b_}) {
      for (const auto& p : *set) {
        if (!detail::in_unit_square(p) || std::isnan(p.x) || std::isnan(p.y)) {
          throw DomainError("coordinate out of range: (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");
        }
      }
    }
    std::vector<Point> sa = a_, sb = b_;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<Point> both;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                          std::back_inserter(both));
    if (!both.empty()) {
      throw DomainError("point (" + std::to_string(both.front().x) + ", " +
                        std::to_string(both.front().y) + ") is in both A and B");
    }
  }

  static Electorate lattice(const LatticeParams& params) {
    validate_lattice(params);
    Electorate e;
    e.lattice_ = params;
    return e;
  }

  const std::optional<LatticeParams>& provenance() const { return lattice_; }

  std::int64_t a_count() const {
    return lattice_ ? lattice_->a * lattice_->n * lattice_->n
                    : static_cast<std::int64_t>(a_.size());
  }
  std::int64_t b_count() const {
    return lattice_ ? lattice_->b * lattice_->n * lattice_->n
                    : static_cast<std::int64_t>(b_.size());
  }
  std::int64_t total() const { return a_count() + b_count(); }

  std::vector<Point> a_points() const { return lattice_ ? materialize(true) : a_; }
  std::vector<Point> b_points() const { return lattice_ ? materialize(false) : b_; }

  /// Same voters with party labels exchanged. Lattice provenance is dropped
  /// since the swapped electorate is no longer A-first.
  Electorate swapped() const {
    Electorate e;
    e.a_ = b_points();
    e.b_ = a_points();
    return e;
  }

  CellTally tally(int g) const {
    if (g < 1) throw DomainError("grid resolution must be positive");
    return lattice_ ? lattice_tally(*lattice_, g) : point_tally(g);
  }

  /// Point sets compare as multisets; provenance is not part of equality.
  bool same_voters(const Electorate& other) const {
    auto sorted = [](std::vector<Point> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    return sorted(a_points()) == sorted(other.a_points()) &&
           sorted(b_points()) == sorted(other.b_points());
  }

  static CellTally lattice_tally(const LatticeParams& p, int g) {
    const std::int64_t side = p.side();
    const auto hist = detail::residue_histogram(side, p.l, g);
    const auto mask = lattice_slot_mask(p);
    CellTally t;
    t.resolution = g;
    t.a.assign(CellPartition::cell_count_for(g), 0);
    t.b.assign(CellPartition::cell_count_for(g), 0);
    for (int row = 0; row < g; ++row) {
      for (int col = 0; col < g; ++col) {
        std::int64_t a = 0, total = 0;
        for (std::int64_t ry = 0; ry < p.l; ++ry) {
          const std::int64_t hy = hist[row][ry];
          if (hy == 0) continue;
          for (std::int64_t rx = 0; rx < p.l; ++rx) {
            const std::int64_t cnt = hy * hist[col][rx];
            total += cnt;
            if (mask[ry * p.l + rx]) a += cnt;
          }
        }
        const std::size_t c = static_cast<std::size_t>(row) * g + col;
        t.a[c] = a;
        t.b[c] = total - a;
      }
    }
    return t;
  }

 private:
  std::vector<Point> materialize(bool party_a) const {
    const auto& p = *lattice_;
    const std::int64_t count = party_a ? a_count() : b_count();
    if (count > detail::kMaxMaterializedVoters) {
      throw DomainError("lattice electorate too large to list explicitly");
    }
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    const std::int64_t side = p.side();
    const auto mask = lattice_slot_mask(p);
    for (std::int64_t j = 0; j < side; ++j) {
      for (std::int64_t i = 0; i < side; ++i) {
        const bool is_a = mask[(j % p.l) * p.l + i % p.l] != 0;
        if (is_a == party_a) {
          out.push_back({detail::lattice_coordinate(i, side),
                         detail::lattice_coordinate(j, side)});
        }
      }
    }
    return out;
  }

  CellTally point_tally(int g) const {
    CellTally t;
    t.resolution = g;
    t.a.assign(CellPartition::cell_count_for(g), 0);
    t.b.assign(CellPartition::cell_count_for(g), 0);
    for (const auto& p : a_) ++t.a[cell_of(p, g)];
    for (const auto& p : b_) ++t.b[cell_of(p, g)];
    return t;
  }

  std::vector<Point> a_;
  std::vector<Point> b_;
  std::optional<LatticeParams> lattice_;
};

inline Electorate generate_lattice_electorate(const LatticeParams& params) {
  return Electorate::lattice(params);
}

struct PartyCounts {
  std::int64_t a = 0;
  std::int64_t b = 0;
  bool operator==(const PartyCounts&) const = default;
};

/// Per-district (|A ∩ D_i|, |B ∩ D_i|) for ids 1..k, indexed from 0.
inline std::vector<PartyCounts> district_counts(const CellTally& t, const CellPartition& p) {
  if (t.resolution != p.resolution()) {
    throw DomainError("tally resolution does not match partition");
  }
  std::vector<PartyCounts> out(static_cast<std::size_t>(p.districts()));
  for (std::size_t c = 0; c < p.cell_count(); ++c) {
    const DistrictId id = p[c];
    if (id < 1 || id > p.districts()) continue;
    out[id - 1].a += t.a[c];
    out[id - 1].b += t.b[c];
  }
  return out;
}

inline PartyCounts count_in_district(const Electorate& e, const CellPartition& p,
                                     DistrictId i) {
  detail::require_district(p, i);
  return district_counts(e.tally(p.resolution()), p)[i - 1];
}

/// Moves every B voter inside `rect` to A.
inline Electorate repaint_region(const Electorate& e, const Rect& rect) {
  if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) {
    throw DomainError("degenerate rectangle");
  }
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > 1 || rect.y1 > 1) {
    throw DomainError("rectangle must lie inside the unit square");
  }
  std::vector<Point> a = e.a_points();
  std::vector<Point> b;
  for (const auto& p : e.b_points()) {
    if (detail::contains(rect, p)) {
      a.push_back(p);
    } else {
      b.push_back(p);
    }
  }
  return Electorate(std::move(a), std::move(b));
}

}  // namespace gerrylab
