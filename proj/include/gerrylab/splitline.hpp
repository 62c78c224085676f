#pragma once

// Shortest-splitline districting on a raster.
//
// A region that must hold k districts is cut by a straight line into two
// parts destined for ceil(k/2) and floor(k/2) districts, then each part is
// cut recursively. Candidate lines come from `angle_steps` orientations and
// every offset that changes which cell centers fall on each side. The cut
// whose voter split is closest to the k1:k2 quota wins; ties go to the
// shorter in-region cut, then the more vertical line, then the smaller
// offset. Only voter totals per cell are used, never party labels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"

namespace gerrylab {

struct SplitlineConfig {
  int angle_steps = 180;
  // A split within `population_tolerance` voters plus `balance_slack` of one
  // ideal district population (region voters / k, rounded down) of the best
  // achievable split counts as equally balanced and competes on cut length.
  std::int64_t population_tolerance = 0;
  double balance_slack = 0.03;

  void validate() const {
    if (angle_steps < 2) throw DomainError("angle_steps must be at least 2");
    if (population_tolerance < 0) throw DomainError("population_tolerance must be >= 0");
    if (!(balance_slack >= 0.0 && balance_slack < 1.0)) {
      throw DomainError("balance_slack must lie in [0,1)");
    }
  }

  std::int64_t tolerance_for(std::int64_t region_pop, int k) const {
    return population_tolerance +
           static_cast<std::int64_t>(std::floor(balance_slack * static_cast<double>(region_pop) / k));
  }
};

/// The line {p : cos(angle)*p.x + sin(angle)*p.y == offset}.
struct Cut {
  double angle = 0;
  double offset = 0;
};

struct CutSides {
  std::vector<std::size_t> side1;  // center projection <= offset, including on-line
  std::vector<std::size_t> side2;
};

namespace detail {

inline constexpr double kOnLine = 1e-12;
inline constexpr double kSameProjection = 1e-9;
inline constexpr double kSameLength = 1e-9;
inline constexpr double kEdgeTolerance = 1e-12;

inline std::pair<double, double> unit_normal(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  return {c, s};
}

inline std::pair<double, double> cell_center(std::size_t cell, int g) {
  const auto row = static_cast<double>(cell / g);
  const auto col = static_cast<double>(cell % g);
  return {(col + 0.5) / g, (row + 0.5) / g};
}

// Length of the line n.p == offset inside [x0,x1] x [y0,y1]. A line lying on
// a cell edge belongs to the cell on its high side only, so a cut along a
// shared edge is counted once.
inline double chord_in_box(double nx, double ny, double offset, double x0, double y0,
                           double x1, double y1) {
  // p(s) = offset*n + s*d with d = (-ny, nx)
  const double px = offset * nx, py = offset * ny;
  const double dx = -ny, dy = nx;
  double lo = -1e300, hi = 1e300;
  auto clip = [&](double p, double d, double a, double b) {
    if (std::abs(d) < 1e-15) return p >= a - kEdgeTolerance && p < b - kEdgeTolerance;
    double s0 = (a - p) / d, s1 = (b - p) / d;
    if (s0 > s1) std::swap(s0, s1);
    lo = std::max(lo, s0);
    hi = std::min(hi, s1);
    return true;
  };
  if (!clip(px, dx, x0, x1) || !clip(py, dy, y0, y1)) return 0.0;
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace detail

inline CutSides rasterize_cut(const Cut& cut, std::span<const std::size_t> region, int g) {
  const auto [nx, ny] = detail::unit_normal(cut.angle);
  CutSides out;
  for (const std::size_t c : region) {
    const auto [x, y] = detail::cell_center(c, g);
    const double t = nx * x + ny * y;
    if (t <= cut.offset + detail::kOnLine) {
      out.side1.push_back(c);
    } else {
      out.side2.push_back(c);
    }
  }
  return out;
}

/// Total length of the cut line inside the region's cells.
inline double cut_length(const Cut& cut, std::span<const std::size_t> region, int g) {
  const auto [nx, ny] = detail::unit_normal(cut.angle);
  double len = 0;
  for (const std::size_t c : region) {
    const double x0 = static_cast<double>(c % g) / g;
    const double y0 = static_cast<double>(c / g) / g;
    len += detail::chord_in_box(nx, ny, cut.offset, x0, y0, x0 + 1.0 / g, y0 + 1.0 / g);
  }
  return len;
}

struct SplitChoice {
  Cut cut;
  int angle_index = 0;
  std::int64_t deviation = 0;  // |pop(first)*k - pop(region)*k_first|
  double length = 0;
  bool side1_first = true;  // side1 receives k_first districts
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Best straight cut dividing `region` between k_first and k_second districts.
/// `pop` is indexed by cell. Returns nullopt when no candidate leaves each
/// side with at least as many populated cells as districts.
inline std::optional<SplitChoice> best_split(std::span<const std::size_t> region,
                                             std::span<const std::int64_t> pop, int g,
                                             int k_first, int k_second,
                                             const SplitlineConfig& cfg) {
  cfg.validate();
  const std::int64_t k = k_first + k_second;
  std::int64_t region_pop = 0;
  for (const std::size_t c : region) region_pop += pop[c];
  const std::int64_t tolerance = cfg.tolerance_for(region_pop, static_cast<int>(k));

  struct Candidate {
    int angle_index;
    double offset;
    bool side1_first;
    std::int64_t deviation;
  };
  std::vector<Candidate> candidates;
  std::int64_t best_dev = -1;

  std::vector<std::pair<double, std::size_t>> order(region.size());
  for (int j = 0; j < cfg.angle_steps; ++j) {
    const double angle = std::numbers::pi * j / cfg.angle_steps;
    const auto [nx, ny] = detail::unit_normal(angle);
    for (std::size_t i = 0; i < region.size(); ++i) {
      const auto [x, y] = detail::cell_center(region[i], g);
      order[i] = {nx * x + ny * y, region[i]};
    }
    std::sort(order.begin(), order.end());

    std::int64_t pop1 = 0, populated1 = 0, populated_total = 0;
    for (const auto& [t, c] : order) populated_total += pop[c] > 0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      pop1 += pop[order[i].second];
      populated1 += pop[order[i].second] > 0;
      if (order[i + 1].first - order[i].first <= detail::kSameProjection) continue;
      const double offset = 0.5 * (order[i].first + order[i + 1].first);
      const std::int64_t populated2 = populated_total - populated1;
      for (const bool side1_first : {true, false}) {
        if (!side1_first && k_first == k_second) break;
        const int k1 = side1_first ? k_first : k_second;
        const int k2 = side1_first ? k_second : k_first;
        if (populated1 < k1 || populated2 < k2) continue;
        const std::int64_t dev = std::abs(pop1 * k - region_pop * k1);
        if (best_dev >= 0 && dev > best_dev + tolerance * k) continue;
        if (best_dev < 0 || dev < best_dev) best_dev = dev;
        candidates.push_back({j, offset, side1_first, dev});
      }
    }
  }
  if (best_dev < 0) return std::nullopt;

  const std::int64_t limit = best_dev + tolerance * k;
  std::optional<SplitChoice> best;
  for (const auto& cand : candidates) {
    if (cand.deviation > limit) continue;
    SplitChoice s;
    s.cut = {std::numbers::pi * cand.angle_index / cfg.angle_steps, cand.offset};
    s.angle_index = cand.angle_index;
    s.deviation = cand.deviation;
    s.side1_first = cand.side1_first;
    s.length = cut_length(s.cut, region, g);
    if (best) {
      // deviation (tolerance 0 only), then length, then verticality, then offset
      const bool strict = tolerance == 0;
      if (strict && s.deviation != best->deviation) {
        if (s.deviation > best->deviation) continue;
      } else if (std::abs(s.length - best->length) > detail::kSameLength) {
        if (s.length > best->length) continue;
      } else {
        const double v_new = std::abs(detail::unit_normal(s.cut.angle).first);
        const double v_old = std::abs(detail::unit_normal(best->cut.angle).first);
        const auto key_new = std::make_tuple(-v_new, s.cut.offset, s.angle_index, !s.side1_first);
        const auto key_old =
            std::make_tuple(-v_old, best->cut.offset, best->angle_index, !best->side1_first);
        if (!(key_new < key_old)) continue;
      }
    }
    best = std::move(s);
  }
  auto sides = rasterize_cut(best->cut, region, g);
  if (best->side1_first) {
    best->first = std::move(sides.side1);
    best->second = std::move(sides.side2);
  } else {
    best->first = std::move(sides.side2);
    best->second = std::move(sides.side1);
  }
  return best;
}

namespace detail {

inline void split_region(std::vector<std::size_t> region, std::span<const std::int64_t> pop,
                         int g, int k, const SplitlineConfig& cfg, DistrictId& next_id,
                         std::vector<DistrictId>& assignment) {
  if (k == 1) {
    const DistrictId id = next_id++;
    for (const std::size_t c : region) assignment[c] = id;
    return;
  }
  const int k_first = (k + 1) / 2;
  const int k_second = k / 2;
  auto choice = best_split(region, pop, g, k_first, k_second, cfg);
  if (!choice) throw DomainError("no feasible splitline cut");
  split_region(std::move(choice->first), pop, g, k_first, cfg, next_id, assignment);
  split_region(std::move(choice->second), pop, g, k_second, cfg, next_id, assignment);
}

}  // namespace detail

inline CellPartition shortest_splitline(const CellTally& tally, int k,
                                        const SplitlineConfig& cfg = {}) {
  cfg.validate();
  if (k < 1) throw DomainError("k must be positive");
  const int g = tally.resolution;
  const std::size_t cells = CellPartition::cell_count_for(g);
  std::vector<std::int64_t> pop(cells);
  std::int64_t total = 0, populated = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    pop[c] = tally.pop(c);
    total += pop[c];
    populated += pop[c] > 0;
  }
  if (total == 0) throw DomainError("empty electorate");
  if (k > populated) throw DomainError("k exceeds the number of populated cells");

  std::vector<std::size_t> region(cells);
  for (std::size_t c = 0; c < cells; ++c) region[c] = c;
  std::vector<DistrictId> assignment(cells, 0);
  DistrictId next_id = 1;
  detail::split_region(std::move(region), pop, g, k, cfg, next_id, assignment);
  return CellPartition(g, k, std::move(assignment));
}

inline CellPartition shortest_splitline(const Electorate& e, int k, int g,
                                        const SplitlineConfig& cfg = {}) {
  return shortest_splitline(e.tally(g), k, cfg);
}

}  // namespace gerrylab
