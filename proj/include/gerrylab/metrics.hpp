#pragma once

// Wasted votes, efficiency gap, population balance and the three districting
// desiderata (one person one vote, Polsby-Popper compactness, partisan
// efficiency).
//
// Sign convention: EG = (sum of A's wasted votes - sum of B's) / |A u B|, so a
// negative gap favors A.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"
#include "gerrylab/rational.hpp"

namespace gerrylab {

enum class Winner { A, B, Tie };

inline const char* to_string(Winner w) {
  switch (w) {
    case Winner::A: return "A";
    case Winner::B: return "B";
    case Winner::Tie: return "tie";
  }
  return "?";
}

struct WastedVotes {
  std::int64_t a = 0;
  std::int64_t b = 0;
  bool operator==(const WastedVotes&) const = default;
};

/// The winner wastes every vote beyond ceil(pop/2); the loser wastes all of
/// its votes. In a tie neither side won, so both waste everything.
constexpr WastedVotes wasted_votes(std::int64_t a_count, std::int64_t b_count) {
  const std::int64_t needed = ceil_div(a_count + b_count, 2);
  if (a_count > b_count) return {a_count - needed, b_count};
  if (b_count > a_count) return {a_count, b_count - needed};
  return {a_count, b_count};
}

constexpr Winner winner_of(std::int64_t a_count, std::int64_t b_count) {
  if (a_count > b_count) return Winner::A;
  if (b_count > a_count) return Winner::B;
  return Winner::Tie;
}

struct DistrictTally {
  DistrictId id = 0;
  std::int64_t pop = 0;
  std::int64_t a_count = 0;
  std::int64_t b_count = 0;
  Winner winner = Winner::Tie;
  std::int64_t wasted_a = 0;
  std::int64_t wasted_b = 0;
};

inline std::vector<DistrictTally> tally_districts(std::span<const PartyCounts> counts) {
  std::vector<DistrictTally> out;
  out.reserve(counts.size());
  DistrictId id = 1;
  for (const auto& c : counts) {
    const auto w = wasted_votes(c.a, c.b);
    out.push_back({id++, c.a + c.b, c.a, c.b, winner_of(c.a, c.b), w.a, w.b});
  }
  return out;
}

inline Rational efficiency_gap(std::span<const PartyCounts> counts) {
  std::int64_t total = 0;
  std::int64_t net = 0;
  for (const auto& c : counts) {
    const auto w = wasted_votes(c.a, c.b);
    total += c.a + c.b;
    net += w.a - w.b;
  }
  if (total == 0) throw DomainError("efficiency gap of an empty electorate");
  return Rational(net, total);
}

inline Rational efficiency_gap(const Electorate& e, const CellPartition& p) {
  const auto counts = district_counts(e.tally(p.resolution()), p);
  return efficiency_gap(counts);
}

/// Smallest delta with (1-delta)*floor(P/k) <= pop_i <= (1+delta)*ceil(P/k).
inline Rational population_balance_delta(std::span<const std::int64_t> pops,
                                         std::int64_t total) {
  const auto k = static_cast<std::int64_t>(pops.size());
  if (k < 1) throw DomainError("no districts");
  const std::int64_t lo = total / k;
  const std::int64_t hi = ceil_div(total, k);
  if (lo == 0) throw DomainError("fewer voters than districts");
  Rational delta = 0;
  for (const std::int64_t pop : pops) {
    if (pop < lo) delta = std::max(delta, Rational(lo - pop, lo));
    if (pop > hi) delta = std::max(delta, Rational(pop - hi, hi));
  }
  return delta;
}

inline Rational population_balance_delta(const Electorate& e, const CellPartition& p) {
  std::vector<std::int64_t> pops;
  for (const auto& c : district_counts(e.tally(p.resolution()), p)) pops.push_back(c.a + c.b);
  return population_balance_delta(pops, e.total());
}

struct Seats {
  int a = 0;
  int b = 0;
  int ties = 0;
  bool operator==(const Seats&) const = default;
};

inline Seats seats(std::span<const PartyCounts> counts) {
  Seats s;
  for (const auto& c : counts) {
    switch (winner_of(c.a, c.b)) {
      case Winner::A: ++s.a; break;
      case Winner::B: ++s.b; break;
      case Winner::Tie: ++s.ties; break;
    }
  }
  return s;
}

inline Seats seats(const Electorate& e, const CellPartition& p) {
  const auto counts = district_counts(e.tally(p.resolution()), p);
  return seats(counts);
}

/// 2*v_A - s_A - 1/2: the efficiency gap of an equal-population plan with
/// vote share v_A and seat share s_A.
inline Rational simplified_eg(const Rational& vote_share_a, const Rational& seat_share_a) {
  return 2 * vote_share_a - seat_share_a - Rational(1, 2);
}

/// Thresholds a court could impose: balance delta, compactness constant C
/// (|perimeter|^2 <= C*area, equivalently PP >= 4*pi/C) and partisan
/// efficiency (|EG| < 1/2 - alpha whenever ||A|-|B|| < beta*|A u B|).
struct DesiderataParams {
  double delta = 0.10;
  double C = 20.0 * std::numbers::pi;  // PP floor 0.2
  double alpha = 0.42;                 // |EG| < 8%
  double beta = 0.58;

  void validate() const {
    if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0,1)");
    if (!(C > 0.0)) throw DomainError("C must be positive");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
  }

  static double c_for_pp_floor(double pp) { return 4.0 * std::numbers::pi / pp; }
  double pp_floor() const { return 4.0 * std::numbers::pi / C; }
};

struct DesideratumResult {
  bool pass = true;
  std::optional<DistrictId> district;  // first violating district, if any
  std::string detail;
};

struct DesiderataCheck {
  DesiderataParams params;
  DesideratumResult balance;      // one person, one vote
  DesideratumResult compactness;  // Polsby-Popper
  DesideratumResult efficiency;   // partisan efficiency
  bool efficiency_clause_active = false;

  bool all_pass() const { return balance.pass && compactness.pass && efficiency.pass; }
};

/// Plan-level summary; computed from a tally so the same report comes out of
/// the CLI, the service and the optimizer.
struct PlanReport {
  int resolution = 1;
  int k = 1;
  std::int64_t total_a = 0;
  std::int64_t total_b = 0;
  std::vector<DistrictTally> tallies;
  std::vector<DistrictShape> shapes;
  std::vector<std::optional<PpScore>> pp_scores;  // nullopt for empty districts
  std::vector<DistrictId> empty_districts;
  Rational eg;
  Rational delta;
  Rational imbalance;  // ||A|-|B|| / |A u B|
  std::optional<PpScore> min_pp;
  Seats seat_counts;
  DesiderataCheck desiderata;
};

namespace detail {

inline DesiderataCheck check_desiderata(const PlanReport& r, const DesiderataParams& params) {
  params.validate();
  DesiderataCheck out;
  out.params = params;

  if (to_long_double(r.delta) > static_cast<long double>(params.delta)) {
    std::optional<DistrictId> worst;
    const std::int64_t total = r.total_a + r.total_b;
    const std::int64_t lo = total / r.k;
    const std::int64_t hi = ceil_div(total, r.k);
    for (const auto& t : r.tallies) {
      const long double d = t.pop < lo ? 1.0L - static_cast<long double>(t.pop) / lo
                            : t.pop > hi ? static_cast<long double>(t.pop) / hi - 1.0L
                                         : 0.0L;
      if (d > params.delta) {
        worst = t.id;
        break;
      }
    }
    out.balance = {false, worst,
                   "delta " + to_string(r.delta) + " exceeds " + std::to_string(params.delta)};
  } else {
    out.balance = {true, std::nullopt, "delta " + to_string(r.delta)};
  }

  out.compactness = {true, std::nullopt, "perimeter^2 <= C*area for all districts"};
  for (std::size_t i = 0; i < r.shapes.size(); ++i) {
    const auto& s = r.shapes[i];
    const DistrictId id = static_cast<DistrictId>(i) + 1;
    if (s.cells == 0) {
      out.compactness = {false, id, "district " + std::to_string(id) + " is empty"};
      break;
    }
    const long double lhs = static_cast<long double>(s.boundary_edges) * s.boundary_edges;
    const long double rhs = static_cast<long double>(params.C) * s.cells;
    if (lhs > rhs) {
      out.compactness = {false, id,
                         "district " + std::to_string(id) + " has PP " +
                             std::to_string(polsby_popper(s).value()) + " below " +
                             std::to_string(params.pp_floor())};
      break;
    }
  }

  const long double abs_eg = to_long_double(abs(r.eg));
  out.efficiency_clause_active = to_long_double(r.imbalance) < params.beta;
  const long double limit = 0.5L - params.alpha;
  if (!out.efficiency_clause_active) {
    out.efficiency = {true, std::nullopt, "vote imbalance >= beta, clause inactive"};
  } else if (abs_eg < limit) {
    out.efficiency = {true, std::nullopt, "|EG| below 1/2 - alpha"};
  } else {
    out.efficiency = {false, std::nullopt,
                      "|EG| " + std::to_string(static_cast<double>(abs_eg)) +
                          " >= " + std::to_string(static_cast<double>(limit))};
  }
  return out;
}

}  // namespace detail

inline PlanReport make_report(const CellTally& tally, const CellPartition& p,
                              const DesiderataParams& params = {}) {
  if (tally.resolution != p.resolution()) {
    throw DomainError("tally resolution does not match partition");
  }
  PlanReport r;
  r.resolution = p.resolution();
  r.k = p.districts();
  for (std::size_t c = 0; c < p.cell_count(); ++c) {
    r.total_a += tally.a[c];
    r.total_b += tally.b[c];
  }
  const std::int64_t total = r.total_a + r.total_b;
  if (total == 0) throw DomainError("empty electorate");

  const auto counts = district_counts(tally, p);
  r.tallies = tally_districts(counts);
  r.shapes = all_district_shapes(p);
  for (std::size_t i = 0; i < r.shapes.size(); ++i) {
    if (r.shapes[i].cells == 0) {
      r.pp_scores.push_back(std::nullopt);
      r.empty_districts.push_back(static_cast<DistrictId>(i) + 1);
      continue;
    }
    const PpScore pp = polsby_popper(r.shapes[i]);
    r.pp_scores.push_back(pp);
    if (!r.min_pp || pp < *r.min_pp) r.min_pp = pp;
  }
  r.eg = efficiency_gap(counts);
  std::vector<std::int64_t> pops;
  for (const auto& t : r.tallies) pops.push_back(t.pop);
  r.delta = population_balance_delta(pops, total);
  r.imbalance = Rational(r.total_a > r.total_b ? r.total_a - r.total_b : r.total_b - r.total_a,
                         total);
  r.seat_counts = seats(counts);
  r.desiderata = detail::check_desiderata(r, params);
  return r;
}

inline PlanReport make_report(const Electorate& e, const CellPartition& p,
                              const DesiderataParams& params = {}) {
  return make_report(e.tally(p.resolution()), p, params);
}

inline DesiderataCheck check_desiderata(const Electorate& e, const CellPartition& p,
                                        const DesiderataParams& params) {
  return make_report(e, p, params).desiderata;
}

}  // namespace gerrylab
