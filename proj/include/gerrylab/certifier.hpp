#pragma once

// Impossibility witnesses: given court thresholds (delta, C, alpha, beta) and
// k, build a lattice electorate on which every plan meeting the balance and
// compactness thresholds is an A sweep, so the efficiency threshold fails.
//
// Bounds, for eps = 1/n:
//   E     = sqrt(2)*|dD|/eps + 2*pi          eps-squares meeting the boundary
//   F     = sqrt((1-delta)/(2k))             lower bound on |dD|
//   ratio = (F^2 - C F sqrt(2) eps - 2 C pi eps^2) /
//           (F^2 + C F sqrt(2) eps + 2 C pi eps^2)
// b/a <= ratio forces A to win every compact, balanced district, and then
//   EG <= (2 gamma - 1)/(2 - gamma),  ||A|-|B||/|A u B| = gamma/(2 - gamma)
// with gamma = 1 - b/a.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"
#include "gerrylab/metrics.hpp"
#include "gerrylab/rational.hpp"

namespace gerrylab {

// Slack on comparisons between double-valued bounds.
inline constexpr double kBoundSlack = 1e-12;

struct TheoremParams {
  double delta = 0.0;
  double C = 4.0 * std::numbers::pi / 0.7;
  double alpha = 0.1;
  double beta = 0.2;
  int k = 5;

  void validate() const {
    if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0,1)");
    if (!(C > 0.0)) throw DomainError("C must be positive");
    if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("alpha must lie in (0,1/2)");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
    if (k < 1) throw DomainError("k must be positive");
  }

  DesiderataParams desiderata() const { return {delta, C, alpha, beta}; }
};

inline double boundary_cell_bound(double perimeter, double eps) {
  if (!(perimeter > 0.0) || !(eps > 0.0)) {
    throw DomainError("perimeter and eps must be positive");
  }
  return std::numbers::sqrt2 * perimeter / eps + 2.0 * std::numbers::pi;
}

inline double min_perimeter_F(double delta, int k) {
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0,1)");
  if (k < 1) throw DomainError("k must be positive");
  return std::sqrt((1.0 - delta) / (2.0 * k));
}

/// May be <= 0 when eps is too coarse to certify anything.
inline double ratio_bound(double F, double C, double eps) {
  const double spill = C * F * std::numbers::sqrt2 * eps + 2.0 * C * std::numbers::pi * eps * eps;
  return (F * F - spill) / (F * F + spill);
}

namespace detail {
inline void require_gamma(const Rational& gamma) {
  if (gamma <= 0 || gamma > 1) throw DomainError("gamma must lie in (0,1]");
}
}  // namespace detail

inline Rational eg_lower_bound(const Rational& gamma) {
  detail::require_gamma(gamma);
  return (2 * gamma - 1) / (2 - gamma);
}

inline Rational vote_imbalance(const Rational& gamma) {
  detail::require_gamma(gamma);
  return gamma / (2 - gamma);
}

struct WitnessConfig {
  std::int64_t n = 1;
  std::int64_t l = 1;
  std::int64_t a = 1;
  std::int64_t b = 0;
  Rational gamma;
  double gamma_target = 0;
  double epsilon = 1;
  double F = 0;
  double ratio_bound_value = 0;
  Rational eg_bound;
  Rational imbalance;

  LatticeParams lattice() const { return {n, l, a, b, LatticePattern::Checkerboard}; }
};

struct WitnessInvariants {
  bool slots_sum = false;       // a + b == l^2
  bool ratio_certified = false; // b/a <= ratio bound
  bool eg_large = false;        // |eg_bound| >= 1/2 - alpha
  bool imbalance_small = false; // imbalance < beta

  bool all() const { return slots_sum && ratio_certified && eg_large && imbalance_small; }
};

inline WitnessInvariants check_witness(const WitnessConfig& w, const TheoremParams& params) {
  WitnessInvariants inv;
  inv.slots_sum = w.a + w.b == w.l * w.l;
  inv.ratio_certified =
      static_cast<double>(w.b) / static_cast<double>(w.a) <= w.ratio_bound_value + kBoundSlack;
  inv.eg_large = to_long_double(abs(w.eg_bound)) >= 0.5L - params.alpha;
  inv.imbalance_small = to_long_double(w.imbalance) < params.beta;
  return inv;
}

/// Witness family b = a - 1, l odd, l^2 = 2a - 1, so gamma = 2/(l^2 + 1).
/// gamma is chosen below half of the largest value keeping both the EG and the
/// imbalance conditions, then n is the smallest resolution whose ratio bound
/// admits b/a.
inline WitnessConfig construct_witness(const TheoremParams& params) {
  params.validate();
  WitnessConfig w;
  const double gamma_eg = 4.0 * params.alpha / (3.0 + 2.0 * params.alpha);
  const double gamma_imb = 2.0 * params.beta / (1.0 + params.beta);
  w.gamma_target = std::min(gamma_eg, gamma_imb) / 2.0;

  w.l = 1;
  while (2.0 / static_cast<double>(w.l * w.l + 1) > w.gamma_target) w.l += 2;
  w.a = (w.l * w.l + 1) / 2;
  w.b = (w.l * w.l - 1) / 2;
  w.gamma = Rational(2, w.l * w.l + 1);

  w.F = min_perimeter_F(params.delta, params.k);
  const double target = static_cast<double>(w.b) / static_cast<double>(w.a);
  auto certifies = [&](std::int64_t n) {
    return ratio_bound(w.F, params.C, 1.0 / static_cast<double>(n)) >= target;
  };
  std::int64_t hi = 1;
  while (!certifies(hi)) {
    if (hi > (std::int64_t{1} << 40)) throw DomainError("witness resolution out of range");
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // certifies(lo) is false unless hi == 1
  if (hi > 1) {
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (certifies(mid) ? hi : lo) = mid;
    }
  }
  w.n = hi;
  w.epsilon = 1.0 / static_cast<double>(w.n);
  w.ratio_bound_value = ratio_bound(w.F, params.C, w.epsilon);
  w.eg_bound = eg_lower_bound(w.gamma);
  w.imbalance = vote_imbalance(w.gamma);
  return w;
}

struct CertificationReport {
  enum class Verdict {
    BalanceFails,         // plan violates the balance threshold
    CompactnessFails,     // plan violates the compactness threshold
    EfficiencyViolated,   // balanced and compact, A sweeps, |EG| too large
    Counterexample,       // balanced and compact but not certified
  };

  Verdict verdict = Verdict::BalanceFails;
  bool balance_ok = false;
  bool compactness_ok = false;
  bool a_sweep = false;
  bool eg_within_bound = false;  // realized EG <= eg_bound
  bool efficiency_violated = false;
  Rational realized_eg;
  Rational realized_imbalance;
  Rational realized_delta;
  std::optional<PpScore> min_pp;
  Seats seat_counts;
  std::string detail;
};

inline const char* to_string(CertificationReport::Verdict v) {
  using V = CertificationReport::Verdict;
  switch (v) {
    case V::BalanceFails: return "balance_fails";
    case V::CompactnessFails: return "compactness_fails";
    case V::EfficiencyViolated: return "efficiency_violated";
    case V::Counterexample: return "counterexample";
  }
  return "?";
}

/// Checks `plan` against the witness. `tally` must be the witness electorate
/// rasterized at the plan's resolution.
inline CertificationReport verify_witness(const WitnessConfig& w, const TheoremParams& params,
                                          const CellPartition& plan, const CellTally& tally) {
  params.validate();
  if (plan.districts() != params.k) throw DomainError("plan has the wrong number of districts");
  const PlanReport r = make_report(tally, plan, params.desiderata());
  if (r.total_a != w.a * w.n * w.n || r.total_b != w.b * w.n * w.n) {
    throw DomainError("electorate does not match witness");
  }
  CertificationReport c;
  c.balance_ok = r.desiderata.balance.pass;
  c.compactness_ok = r.desiderata.compactness.pass;
  c.realized_eg = r.eg;
  c.realized_imbalance = r.imbalance;
  c.realized_delta = r.delta;
  c.min_pp = r.min_pp;
  c.seat_counts = r.seat_counts;
  c.a_sweep = r.seat_counts.a == params.k;
  c.eg_within_bound = r.eg <= w.eg_bound;
  c.efficiency_violated = r.desiderata.efficiency_clause_active && !r.desiderata.efficiency.pass;

  if (!c.balance_ok) {
    c.verdict = CertificationReport::Verdict::BalanceFails;
    c.detail = r.desiderata.balance.detail;
  } else if (!c.compactness_ok) {
    c.verdict = CertificationReport::Verdict::CompactnessFails;
    c.detail = r.desiderata.compactness.detail;
  } else if (c.a_sweep && c.efficiency_violated && c.eg_within_bound) {
    c.verdict = CertificationReport::Verdict::EfficiencyViolated;
    c.detail = "A wins every district; partisan efficiency fails";
  } else {
    c.verdict = CertificationReport::Verdict::Counterexample;
    c.detail = "balanced, compact plan escaped the bound";
  }
  return c;
}

inline CertificationReport verify_witness(const WitnessConfig& w, const TheoremParams& params,
                                          const CellPartition& plan, const Electorate& e) {
  if (!e.provenance() || !(*e.provenance() == w.lattice())) {
    throw DomainError("electorate was not generated from this witness");
  }
  return verify_witness(w, params, plan, e.tally(plan.resolution()));
}

inline std::string certification_to_text(const WitnessConfig& w, const TheoremParams& params,
                                         const CertificationReport& c) {
  std::ostringstream out;
  out.precision(12);
  out << "params delta=" << params.delta << " C=" << params.C << " alpha=" << params.alpha
      << " beta=" << params.beta << " k=" << params.k << '\n';
  out << "witness n=" << w.n << " l=" << w.l << " a=" << w.a << " b=" << w.b
      << " gamma=" << to_string(w.gamma) << " gamma_target=" << w.gamma_target << '\n';
  out << "bounds eps=" << w.epsilon << " F=" << w.F << " ratio_bound=" << w.ratio_bound_value
      << " b/a=" << static_cast<double>(w.b) / static_cast<double>(w.a)
      << " E(F)=" << boundary_cell_bound(w.F, w.epsilon) << '\n';
  out << "eg_bound " << to_string(w.eg_bound) << " (" << to_double(w.eg_bound) << ")\n";
  out << "imbalance " << to_string(w.imbalance) << " (" << to_double(w.imbalance) << ")\n";
  out << "plan delta=" << to_double(c.realized_delta)
      << " min_pp=" << (c.min_pp ? c.min_pp->value() : 0.0) << " eg=" << to_string(c.realized_eg)
      << " (" << to_double(c.realized_eg) << ") seats=" << c.seat_counts.a << '-'
      << c.seat_counts.b << '-' << c.seat_counts.ties << '\n';
  auto pf = [](bool b) { return b ? "pass" : "fail"; };
  out << "balance " << pf(c.balance_ok) << '\n';
  out << "compactness " << pf(c.compactness_ok) << '\n';
  out << "a_sweep " << (c.a_sweep ? "yes" : "no") << '\n';
  out << "verdict " << to_string(c.verdict) << '\n';
  return out.str();
}

}  // namespace gerrylab
