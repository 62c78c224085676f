#pragma once

// Simulated annealing over cell assignments. Minimizes
//   |EG| + w_pop * max(0, delta - delta_cap)
//        + w_pp  * sum_i max(0, pp_floor - pp_i)
//        + w_conn * (number of disconnected districts)
// with single-cell boundary flips, Metropolis acceptance and geometric
// cooling. One chain is sequential and fully determined by the seed.


#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"
#include "gerrylab/metrics.hpp"
#include "gerrylab/splitline.hpp"

namespace gerrylab {

struct AnnealWeights {
  double pop = 10.0;
  double pp = 10.0;
  double conn = 1.0;
};

struct AnnealConfig {
  std::uint64_t seed = 1;
  std::int64_t steps = 1'000'000;
  double t_initial = 0.05;
  double t_final = 1e-3;
  AnnealWeights weights;
  double pp_floor = 0.10;
  double delta_cap = 0.05;
  std::int64_t trace_every = 1000;

  void validate() const {
    if (steps < 1) throw DomainError("steps must be at least 1");
    if (!(t_initial > 0.0) || !(t_final > 0.0)) throw DomainError("temperatures must be positive");
    if (t_final > t_initial) throw DomainError("temperature must not increase");
    if (weights.pop < 0 || weights.pp < 0 || weights.conn < 0) {
      throw DomainError("penalty weights must be nonnegative");
    }
    if (trace_every < 1) throw DomainError("trace_every must be at least 1");
  }
};

struct TraceRow {
  std::int64_t step = 0;
  double temperature = 0;
  double objective = 0;       // current state
  double best_objective = 0;  // best seen so far
  bool accepted = false;
};

struct AnnealResult {
  CellPartition plan;
  std::vector<TraceRow> trace;
  double objective = 0;
  bool feasible = false;  // every penalty term is zero for `plan`
};

namespace detail {

// Seeded, platform-independent draws.
class ChainRng {
 public:
  explicit ChainRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

class AnnealState {
 public:
  AnnealState(const CellTally& tally, const CellPartition& start, const AnnealConfig& cfg)
      : g_(start.resolution()), k_(start.districts()), cfg_(cfg), tally_(tally) {
    assign_.resize(start.cell_count());
    for (std::size_t c = 0; c < assign_.size(); ++c) assign_[c] = start[c] - 1;
    a_.assign(k_, 0);
    b_.assign(k_, 0);
    cells_.assign(k_, 0);
    edges_.assign(k_, 0);
    connected_.assign(k_, 1);
    stamp_.assign(assign_.size(), 0);
    for (std::size_t c = 0; c < assign_.size(); ++c) {
      const int d = assign_[c];
      a_[d] += tally.a[c];
      b_[d] += tally.b[c];
      total_ += tally.a[c] + tally.b[c];
      ++cells_[d];
    }
    for (std::size_t c = 0; c < assign_.size(); ++c) {
      edges_[assign_[c]] += 4 - same_neighbors(c, assign_[c]);
    }
    for (int d = 0; d < k_; ++d) connected_[d] = recount_connected(d);
    lo_ = total_ / k_;
    hi_ = ceil_div(total_, k_);
  }

  int resolution() const { return g_; }
  std::size_t cell_count() const { return assign_.size(); }
  int district_of(std::size_t c) const { return assign_[c]; }

  double objective() const { return eg_term() + penalty(); }

  bool feasible() const { return penalty() == 0.0; }

  CellPartition plan() const {
    std::vector<DistrictId> ids(assign_.size());
    for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = assign_[c] + 1;
    return CellPartition(g_, k_, std::move(ids));
  }

  // Neighbor of c in direction dir (0..3), or -1 outside the grid.
  std::int64_t neighbor(std::size_t c, int dir) const {
    const int row = static_cast<int>(c / g_), col = static_cast<int>(c % g_);
    switch (dir) {
      case 0: return row > 0 ? static_cast<std::int64_t>(c) - g_ : -1;
      case 1: return row < g_ - 1 ? static_cast<std::int64_t>(c) + g_ : -1;
      case 2: return col > 0 ? static_cast<std::int64_t>(c) - 1 : -1;
      default: return col < g_ - 1 ? static_cast<std::int64_t>(c) + 1 : -1;
    }
  }

  struct Undo {
    std::size_t cell;
    int from, to;
    bool from_connected, to_connected;
  };

  /// Moves cell c to district `to`; returns what is needed to revert.
  Undo move(std::size_t c, int to) {
    const int from = assign_[c];
    Undo u{c, from, to, connected_[from] != 0, connected_[to] != 0};
    const int s_from = same_neighbors(c, from);
    const int s_to = same_neighbors(c, to);
    assign_[c] = to;
    a_[from] -= tally_.a[c];
    b_[from] -= tally_.b[c];
    a_[to] += tally_.a[c];
    b_[to] += tally_.b[c];
    --cells_[from];
    ++cells_[to];
    edges_[from] += 2 * s_from - 4;
    edges_[to] += 4 - 2 * s_to;
    if (!u.from_connected || s_from >= 2) connected_[from] = recount_connected(from);
    if (!u.to_connected) connected_[to] = recount_connected(to);
    return u;
  }

  void revert(const Undo& u) {
    const std::size_t c = u.cell;
    const int s_from = same_neighbors(c, u.from);  // c currently in u.to
    const int s_to = same_neighbors(c, u.to);
    assign_[c] = u.from;
    a_[u.to] -= tally_.a[c];
    b_[u.to] -= tally_.b[c];
    a_[u.from] += tally_.a[c];
    b_[u.from] += tally_.b[c];
    ++cells_[u.from];
    --cells_[u.to];
    edges_[u.from] += 4 - 2 * s_from;
    edges_[u.to] += 2 * s_to - 4;
    connected_[u.from] = u.from_connected;
    connected_[u.to] = u.to_connected;
  }

  int cells_in(int d) const { return static_cast<int>(cells_[d]); }

 private:
  int same_neighbors(std::size_t c, int d) const {
    int n = 0;
    for (int dir = 0; dir < 4; ++dir) {
      const std::int64_t m = neighbor(c, dir);
      n += m >= 0 && assign_[static_cast<std::size_t>(m)] == d;
    }
    return n;
  }

  char recount_connected(int d) {
    if (cells_[d] == 0) return 0;
    std::size_t start = assign_.size();
    for (std::size_t c = 0; c < assign_.size(); ++c) {
      if (assign_[c] == d) {
        start = c;
        break;
      }
    }
    ++epoch_;
    stack_.clear();
    stack_.push_back(start);
    stamp_[start] = epoch_;
    std::int64_t reached = 0;
    while (!stack_.empty()) {
      const std::size_t c = stack_.back();
      stack_.pop_back();
      ++reached;
      for (int dir = 0; dir < 4; ++dir) {
        const std::int64_t m = neighbor(c, dir);
        if (m < 0) continue;
        const auto n = static_cast<std::size_t>(m);
        if (stamp_[n] != epoch_ && assign_[n] == d) {
          stamp_[n] = epoch_;
          stack_.push_back(n);
        }
      }
    }
    return reached == cells_[d] ? 1 : 0;
  }

  double eg_term() const {
    std::int64_t net = 0;
    for (int d = 0; d < k_; ++d) {
      const auto w = wasted_votes(a_[d], b_[d]);
      net += w.a - w.b;
    }
    return std::abs(static_cast<double>(net)) / static_cast<double>(total_);
  }

  double penalty() const {
    double delta = 0, pp_short = 0;
    int disconnected = 0;
    for (int d = 0; d < k_; ++d) {
      const double pop = static_cast<double>(a_[d] + b_[d]);
      delta = std::max({delta, 1.0 - pop / static_cast<double>(lo_),
                        pop / static_cast<double>(hi_) - 1.0});
      if (cells_[d] > 0) {
        const double pp = 4.0 * std::numbers::pi * static_cast<double>(cells_[d]) /
                          static_cast<double>(edges_[d] * edges_[d]);
        pp_short += std::max(0.0, cfg_.pp_floor - pp);
      } else {
        pp_short += cfg_.pp_floor;
      }
      disconnected += connected_[d] == 0;
    }
    return cfg_.weights.pop * std::max(0.0, delta - cfg_.delta_cap) +
           cfg_.weights.pp * pp_short + cfg_.weights.conn * disconnected;
  }

  int g_;
  int k_;
  AnnealConfig cfg_;
  const CellTally& tally_;
  std::vector<int> assign_;
  std::vector<std::int64_t> a_, b_, cells_, edges_;
  std::vector<char> connected_;
  std::int64_t total_ = 0;
  std::int64_t lo_ = 0, hi_ = 0;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::size_t> stack_;
};

// Label-blind starting plan: splitline when possible, otherwise k bands of
// consecutive cells.
inline CellPartition initial_plan(const CellTally& tally, int k) {
  try {
    return shortest_splitline(tally, k);
  } catch (const DomainError&) {
    const std::size_t cells = CellPartition::cell_count_for(tally.resolution);
    std::vector<DistrictId> ids(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      ids[c] = static_cast<DistrictId>(c * k / cells) + 1;
    }
    return CellPartition(tally.resolution, k, std::move(ids));
  }
}

}  // namespace detail

/// Anneals from `start` (default: a label-blind initial plan). Returns the
/// best feasible plan seen, or the best-objective plan if none was feasible.
inline AnnealResult anneal(const CellTally& tally, int k, const AnnealConfig& cfg,
                           std::optional<CellPartition> start = std::nullopt) {
  cfg.validate();
  const int g = tally.resolution;
  if (k < 1 || static_cast<std::size_t>(k) > CellPartition::cell_count_for(g)) {
    throw DomainError("k must lie in 1..g^2");
  }
  std::int64_t total = 0;
  for (std::size_t c = 0; c < tally.a.size(); ++c) total += tally.pop(c);
  if (total == 0) throw DomainError("empty electorate");
  if (total < k) throw DomainError("fewer voters than districts");

  CellPartition plan = start ? std::move(*start) : detail::initial_plan(tally, k);
  if (plan.resolution() != g || plan.districts() != k || !validate_partition(plan).empty()) {
    throw DomainError("starting plan is not a valid partition for this tally");
  }

  detail::AnnealState state(tally, plan, cfg);
  detail::ChainRng rng(cfg.seed);

  AnnealResult result;
  double current = state.objective();
  double best = current;
  std::optional<double> best_feasible;
  CellPartition best_plan = state.plan();
  if (state.feasible()) {
    best_feasible = current;
    result.plan = best_plan;
  }

  const double ratio = cfg.t_final / cfg.t_initial;
  for (std::int64_t step = 0; step < cfg.steps; ++step) {
    const double frac =
        cfg.steps > 1 ? static_cast<double>(step) / static_cast<double>(cfg.steps - 1) : 1.0;
    const double temperature = cfg.t_initial * std::pow(ratio, frac);

    bool accepted = false;
    const std::size_t c = rng.below(state.cell_count());
    const std::int64_t n = state.neighbor(c, static_cast<int>(rng.below(4)));
    if (n >= 0) {
      const int from = state.district_of(c);
      const int to = state.district_of(static_cast<std::size_t>(n));
      if (from != to && state.cells_in(from) > 1) {
        const auto undo = state.move(c, to);
        const double proposed = state.objective();
        const double diff = proposed - current;
        if (diff <= 0 || rng.unit() < std::exp(-diff / temperature)) {
          accepted = true;
          current = proposed;
          if (current < best) {
            best = current;
            best_plan = state.plan();
          }
          if (state.feasible() && (!best_feasible || current < *best_feasible)) {
            best_feasible = current;
            result.plan = state.plan();
          }
        } else {
          state.revert(undo);
        }
      }
    }
    if (step % cfg.trace_every == 0 || step == cfg.steps - 1) {
      result.trace.push_back({step, temperature, current, best, accepted});
    }
  }

  if (best_feasible) {
    result.objective = *best_feasible;
    result.feasible = true;
  } else {
    result.plan = std::move(best_plan);
    result.objective = best;
  }
  return result;
}

inline AnnealResult anneal(const Electorate& e, int k, int g, const AnnealConfig& cfg) {
  if (e.total() == 0) throw DomainError("empty electorate");
  return anneal(e.tally(g), k, cfg);
}

struct ParetoPoint {
  double pp_floor = 0;
  PpScore min_pp;
  Rational abs_eg;
  Rational delta;
  bool feasible = false;
  CellPartition plan;
};

/// One chain per floor (seed cfg.seed + index); metrics are recomputed from
/// each returned plan.
inline std::vector<ParetoPoint> pareto_sweep(const CellTally& tally, int k,
                                             const std::vector<double>& floors,
                                             const AnnealConfig& cfg) {
  if (floors.empty()) throw DomainError("no pp floors given");
  if (!std::is_sorted(floors.begin(), floors.end(), std::greater<>())) {
    throw DomainError("pp floors must be sorted in descending order");
  }
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < floors.size(); ++i) {
    AnnealConfig run = cfg;
    run.pp_floor = floors[i];
    run.seed = cfg.seed + i;
    auto res = anneal(tally, k, run);
    const PlanReport r = make_report(tally, res.plan);
    out.push_back({floors[i], r.min_pp.value_or(PpScore{}), abs(r.eg), r.delta, res.feasible,
                   std::move(res.plan)});
  }
  return out;
}

inline std::string trace_to_text(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "# step temperature objective best accepted\n";
  for (const auto& t : trace) {
    out << t.step << ' ' << t.temperature << ' ' << t.objective << ' ' << t.best_objective << ' '
        << (t.accepted ? 1 : 0) << '\n';
  }
  return out.str();
}

inline std::string pareto_to_text(const std::vector<ParetoPoint>& points) {
  std::ostringstream out;
  out << "# pp_floor min_pp abs_eg delta feasible\n";
  for (const auto& p : points) {
    out << p.pp_floor << ' ' << p.min_pp.value() << ' ' << to_double(p.abs_eg) << ' '
        << to_double(p.delta) << ' ' << (p.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace gerrylab
