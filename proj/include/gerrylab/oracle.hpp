#pragma once

// Exhaustive check of the impossibility claim on toy rasters: every
// assignment of g*g cells to k districts is enumerated, plans failing the
// balance or compactness threshold are discarded, and the survivors are
// summarized.

#include <cstdint>
#include <optional>
#include <vector>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/metrics.hpp"
#include "gerrylab/rational.hpp"

namespace gerrylab {

struct OracleSummary {
  std::int64_t assignments = 0;  // k^(g^2)
  std::int64_t partitions = 0;   // assignments with no empty district
  std::int64_t survivors = 0;    // partitions meeting balance and compactness
  std::int64_t a_sweeps = 0;     // survivors where A wins every district
  bool any_b_majority = false;   // some survivor has a B-majority district
  bool any_tie = false;
  std::optional<Rational> min_abs_eg;  // over survivors
};

inline constexpr std::int64_t kOracleLimit = 10'000'000;

inline OracleSummary brute_force_oracle(const CellTally& tally, int k, double delta, double C) {
  const int g = tally.resolution;
  if (g > 4 || k > 3 || k < 1) throw DomainError("oracle needs g <= 4 and 1 <= k <= 3");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0,1)");
  if (!(C > 0.0)) throw DomainError("C must be positive");
  const int cells = g * g;
  std::int64_t count = 1;
  for (int i = 0; i < cells; ++i) {
    count *= k;
    if (count > kOracleLimit) throw DomainError("instance too large for the oracle");
  }

  std::int64_t total = 0;
  for (int c = 0; c < cells; ++c) total += tally.a[c] + tally.b[c];
  if (total == 0) throw DomainError("empty electorate");
  const long double lo = (1.0L - delta) * static_cast<long double>(total / k);
  const long double hi = (1.0L + delta) * static_cast<long double>(ceil_div(total, k));

  OracleSummary out;
  out.assignments = count;
  std::vector<int> id(cells, 0);
  std::vector<PartyCounts> counts(k);
  std::vector<std::int64_t> area(k), edges(k);
  for (std::int64_t code = 0; code < count; ++code) {
    std::int64_t rest = code;
    for (int c = 0; c < cells; ++c) {
      id[c] = static_cast<int>(rest % k);
      rest /= k;
    }
    std::fill(counts.begin(), counts.end(), PartyCounts{});
    std::fill(area.begin(), area.end(), 0);
    std::fill(edges.begin(), edges.end(), 0);
    for (int c = 0; c < cells; ++c) {
      const int d = id[c], row = c / g, col = c % g;
      counts[d].a += tally.a[c];
      counts[d].b += tally.b[c];
      ++area[d];
      edges[d] += (row == 0 || id[c - g] != d) + (row == g - 1 || id[c + g] != d) +
                  (col == 0 || id[c - 1] != d) + (col == g - 1 || id[c + 1] != d);
    }
    bool nonempty = true;
    for (int d = 0; d < k; ++d) nonempty = nonempty && area[d] > 0;
    if (!nonempty) continue;
    ++out.partitions;

    bool ok = true;
    for (int d = 0; d < k && ok; ++d) {
      const auto pop = static_cast<long double>(counts[d].a + counts[d].b);
      ok = pop >= lo && pop <= hi &&
           static_cast<long double>(edges[d]) * edges[d] <=
               static_cast<long double>(C) * area[d];
    }
    if (!ok) continue;
    ++out.survivors;

    bool sweep = true;
    for (const auto& c : counts) {
      sweep = sweep && c.a > c.b;
      out.any_b_majority = out.any_b_majority || c.b > c.a;
      out.any_tie = out.any_tie || c.a == c.b;
    }
    out.a_sweeps += sweep;
    const Rational eg = abs(efficiency_gap(counts));
    if (!out.min_abs_eg || eg < *out.min_abs_eg) out.min_abs_eg = eg;
  }
  return out;
}

inline OracleSummary brute_force_oracle(const Electorate& e, int g, int k, double delta,
                                        double C) {
  if (g < 1 || g > 4) throw DomainError("oracle needs g <= 4");
  return brute_force_oracle(e.tally(g), k, delta, C);
}

}  // namespace gerrylab
