#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gerrylab/metrics.hpp"
#include "gerrylab/splitline.hpp"

namespace gerrylab {
namespace {

const LatticeParams kReference{8, 3, 5, 4};

std::vector<std::size_t> all_cells(int g) {
  std::vector<std::size_t> r(CellPartition::cell_count_for(g));
  for (std::size_t c = 0; c < r.size(); ++c) r[c] = c;
  return r;
}

// Chord of the line cos(t) x + sin(t) y = offset through the unit square,
// from its intersections with the four sides.
double unit_square_chord(double angle, double offset) {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<std::pair<double, double>> hits;
  auto add = [&](double x, double y) {
    if (x < -1e-12 || x > 1 + 1e-12 || y < -1e-12 || y > 1 + 1e-12) return;
    for (const auto& [hx, hy] : hits)
      if (std::abs(hx - x) < 1e-12 && std::abs(hy - y) < 1e-12) return;
    hits.emplace_back(x, y);
  };
  if (std::abs(s) > 1e-12) {
    add(0, offset / s);
    add(1, (offset - c) / s);
  }
  if (std::abs(c) > 1e-12) {
    add(offset / c, 0);
    add((offset - s) / c, 1);
  }
  if (hits.size() < 2) return 0;
  double best = 0;
  for (std::size_t i = 0; i < hits.size(); ++i)
    for (std::size_t j = i + 1; j < hits.size(); ++j)
      best = std::max(best, std::hypot(hits[i].first - hits[j].first,
                                       hits[i].second - hits[j].second));
  return best;
}

struct OracleCut {
  std::int64_t deviation;
  double length;
};

// Every split of the whole grid by a threshold on projected cell centers,
// for the same orientations best_split uses.
std::vector<OracleCut> enumerate_cuts(const std::vector<std::int64_t>& pop, int g, int k1,
                                      int k2, int angle_steps) {
  std::vector<OracleCut> out;
  const std::int64_t k = k1 + k2;
  std::int64_t total = 0;
  for (auto p : pop) total += p;
  const std::size_t n = pop.size();
  for (int j = 0; j < angle_steps; ++j) {
    const double angle = std::numbers::pi * j / angle_steps;
    const double cs = std::cos(angle), sn = std::sin(angle);
    std::vector<double> proj(n);
    for (std::size_t c = 0; c < n; ++c) {
      proj[c] = cs * ((c % g) + 0.5) / g + sn * ((c / g) + 0.5) / g;
    }
    for (std::size_t t = 0; t < n; ++t) {
      std::int64_t pop1 = 0, populated1 = 0, populated2 = 0;
      bool has_above = false;
      double next = 1e300;
      for (std::size_t c = 0; c < n; ++c) {
        if (proj[c] <= proj[t] + 1e-9) {
          pop1 += pop[c];
          populated1 += pop[c] > 0;
        } else {
          populated2 += pop[c] > 0;
          has_above = true;
          next = std::min(next, proj[c]);
        }
      }
      if (!has_above) continue;
      double top = -1e300;
      for (std::size_t c = 0; c < n; ++c)
        if (proj[c] <= proj[t] + 1e-9) top = std::max(top, proj[c]);
      const double offset = 0.5 * (top + next);
      for (const bool side1_first : {true, false}) {
        const int a = side1_first ? k1 : k2, b = side1_first ? k2 : k1;
        if (populated1 < a || populated2 < b) continue;
        out.push_back({std::abs(pop1 * k - total * a), unit_square_chord(angle, offset)});
      }
    }
  }
  return out;
}

TEST(Rasterize, VerticalHalf) {
  const auto cells = all_cells(2);
  const auto sides = rasterize_cut({0.0, 0.5}, cells, 2);
  EXPECT_EQ(sides.side1, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(sides.side2, (std::vector<std::size_t>{1, 3}));
  EXPECT_NEAR(cut_length({0.0, 0.5}, cells, 2), 1.0, 1e-12);
}

TEST(Rasterize, LineOutsideRegion) {
  const auto cells = all_cells(2);
  const auto sides = rasterize_cut({0.0, 2.0}, cells, 2);
  EXPECT_EQ(sides.side1.size(), 4u);
  EXPECT_TRUE(sides.side2.empty());
  EXPECT_EQ(cut_length({0.0, 2.0}, cells, 2), 0.0);
}

TEST(Rasterize, DiagonalThroughCenterSendsOnLineCentersToSide1) {
  // Anti-diagonal normal (cos 45, sin 45), offset through (1/2, 1/2): centers
  // (1/4,3/4) and (3/4,1/4) lie on the line, (1/4,1/4) below, (3/4,3/4) above.
  const double angle = std::numbers::pi / 4;
  const double offset = std::numbers::sqrt2 / 2;
  const auto sides = rasterize_cut({angle, offset}, all_cells(2), 2);
  EXPECT_EQ(sides.side1, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(sides.side2, (std::vector<std::size_t>{3}));
  EXPECT_NEAR(cut_length({angle, offset}, all_cells(2), 2), std::numbers::sqrt2, 1e-12);
}

TEST(Splitline, KOneIsWholeSquare) {
  const auto e = generate_lattice_electorate(kReference);
  EXPECT_EQ(shortest_splitline(e, 1, 5), CellPartition::whole_square(5));
}

TEST(Splitline, UniformHalvesUseVerticalCut) {
  const auto e = generate_lattice_electorate({4, 2, 2, 2});
  for (int g : {2, 4, 8}) {
    const auto p = shortest_splitline(e, 2, g);
    for (int r = 0; r < g; ++r)
      for (int c = 0; c < g; ++c) EXPECT_EQ(p.at(r, c), c < g / 2 ? 1 : 2);
    std::vector<std::int64_t> pop(CellPartition::cell_count_for(g));
    const auto t = e.tally(g);
    for (std::size_t c = 0; c < pop.size(); ++c) pop[c] = t.pop(c);
    const auto choice = best_split(all_cells(g), pop, g, 1, 1, {});
    ASSERT_TRUE(choice);
    EXPECT_EQ(choice->deviation, 0);
    EXPECT_NEAR(choice->length, 1.0, 1e-12);
    EXPECT_EQ(choice->angle_index, 0);
  }
}

TEST(Splitline, BestSplitMatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(5);
  SplitlineConfig exact;
  exact.angle_steps = 24;
  exact.balance_slack = 0.0;
  SplitlineConfig slack = exact;
  slack.balance_slack = 0.05;
  slack.population_tolerance = 1;
  for (int trial = 0; trial < 60; ++trial) {
    const int g = 2 + static_cast<int>(rng() % 7);
    std::vector<std::int64_t> pop(CellPartition::cell_count_for(g));
    for (auto& p : pop) p = (rng() % 4 == 0) ? 0 : static_cast<std::int64_t>(rng() % 9);
    pop[0] += 1;
    pop.back() += 1;
    const int k = 2 + static_cast<int>(rng() % 4);
    const int k1 = (k + 1) / 2, k2 = k / 2;
    const auto oracle = enumerate_cuts(pop, g, k1, k2, exact.angle_steps);
    if (oracle.empty()) {
      EXPECT_FALSE(best_split(all_cells(g), pop, g, k1, k2, exact)) << trial;
      continue;
    }
    std::int64_t min_dev = oracle[0].deviation;
    for (const auto& o : oracle) min_dev = std::min(min_dev, o.deviation);

    const auto got = best_split(all_cells(g), pop, g, k1, k2, exact);
    ASSERT_TRUE(got) << trial;
    EXPECT_EQ(got->deviation, min_dev) << trial;
    double min_len = 1e300;
    for (const auto& o : oracle)
      if (o.deviation == min_dev) min_len = std::min(min_len, o.length);
    EXPECT_NEAR(got->length, min_len, 1e-9) << trial;

    std::int64_t total = 0;
    for (auto p : pop) total += p;
    const std::int64_t band = slack.tolerance_for(total, k) * k;
    const auto loose = best_split(all_cells(g), pop, g, k1, k2, slack);
    ASSERT_TRUE(loose);
    EXPECT_LE(loose->deviation, min_dev + band) << trial;
    double band_len = 1e300;
    for (const auto& o : oracle)
      if (o.deviation <= min_dev + band) band_len = std::min(band_len, o.length);
    EXPECT_NEAR(loose->length, band_len, 1e-9) << trial;

    // The reported deviation matches the returned sides.
    std::int64_t first_pop = 0;
    for (auto c : loose->first) first_pop += pop[c];
    EXPECT_EQ(std::abs(first_pop * k - total * k1), loose->deviation);
    EXPECT_EQ(loose->first.size() + loose->second.size(), pop.size());
  }
}

TEST(Splitline, ReferencePanel) {
  const auto e = generate_lattice_electorate(kReference);
  const auto plan = shortest_splitline(e, 5, 24);
  EXPECT_TRUE(validate_partition(plan).empty());
  const auto r = make_report(e, plan);
  EXPECT_EQ(r.seat_counts, (Seats{5, 0, 0}));
  EXPECT_LE(r.delta, Rational(7, 100));
  ASSERT_TRUE(r.min_pp);
  EXPECT_GE(r.min_pp->value(), 0.65);
  EXPECT_GE(abs(r.eg), Rational(33, 100));
  EXPECT_LE(abs(r.eg), Rational(42, 100));
}

TEST(Splitline, LabelBlindAndDeterministic) {
  const auto e = generate_lattice_electorate(kReference);
  for (int k : {2, 3, 5, 7}) {
    const auto p = shortest_splitline(e, k, 12);
    EXPECT_EQ(shortest_splitline(e.swapped(), k, 12), p);
    EXPECT_EQ(shortest_splitline(e, k, 12), p);
  }
}

TEST(Splitline, ValidPartitionsAcrossK) {
  const auto e = generate_lattice_electorate(kReference);
  for (int g : {3, 8, 16}) {
    for (int k = 1; k <= std::min(12, g * g); ++k) {
      const auto p = shortest_splitline(e, k, g);
      EXPECT_TRUE(validate_partition(p).empty()) << g << " " << k;
      EXPECT_EQ(p.districts(), k);
    }
  }
}

TEST(Splitline, Errors) {
  const auto e = generate_lattice_electorate(kReference);
  EXPECT_THROW(shortest_splitline(e, 5, 2), DomainError);  // 4 populated cells
  EXPECT_THROW(shortest_splitline(e, 0, 4), DomainError);
  EXPECT_THROW(shortest_splitline(Electorate({}, {}), 2, 4), DomainError);
  SplitlineConfig bad;
  bad.angle_steps = 1;
  EXPECT_THROW(shortest_splitline(e, 2, 4, bad), DomainError);
  // Sparse electorate: only two populated cells.
  const Electorate sparse({{0.1, 0.1}}, {{0.9, 0.9}});
  const auto p = shortest_splitline(sparse, 2, 4);
  EXPECT_NE(p[0], p[15]);
  EXPECT_THROW(shortest_splitline(sparse, 3, 4), DomainError);
}

}  // namespace
}  // namespace gerrylab
