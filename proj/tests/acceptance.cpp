// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gerrylab/certifier.hpp"
#include "gerrylab/io.hpp"
#include "gerrylab/metrics.hpp"
#include "gerrylab/optimizer.hpp"
#include "gerrylab/oracle.hpp"
#include "gerrylab/splitline.hpp"

namespace {

using namespace gerrylab;

const LatticeParams kReference{8, 3, 5, 4};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  const std::string cmd = std::string(GERRYLAB_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Outcome generation() {
  const auto e = generate_lattice_electorate(kReference);
  bool per_square = true;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      std::int64_t count = 0;
      for (const auto& p : e.a_points()) count += p.x >= i / 8.0 && p.x < (i + 1) / 8.0 &&
                                                  p.y >= j / 8.0 && p.y < (j + 1) / 8.0;
      for (const auto& p : e.b_points()) count += p.x >= i / 8.0 && p.x < (i + 1) / 8.0 &&
                                                  p.y >= j / 8.0 && p.y < (j + 1) / 8.0;
      per_square = per_square && count == 9;
    }
  const auto cli = run_cli("gen --n 8 --l 3 --a 5 --b 4");
  bool cli_ok = cli.code == 0;
  if (cli_ok) {
    const json doc = json::parse(cli.out);
    cli_ok = doc["a_count"] == 320 && doc["b_count"] == 256;
  }
  std::ostringstream d;
  d << "|A|=" << e.a_count() << " |B|=" << e.b_count() << " nine_per_square=" << per_square
    << " cli=" << cli_ok;
  return {e.a_count() == 320 && e.b_count() == 256 && per_square && cli_ok, d.str()};
}

Outcome whole_square() {
  const auto e = generate_lattice_electorate(kReference);
  const Rational eg = efficiency_gap(e, CellPartition::whole_square());
  const auto cli = run_cli("metrics --n 8 --l 3 --a 5 --b 4 --plan whole_square --json");
  const bool cli_ok = cli.code == 0 && json::parse(cli.out)["eg"] == "-7/18";
  return {eg == Rational(-7, 18) && cli_ok,
          "eg=" + to_string(eg) + " (" + std::to_string(to_double(eg)) + ") cli=" +
              (cli_ok ? "1" : "0")};
}

Outcome splitline_panel() {
  const auto e = generate_lattice_electorate(kReference);
  const auto plan = shortest_splitline(e, 5, 24);
  const auto r = make_report(e, plan);
  const bool ok = validate_partition(plan).empty() && plan.districts() == 5 &&
                  r.seat_counts == Seats{5, 0, 0} && r.delta <= Rational(7, 100) && r.min_pp &&
                  r.min_pp->value() >= 0.65 && abs(r.eg) >= Rational(33, 100) &&
                  abs(r.eg) <= Rational(42, 100);
  std::ostringstream d;
  d << "seats " << r.seat_counts.a << "-" << r.seat_counts.b << "-" << r.seat_counts.ties
    << " delta=" << to_double(r.delta) << " min_pp=" << (r.min_pp ? r.min_pp->value() : 0.0)
    << " eg=" << to_string(r.eg) << " (" << to_double(r.eg) << ")";
  return {ok, d.str()};
}

Outcome tradeoff_panel() {
  const auto tally = generate_lattice_electorate(kReference).tally(24);
  AnnealConfig low;
  low.pp_floor = 0.10;
  low.delta_cap = 0.05;
  low.steps = 1'000'000;
  const auto res = anneal(tally, 5, low);
  const auto r = make_report(tally, res.plan);
  const bool low_ok = abs(r.eg) <= Rational(5, 100) && r.min_pp && r.min_pp->value() >= 0.10 &&
                      validate_partition(res.plan).empty();

  Rational best_high = 1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AnnealConfig high = low;
    high.pp_floor = 0.70;
    high.seed = seed;
    const auto h = anneal(tally, 5, high);
    best_high = std::min(best_high, abs(make_report(tally, h.plan).eg));
  }
  const bool high_ok = best_high >= Rational(30, 100);
  std::ostringstream d;
  d << "floor0.10: |eg|=" << to_double(abs(r.eg)) << " min_pp=" << (r.min_pp ? r.min_pp->value() : 0.0)
    << " delta=" << to_double(r.delta) << "; floor0.70 best|eg| over 5 seeds=" << to_double(best_high);
  return {low_ok && high_ok, d.str()};
}

Outcome oracle_soundness() {
  const TheoremParams p{0.1, 25, 0.1, 0.2, 2};
  const auto w = construct_witness(p);
  std::int64_t survivors = 0, counterexamples = 0, assignments = 0;
  for (int g = 2; g <= 4; ++g) {
    const auto s = brute_force_oracle(Electorate::lattice_tally(w.lattice(), g), 2, p.delta, p.C);
    survivors += s.survivors;
    counterexamples += s.survivors - s.a_sweeps;
    assignments += s.assignments;
  }
  std::ostringstream d;
  d << "assignments=" << assignments << " survivors=" << survivors
    << " counterexamples=" << counterexamples;
  return {survivors > 0 && counterexamples == 0, d.str()};
}

Outcome witness_sweep() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int invariant_failures = 0, eligible = 0, certified = 0;
  for (int i = 0; i < 50; ++i) {
    const TheoremParams p{0.5 * u(rng), 16 + 84 * u(rng), 0.02 + 0.45 * u(rng),
                          0.05 + 0.9 * u(rng), 2 + static_cast<int>(rng() % 7)};
    const auto w = construct_witness(p);
    if (!check_witness(w, p).all()) ++invariant_failures;
    const auto tally = Electorate::lattice_tally(w.lattice(), 24);
    const auto plan = shortest_splitline(tally, p.k);
    const auto c = verify_witness(w, p, plan, tally);
    if (c.balance_ok && c.compactness_ok) {
      ++eligible;
      certified += c.verdict == CertificationReport::Verdict::EfficiencyViolated;
    }
  }
  std::ostringstream d;
  d << "invariant_failures=" << invariant_failures << " eligible_plans=" << eligible
    << " certified=" << certified;
  return {invariant_failures == 0 && certified == eligible && eligible > 0, d.str()};
}

Outcome bound_formulas() {
  const bool eg = eg_lower_bound(Rational(1, 5)) == Rational(-1, 3);
  const bool f = min_perimeter_F(0, 2) == 0.5;
  bool monotone = true;
  double prev = -1e300;
  for (int i = 0; i < 100; ++i) {
    const double eps = std::pow(10.0, -0.06 * i);
    const double r = ratio_bound(0.5, 17, eps);
    monotone = monotone && r > prev;
    prev = r;
  }
  std::ostringstream d;
  d << "eg_lower_bound(1/5)=" << to_string(eg_lower_bound(Rational(1, 5)))
    << " F(0,2)=" << min_perimeter_F(0, 2) << " monotone=" << monotone;
  return {eg && f && monotone, d.str()};
}

Outcome seventy_nine() {
  bool sweep = true;
  for (int i = 0; i < 1000; ++i) {
    const Rational v = Rational(79, 100) + Rational(21, 100) * Rational(i, 999);
    sweep = sweep && simplified_eg(v, 1) >= Rational(8, 100);
  }
  const auto e = generate_lattice_electorate(kReference);
  const auto tally = e.tally(24);
  std::mt19937_64 rng(79);
  const int ks[] = {1, 2, 3, 4, 6, 8, 9, 12, 16, 18};
  int close = 0;
  Rational worst_ratio = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = ks[trial % 10];
    std::vector<DistrictId> ids(576);
    for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = static_cast<DistrictId>(c % k) + 1;
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto counts = district_counts(tally, CellPartition(24, k, ids));
    const Seats s = seats(counts);
    const Rational v(e.a_count(), e.total());
    const Rational share = (Rational(s.a) + Rational(s.ties, 2)) / k;
    const Rational diff = abs(efficiency_gap(counts) - simplified_eg(v, share));
    const Rational bound(k, 2 * e.total());
    close += diff <= bound;
    worst_ratio = std::max(worst_ratio, diff / bound);
  }
  std::ostringstream d;
  d << "sweep=" << sweep << " within_k/2P=" << close << "/100 worst_ratio=" << to_double(worst_ratio);
  return {sweep && close == 100, d.str()};
}

using Cells = std::vector<std::pair<int, int>>;

Cells normalize(Cells cells) {
  int r0 = cells[0].first, c0 = cells[0].second;
  for (const auto& [r, c] : cells) {
    r0 = std::min(r0, r);
    c0 = std::min(c0, c);
  }
  for (auto& [r, c] : cells) {
    r -= r0;
    c -= c0;
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

Outcome metric_invariants() {
  std::mt19937_64 rng(9);
  const auto e = generate_lattice_electorate(kReference);
  const auto swapped = e.swapped();
  bool eg_bounded = true, antisymmetric = true, areas = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int g = 1 + static_cast<int>(rng() % 24);
    const int k = 1 + static_cast<int>(rng() % std::min(9, g * g));
    std::vector<DistrictId> ids(CellPartition::cell_count_for(g));
    for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = static_cast<DistrictId>(c % k) + 1;
    std::shuffle(ids.begin(), ids.end(), rng);
    const CellPartition plan(g, k, ids);
    const Rational eg = efficiency_gap(e, plan);
    eg_bounded = eg_bounded && abs(eg) <= Rational(1, 2);
    antisymmetric = antisymmetric && efficiency_gap(swapped, plan) == -eg;
    Rational sum = 0;
    for (const auto& s : all_district_shapes(plan)) sum += s.area();
    areas = areas && sum == 1;
  }

  // Every polyomino up to 6 cells, embedded in an 8x8 raster.
  std::vector<std::set<Cells>> by_size(7);
  by_size[1].insert({{0, 0}});
  for (int n = 1; n < 6; ++n)
    for (const auto& poly : by_size[n])
      for (const auto& [r, c] : poly) {
        const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
          const std::pair<int, int> cell{r + dr[d], c + dc[d]};
          if (std::find(poly.begin(), poly.end(), cell) != poly.end()) continue;
          Cells grown = poly;
          grown.push_back(cell);
          by_size[n + 1].insert(normalize(grown));
        }
      }
  bool pp_ok = true;
  int shapes = 0;
  for (int n = 1; n <= 6; ++n)
    for (const auto& poly : by_size[n]) {
      std::vector<DistrictId> ids(64, 2);
      int rows = 0, cols = 0;
      for (const auto& [r, c] : poly) {
        ids[static_cast<std::size_t>(r + 1) * 8 + c + 1] = 1;
        rows = std::max(rows, r + 1);
        cols = std::max(cols, c + 1);
      }
      const PpScore pp = polsby_popper(district_shape(CellPartition(8, 2, ids), 1));
      const bool square = rows == cols && rows * cols == n;
      pp_ok = pp_ok && pp.pi_multiple <= Rational(1, 4) &&
              (pp.pi_multiple == Rational(1, 4)) == square;
      ++shapes;
    }
  std::ostringstream d;
  d << "eg_bounded=" << eg_bounded << " antisymmetric=" << antisymmetric << " areas=" << areas
    << " pp_polyominoes=" << pp_ok << " (" << shapes << " shapes)";
  return {eg_bounded && antisymmetric && areas && pp_ok && shapes == 307, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"reference_generation", generation},
      {"whole_square_eg", whole_square},
      {"splitline_panel", splitline_panel},
      {"tradeoff_panel", tradeoff_panel},
      {"oracle_soundness", oracle_soundness},
      {"witness_sweep", witness_sweep},
      {"bound_formulas", bound_formulas},
      {"seventy_nine_percent", seventy_nine},
      {"metric_invariants", metric_invariants},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
