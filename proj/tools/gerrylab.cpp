// gerrylab command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 domain error. Errors print one
// JSON line on stderr: {"error": message, "kind": "usage"|"domain", "code": n}.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gerrylab/certifier.hpp"
#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/http_api.hpp"
#include "gerrylab/io.hpp"
#include "gerrylab/metrics.hpp"
#include "gerrylab/optimizer.hpp"
#include "gerrylab/oracle.hpp"
#include "gerrylab/splitline.hpp"

namespace {

using namespace gerrylab;

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(const std::string& kind, int code, const std::string& message) {
  std::cerr << json{{"error", message}, {"kind", kind}, {"code", code}}.dump() << '\n';
  return code;
}

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

struct ElectorateSource {
  std::string file;
  std::optional<std::int64_t> n, l, a, b;
  std::string pattern = "checkerboard";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--electorate", file, "Electorate file (JSON)");
    cmd->add_option("--n", n, "Lattice: epsilon-squares per side");
    cmd->add_option("--l", l, "Lattice: voters per epsilon-square side");
    cmd->add_option("--a", a, "Lattice: A voters per epsilon-square");
    cmd->add_option("--b", b, "Lattice: B voters per epsilon-square");
    cmd->add_option("--pattern", pattern, "Lattice slot pattern")
        ->check(CLI::IsMember({"checkerboard", "row_major"}));
  }

  bool inline_lattice() const { return n || l || a || b; }

  LatticeParams lattice() const {
    if (!n || !l || !a || !b) throw UsageError("lattice needs --n, --l, --a and --b");
    return {*n, *l, *a, *b,
            pattern == "row_major" ? LatticePattern::RowMajor : LatticePattern::Checkerboard};
  }

  Electorate load() const {
    if (!file.empty() && inline_lattice()) {
      throw UsageError("give either --electorate or lattice flags, not both");
    }
    if (!file.empty()) return load_electorate(file);
    if (inline_lattice()) return generate_lattice_electorate(lattice());
    throw UsageError("an electorate is required (--electorate or --n/--l/--a/--b)");
  }
};

struct DesiderataFlags {
  DesiderataParams p;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--delta", p.delta, "Balance threshold")->capture_default_str();
    cmd->add_option("--C", p.C, "Compactness constant (perimeter^2 <= C*area)")
        ->capture_default_str();
    cmd->add_option("--alpha", p.alpha, "Efficiency threshold")->capture_default_str();
    cmd->add_option("--beta", p.beta, "Vote-imbalance threshold")->capture_default_str();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gerrylab: redistricting metrics, splitline, annealing and witness certification"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a lattice electorate file");
  LatticeParams gen_params;
  std::string gen_pattern = "checkerboard", gen_out;
  gen->add_option("--n", gen_params.n, "Epsilon-squares per side")->required();
  gen->add_option("--l", gen_params.l, "Voters per epsilon-square side")->required();
  gen->add_option("--a", gen_params.a, "A voters per epsilon-square")->required();
  gen->add_option("--b", gen_params.b, "B voters per epsilon-square")->required();
  gen->add_option("--pattern", gen_pattern, "Slot pattern")
      ->check(CLI::IsMember({"checkerboard", "row_major"}));
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  // split
  auto* split = app.add_subcommand("split", "Shortest-splitline plan");
  ElectorateSource split_src;
  split_src.add_to(split);
  int split_k = 0, split_g = 0;
  SplitlineConfig split_cfg;
  std::string split_out;
  split->add_option("--k", split_k, "Number of districts")->required();
  split->add_option("--g", split_g, "Grid resolution")->required();
  split->add_option("--angle-steps", split_cfg.angle_steps)->capture_default_str();
  split->add_option("--tolerance", split_cfg.population_tolerance)->capture_default_str();
  split->add_option("--balance-slack", split_cfg.balance_slack)->capture_default_str();
  split->add_option("--out", split_out, "Plan file (default stdout)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Report metrics of a plan");
  ElectorateSource metrics_src;
  metrics_src.add_to(metrics);
  DesiderataFlags metrics_des;
  metrics_des.add_to(metrics);
  std::string metrics_plan;
  int metrics_g = 1;
  bool metrics_json = false;
  metrics->add_option("--plan", metrics_plan, "Plan file, or 'whole_square'")->required();
  metrics->add_option("--g", metrics_g, "Resolution for --plan whole_square")
      ->capture_default_str();
  metrics->add_flag("--json", metrics_json, "Print the report as JSON");

  // certify
  auto* certify = app.add_subcommand("certify", "Construct and verify an impossibility witness");
  TheoremParams cert_params;
  int cert_g = 24;
  std::string cert_plan, cert_electorate_out;
  bool cert_json = false;
  certify->add_option("--delta", cert_params.delta)->capture_default_str();
  certify->add_option("--C", cert_params.C)->capture_default_str();
  certify->add_option("--alpha", cert_params.alpha)->capture_default_str();
  certify->add_option("--beta", cert_params.beta)->capture_default_str();
  certify->add_option("--k", cert_params.k)->capture_default_str();
  certify->add_option("--g", cert_g, "Resolution of the splitline plan")->capture_default_str();
  certify->add_option("--plan", cert_plan, "Verify this plan instead of the splitline plan");
  certify->add_option("--write-electorate", cert_electorate_out, "Save the witness electorate");
  certify->add_flag("--json", cert_json, "Print the result as JSON");

  // anneal
  auto* anneal_cmd = app.add_subcommand("anneal", "Simulated annealing / Pareto sweep");
  ElectorateSource anneal_src;
  anneal_src.add_to(anneal_cmd);
  AnnealConfig anneal_cfg;
  int anneal_k = 0, anneal_g = 0;
  std::string anneal_out, anneal_trace, anneal_start;
  std::vector<double> anneal_floors;
  anneal_cmd->add_option("--k", anneal_k)->required();
  anneal_cmd->add_option("--g", anneal_g)->required();
  anneal_cmd->add_option("--seed", anneal_cfg.seed)->capture_default_str();
  anneal_cmd->add_option("--steps", anneal_cfg.steps)->capture_default_str();
  anneal_cmd->add_option("--t-initial", anneal_cfg.t_initial)->capture_default_str();
  anneal_cmd->add_option("--t-final", anneal_cfg.t_final)->capture_default_str();
  anneal_cmd->add_option("--pp-floor", anneal_cfg.pp_floor)->capture_default_str();
  anneal_cmd->add_option("--delta-cap", anneal_cfg.delta_cap)->capture_default_str();
  anneal_cmd->add_option("--w-pop", anneal_cfg.weights.pop)->capture_default_str();
  anneal_cmd->add_option("--w-pp", anneal_cfg.weights.pp)->capture_default_str();
  anneal_cmd->add_option("--w-conn", anneal_cfg.weights.conn)->capture_default_str();
  anneal_cmd->add_option("--trace-every", anneal_cfg.trace_every)->capture_default_str();
  anneal_cmd->add_option("--start", anneal_start, "Starting plan file");
  anneal_cmd->add_option("--floors", anneal_floors, "Pareto sweep over these pp floors")
      ->delimiter(',');
  anneal_cmd->add_option("--out", anneal_out, "Plan file (default stdout)");
  anneal_cmd->add_option("--trace", anneal_trace, "Trace file");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive check on a toy raster");
  ElectorateSource oracle_src;
  oracle_src.add_to(oracle);
  int oracle_g = 0, oracle_k = 0;
  double oracle_delta = 0, oracle_C = 0;
  oracle->add_option("--g", oracle_g)->required();
  oracle->add_option("--k", oracle_k)->required();
  oracle->add_option("--delta", oracle_delta)->required();
  oracle->add_option("--C", oracle_C)->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  std::string serve_host = "127.0.0.1";
  std::optional<int> serve_port;
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", serve_port, "Port (default GERRYLAB_PORT or 8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", kExitUsage, e.what());
  }

  try {
    if (*gen) {
      gen_params.pattern =
          gen_pattern == "row_major" ? LatticePattern::RowMajor : LatticePattern::Checkerboard;
      const Electorate e = generate_lattice_electorate(gen_params);
      emit(gen_out, electorate_to_json(e).dump() + "\n");
      std::cerr << "A=" << e.a_count() << " B=" << e.b_count() << '\n';
    } else if (*split) {
      const Electorate e = split_src.load();
      if (split_g < 1) throw DomainError("g must be positive");
      emit(split_out, write_plan(shortest_splitline(e, split_k, split_g, split_cfg)));
    } else if (*metrics) {
      const Electorate e = metrics_src.load();
      if (metrics_g < 1) throw DomainError("g must be positive");
      const CellPartition plan = metrics_plan == "whole_square"
                                     ? CellPartition::whole_square(metrics_g)
                                     : load_plan(metrics_plan);
      const PlanReport r = make_report(e, plan, metrics_des.p);
      std::cout << (metrics_json ? report_to_json(r).dump(2) + "\n" : report_to_text(r));
    } else if (*certify) {
      const WitnessConfig w = construct_witness(cert_params);
      CellPartition plan;
      CellTally tally;
      if (!cert_plan.empty()) {
        plan = load_plan(cert_plan);
        tally = Electorate::lattice_tally(w.lattice(), plan.resolution());
      } else {
        if (cert_g < 1) throw DomainError("g must be positive");
        tally = Electorate::lattice_tally(w.lattice(), cert_g);
        plan = shortest_splitline(tally, cert_params.k);
      }
      const CertificationReport c = verify_witness(w, cert_params, plan, tally);
      if (!cert_electorate_out.empty()) {
        save_electorate(generate_lattice_electorate(w.lattice()), cert_electorate_out);
      }
      if (cert_json) {
        const json out = {
            {"witness",
             {{"n", w.n}, {"l", w.l}, {"a", w.a}, {"b", w.b},
              {"gamma", rational_to_json(w.gamma)}, {"gamma_target", w.gamma_target},
              {"epsilon", w.epsilon}, {"F", w.F}, {"ratio_bound", w.ratio_bound_value},
              {"eg_bound", rational_to_json(w.eg_bound)},
              {"imbalance", rational_to_json(w.imbalance)}}},
            {"invariants", check_witness(w, cert_params).all()},
            {"balance_ok", c.balance_ok},
            {"compactness_ok", c.compactness_ok},
            {"a_sweep", c.a_sweep},
            {"realized_eg", rational_to_json(c.realized_eg)},
            {"realized_delta", rational_to_json(c.realized_delta)},
            {"min_pp", c.min_pp ? json(c.min_pp->value()) : json(nullptr)},
            {"verdict", to_string(c.verdict)},
            {"detail", c.detail}};
        std::cout << out.dump(2) << '\n';
      } else {
        std::cout << certification_to_text(w, cert_params, c);
      }
    } else if (*anneal_cmd) {
      const Electorate e = anneal_src.load();
      if (anneal_g < 1) throw DomainError("g must be positive");
      const CellTally tally = e.tally(anneal_g);
      if (!anneal_floors.empty()) {
        if (!anneal_start.empty()) throw UsageError("--start cannot be combined with --floors");
        const auto points = pareto_sweep(tally, anneal_k, anneal_floors, anneal_cfg);
        std::cout << pareto_to_text(points);
      } else {
        std::optional<CellPartition> start;
        if (!anneal_start.empty()) start = load_plan(anneal_start);
        const AnnealResult res = anneal(tally, anneal_k, anneal_cfg, std::move(start));
        emit(anneal_out, write_plan(res.plan));
        if (!anneal_trace.empty()) write_file(anneal_trace, trace_to_text(res.trace));
        const PlanReport r = make_report(tally, res.plan);
        std::cerr << "objective=" << res.objective << " feasible=" << res.feasible
                  << " eg=" << to_string(r.eg) << " delta=" << to_string(r.delta)
                  << " min_pp=" << (r.min_pp ? r.min_pp->value() : 0.0) << '\n';
      }
    } else if (*oracle) {
      const Electorate e = oracle_src.load();
      const OracleSummary s = brute_force_oracle(e, oracle_g, oracle_k, oracle_delta, oracle_C);
      std::cout << "assignments " << s.assignments << '\n'
                << "partitions " << s.partitions << '\n'
                << "survivors " << s.survivors << '\n'
                << "a_sweeps " << s.a_sweeps << '\n'
                << "counterexamples " << s.survivors - s.a_sweeps << '\n'
                << "min_abs_eg " << (s.min_abs_eg ? to_string(*s.min_abs_eg) : "none") << '\n';
    } else if (*serve) {
      const int port = serve_port ? *serve_port : service_port();
      SessionRegistry registry;
      httplib::Server server;
      install_routes(server, registry);
      std::cerr << "listening on " << serve_host << ':' << port << '\n';
      if (!server.listen(serve_host, port)) {
        throw DomainError("cannot listen on " + serve_host + ":" + std::to_string(port));
      }
    }
  } catch (const UsageError& e) {
    return fail("usage", kExitUsage, e.what());
  } catch (const DomainError& e) {
    return fail("domain", kExitDomain, e.what());
  } catch (const FormatError& e) {
    return fail("domain", kExitDomain, e.what());
  }
  return 0;
}
