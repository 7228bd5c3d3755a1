//
//  ruc_main.cpp — command-line front end
//
//  Subcommands: validate, solve-ts, solve-ms, rolling-horizon, bounds,
//  tree, sweep, paper-repro.  With --json a single machine-readable object
//  goes to stdout and all human text to stderr.
//  Exit codes: 0 success, 1 usage error, 2 solver failure, 3 validation
//  failure.
//

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ruc/analysis.hpp"
#include "ruc/instance.hpp"
#include "ruc/milp.hpp"
#include "ruc/policy.hpp"
#include "ruc/risk.hpp"
#include "ruc/scenario_tree.hpp"
#include "ruc/ucmodel.hpp"

namespace {

using nlohmann::json;
using namespace ruc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitValidation = 3;

struct GlobalOpts {
  std::string backend = "auto";
  double rel_gap = 1e-6;
  double time_limit_s = 0.0;  // 0: none
  int workers = 1;
  bool json_out = false;
  std::string config_path;
};

SolveOptions solver_options(const GlobalOpts& g) {
  SolveOptions o;
  o.backend = g.backend;
  o.rel_gap = g.rel_gap;
  if (g.time_limit_s > 0) o.time_limit_s = g.time_limit_s;
  return o;
}

// Env var beats config file; explicit flags beat both (flags are applied
// last by the caller when the user passed them).
void apply_config_and_env(GlobalOpts* g, bool backend_from_flag, bool gap_from_flag) {
  if (!g->config_path.empty()) {
    std::ifstream in(g->config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + g->config_path);
    json cfg = json::parse(in);
    if (cfg.contains("solver")) {
      const json& s = cfg["solver"];
      if (!backend_from_flag && s.contains("backend")) g->backend = s["backend"].get<std::string>();
      if (!gap_from_flag && s.contains("rel_gap")) g->rel_gap = s["rel_gap"].get<double>();
    }
  }
  if (!backend_from_flag) {
    if (const char* env = std::getenv("RAUC_SOLVER")) g->backend = env;
  }
}

void emit(const GlobalOpts& g, const json& obj, const std::string& human) {
  if (g.json_out) {
    std::cout << obj.dump(2) << "\n";
    if (!human.empty()) std::cerr << human;
  } else {
    std::cout << human;
  }
}

std::vector<double> parse_grid(const std::string& text) {
  // "a:b:step" inclusive range or comma-separated list
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a, b, s;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3 || s <= 0)
      throw std::runtime_error("bad grid syntax (want start:stop:step): " + text);
    for (double x = a; x <= b + 1e-12; x += s) out.push_back(std::round(x * 1e9) / 1e9);
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::runtime_error("empty grid: " + text);
  return out;
}

int cmd_validate(const GlobalOpts& g, const std::string& path) {
  Instance inst = load_instance(path);
  ValidationReport rep = validate_instance(inst);
  json items = json::array();
  std::ostringstream human;
  for (const auto& issue : rep.issues) {
    const char* sev = issue.severity == ValidationIssue::Severity::kError ? "error" : "warning";
    items.push_back({{"severity", sev}, {"message", issue.message}});
    human << sev << ": " << issue.message << "\n";
  }
  human << rep.error_count() << " violations, " << rep.warning_count() << " warnings\n";
  emit(g, {{"violations", rep.error_count()}, {"warnings", rep.warning_count()}, {"issues", items}},
       human.str());
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_tree(const GlobalOpts& g, const std::string& path, double epsilon, const std::string& out) {
  Instance inst = load_instance(path);
  ScenarioTree tree = build_tree(inst, epsilon);
  std::string dump = dump_tree(tree);
  if (!out.empty()) {
    std::ofstream f(out);
    f << dump;
  }
  json obj = {{"nodes", tree.size()},
              {"leaves", tree.leaves().size()},
              {"horizon", tree.horizon()},
              {"epsilon", epsilon}};
  emit(g, obj, out.empty() ? dump : "wrote " + out + "\n");
  return kExitOk;
}

int cmd_solve(const GlobalOpts& g, const std::string& path, double epsilon, double lambda,
              bool multi_stage, const std::string& dump_lp, const std::string& dump_pol,
              const std::string& dump_symbols) {
  Instance inst = load_instance(path);
  ScenarioTree tree = build_tree(inst, epsilon);
  RiskSpec spec{RiskKind::kMeanUpperSemideviation, lambda};
  ModelArtifacts art =
      multi_stage ? build_ms(inst, tree, spec) : build_ts(inst, tree, spec);
  if (!dump_lp.empty()) {
    std::ofstream f(dump_lp);
    f << export_lp_text(art.model);
  }
  if (!dump_symbols.empty()) {
    std::ofstream f(dump_symbols);
    f << art.symbol_sidecar();
  }
  MilpSolution sol = solve(art.model, solver_options(g));
  if (sol.status != SolveStatus::kOptimal &&
      !(sol.status == SolveStatus::kTimeLimit && !sol.values.empty())) {
    emit(g, {{"status", to_string(sol.status)}},
         "solve failed: " + to_string(sol.status) + "\n");
    return kExitSolver;
  }
  if (!dump_pol.empty()) {
    Policy pol = extract_policy(art, sol, tree);
    std::ofstream f(dump_pol);
    f << dump_policy(tree, pol);
  }
  const char* which = multi_stage ? "z_ms" : "z_ts";
  std::ostringstream human;
  human.precision(10);
  human << which << " = " << sol.objective << "  (status " << to_string(sol.status) << ", gap "
        << sol.rel_gap << ", " << sol.wall_time_s << " s, " << art.model.num_binaries()
        << " binaries)\n";
  emit(g,
       {{"objective", sol.objective},
        {"status", to_string(sol.status)},
        {"rel_gap", sol.rel_gap},
        {"wall_time_s", sol.wall_time_s},
        {"binaries", art.model.num_binaries()},
        {"epsilon", epsilon},
        {"lambda", lambda}},
       human.str());
  return kExitOk;
}

int cmd_rolling(const GlobalOpts& g, const std::string& path, double epsilon, double lambda,
                double z_ms_in, bool have_zms, bool every_period, const std::string& dump_pol) {
  Instance inst = load_instance(path);
  ScenarioTree tree = build_tree(inst, epsilon);
  RiskSpec spec{RiskKind::kMeanUpperSemideviation, lambda};

  double z_ms = z_ms_in;
  if (!have_zms) {
    ModelArtifacts ms = build_ms(inst, tree, spec);
    MilpSolution sol = solve(ms.model, solver_options(g));
    if (sol.status != SolveStatus::kOptimal &&
        !(sol.status == SolveStatus::kTimeLimit && !sol.values.empty())) {
      emit(g, {{"status", to_string(sol.status)}}, "MS solve failed\n");
      return kExitSolver;
    }
    z_ms = sol.objective;
  }

  RollingHorizonOptions opts;
  opts.solver = solver_options(g);
  opts.solve_every_period = every_period;
  RollingHorizonResult rh = rolling_horizon(inst, tree, spec, opts);
  if (!dump_pol.empty()) {
    std::ofstream f(dump_pol);
    f << dump_policy(tree, rh.policy);
  }
  double gap_abs = rh.value - z_ms;
  double gap_pct = z_ms != 0.0 ? gap_abs / z_ms : 0.0;
  std::ostringstream human;
  human.precision(10);
  human << "z_rh = " << rh.value << "  (" << rh.num_solves << " solves, " << rh.wall_time_s
        << " s)\nGAP = " << gap_abs << " (" << 100.0 * gap_pct << "%) vs z_ms = " << z_ms << "\n";
  emit(g,
       {{"z_rh", rh.value},
        {"z_ms", z_ms},
        {"gap_abs", gap_abs},
        {"gap_pct", gap_pct},
        {"num_solves", rh.num_solves},
        {"wall_time_s", rh.wall_time_s}},
       human.str());
  return kExitOk;
}

int cmd_bounds(const GlobalOpts& g, const std::string& path, double epsilon, double lambda,
               bool enforce) {
  Instance inst = load_instance(path);
  ScenarioTree tree = build_tree(inst, epsilon);
  RiskSpec spec{RiskKind::kMeanUpperSemideviation, lambda};
  Theorem1Bounds b = theorem1_bounds(inst, tree, spec, enforce);
  AlmostBand band = approx_almost(b.inputs.alpha_lo, b.inputs.alpha_hi, b.inputs.d_max,
                                  b.inputs.rho_d);
  std::ostringstream human;
  human.precision(10);
  human << "alpha_* = " << b.inputs.alpha_lo << ", alpha^* = " << b.inputs.alpha_hi << "\n"
        << "D_max = " << b.inputs.d_max << " MW, rho(D) = " << b.inputs.rho_d << "\n"
        << "VMS interval = [" << b.lo << ", " << b.hi << "] $"
        << (enforce ? " (assumptions enforced)" : " (diagnostic)") << "\n"
        << "almost-band = [" << band.low << ", " << band.mid << ", " << band.high << "] $\n";
  emit(g,
       {{"alpha_lo", b.inputs.alpha_lo},
        {"alpha_hi", b.inputs.alpha_hi},
        {"d_max", b.inputs.d_max},
        {"rho_d", b.inputs.rho_d},
        {"bound_lo", b.lo},
        {"bound_hi", b.hi},
        {"almost_low", band.low},
        {"almost_mid", band.mid},
        {"almost_high", band.high}},
       human.str());
  return kExitOk;
}

int run_grid(const GlobalOpts& g, const std::string& path, const std::vector<double>& eps_grid,
             const std::vector<double>& lambda_grid, const std::string& out_dir,
             const std::string& cache_dir, bool repro_summary) {
  Instance inst = load_instance(path);
  SweepOptions opts;
  opts.solver = solver_options(g);
  opts.workers = g.workers;
  opts.cache_dir = cache_dir;
  std::vector<CellResult> cells = run_sweep(inst, eps_grid, lambda_grid, opts);
  std::string csv = results_csv(cells);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir + "/results.csv");
    f << csv;
  }

  SweepSummary s = summarize(cells);
  int solver_failures = s.failed_cells;
  std::ostringstream human;
  char line[256];
  std::snprintf(line, sizeof(line),
                "cells: %zu (%d failed)\nVMS%%: mean %.4f%%  max %.4f%%\nGAP%%: mean %.4f%%  max "
                "%.4f%%\ntrends: VMS nondecreasing in eps for %d/%d lambda columns; "
                "nonincreasing in lambda for %d/%d eps rows\n",
                cells.size(), s.failed_cells, 100 * s.mean_vms_pct, 100 * s.max_vms_pct,
                100 * s.mean_gap_pct, 100 * s.max_gap_pct, s.vms_cols_nondecreasing_in_eps,
                s.lambda_count, s.vms_rows_nonincreasing_in_lambda, s.eps_count);
  human << line;
  if (out_dir.empty()) human << csv;

  json obj = {{"cells", cells.size()},
              {"failed_cells", s.failed_cells},
              {"mean_vms_pct", s.mean_vms_pct},
              {"max_vms_pct", s.max_vms_pct},
              {"mean_gap_pct", s.mean_gap_pct},
              {"max_gap_pct", s.max_gap_pct},
              {"vms_cols_nondecreasing_in_eps", s.vms_cols_nondecreasing_in_eps},
              {"vms_rows_nonincreasing_in_lambda", s.vms_rows_nonincreasing_in_lambda}};
  if (repro_summary) obj["csv"] = out_dir.empty() ? "" : out_dir + "/results.csv";
  emit(g, obj, human.str());
  return solver_failures == 0 ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-averse unit commitment: two-stage vs multi-stage analysis"};
  app.require_subcommand(1);
  GlobalOpts g;
  auto* backend_opt = app.add_option("--backend", g.backend, "solver backend (auto|bnb|highs)");
  auto* gap_opt = app.add_option("--rel-gap", g.rel_gap, "MILP relative gap")->check(CLI::Range(1e-12, 0.1));
  app.add_option("--time-limit", g.time_limit_s, "per-solve time limit in seconds");
  app.add_option("--workers", g.workers, "concurrent sweep cells")->check(CLI::Range(1, 64));
  app.add_flag("--json", g.json_out, "machine-readable output on stdout");
  app.add_option("--config", g.config_path, "JSON config file (flags win)");

  std::string inst_path, out_path, cache_dir, dump_lp, dump_pol, dump_sym;
  double epsilon = 0.1, lambda = 0.0, z_ms_in = 0.0;
  bool enforce = false, every_period = false;
  std::string eps_grid_text = "0.1:0.5:0.1", lambda_grid_text = "0:0.5:0.1";

  auto* c_val = app.add_subcommand("validate", "check an instance file");
  c_val->add_option("instance", inst_path)->required();

  auto* c_tree = app.add_subcommand("tree", "dump the scenario tree");
  c_tree->add_option("instance", inst_path)->required();
  c_tree->add_option("--epsilon", epsilon);
  c_tree->add_option("--out", out_path);

  auto* c_ts = app.add_subcommand("solve-ts", "solve the two-stage model");
  auto* c_ms = app.add_subcommand("solve-ms", "solve the multi-stage model");
  for (auto* c : {c_ts, c_ms}) {
    c->add_option("instance", inst_path)->required();
    c->add_option("--epsilon", epsilon);
    c->add_option("--lambda", lambda)->check(CLI::Range(0.0, 1.0));
    c->add_option("--dump-lp", dump_lp);
    c->add_option("--dump-policy", dump_pol);
    c->add_option("--dump-symbols", dump_sym);
  }

  auto* c_rh = app.add_subcommand("rolling-horizon", "evaluate the rolling-horizon policy");
  c_rh->add_option("instance", inst_path)->required();
  c_rh->add_option("--epsilon", epsilon);
  c_rh->add_option("--lambda", lambda)->check(CLI::Range(0.0, 1.0));
  auto* zms_opt = c_rh->add_option("--zms", z_ms_in, "z_MS reference (skips a fresh MS solve)");
  c_rh->add_flag("--every-period", every_period, "re-solve at every period");
  c_rh->add_option("--dump-policy", dump_pol);

  auto* c_bounds = app.add_subcommand("bounds", "analytical VMS interval and approximations");
  c_bounds->add_option("instance", inst_path)->required();
  c_bounds->add_option("--epsilon", epsilon);
  c_bounds->add_option("--lambda", lambda)->check(CLI::Range(0.0, 1.0));
  c_bounds->add_flag("--enforce-assumptions", enforce);

  auto* c_sweep = app.add_subcommand("sweep", "grid experiment, CSV output");
  c_sweep->add_option("instance", inst_path)->required();
  c_sweep->add_option("--eps", eps_grid_text, "epsilon grid a:b:step or list");
  c_sweep->add_option("--lambda", lambda_grid_text, "lambda grid a:b:step or list");
  c_sweep->add_option("--out", out_path, "output directory");
  c_sweep->add_option("--cache", cache_dir, "cell cache directory");

  auto* c_repro = app.add_subcommand("paper-repro", "canned experiment on the bundled instance");
  c_repro->add_option("--instance", inst_path);
  c_repro->add_option("--out", out_path, "output directory");
  c_repro->add_option("--cache", cache_dir, "cell cache directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    int code = app.exit(e, msg, msg);
    std::cerr << msg.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    apply_config_and_env(&g, backend_opt->count() > 0, gap_opt->count() > 0);
    if (c_val->parsed()) return cmd_validate(g, inst_path);
    if (c_tree->parsed()) return cmd_tree(g, inst_path, epsilon, out_path);
    if (c_ts->parsed()) return cmd_solve(g, inst_path, epsilon, lambda, false, dump_lp, dump_pol, dump_sym);
    if (c_ms->parsed()) return cmd_solve(g, inst_path, epsilon, lambda, true, dump_lp, dump_pol, dump_sym);
    if (c_rh->parsed())
      return cmd_rolling(g, inst_path, epsilon, lambda, z_ms_in, zms_opt->count() > 0,
                         every_period, dump_pol);
    if (c_bounds->parsed()) return cmd_bounds(g, inst_path, epsilon, lambda, enforce);
    if (c_sweep->parsed())
      return run_grid(g, inst_path, parse_grid(eps_grid_text), parse_grid(lambda_grid_text),
                      out_path, cache_dir, false);
    if (c_repro->parsed()) {
      if (inst_path.empty()) inst_path = "data/kazarlis10.json";
      return run_grid(g, inst_path, parse_grid("0.1:0.5:0.1"), parse_grid("0:0.5:0.1"), out_path,
                      cache_dir, true);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
