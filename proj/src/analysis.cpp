//
//  analysis.cpp — ruc
//

#include "ruc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ruc/policy.hpp"
#include "ruc/ucmodel.hpp"

namespace ruc {

std::pair<double, double> alpha_coefficients(const Instance& inst) {
  if (inst.generators.empty()) throw ValidationError("alpha_coefficients: no generators");
  double min_start = kInf, max_full = -kInf, max_qmax = 0.0, min_qmin = kInf;
  for (const auto& g : inst.generators) {
    min_start = std::min(min_start, g.fixed_cost_a + g.prod_cost_b * g.q_min);
    max_full = std::max(max_full, g.fixed_cost_a + g.prod_cost_b * g.q_max);
    max_qmax = std::max(max_qmax, g.q_max);
    min_qmin = std::min(min_qmin, g.q_min);
  }
  if (max_qmax <= 0.0) throw ValidationError("alpha_coefficients: fleet has no capacity");
  if (min_qmin <= 0.0)
    throw ValidationError("alpha_coefficients: some q_min = 0, alpha^* undefined");
  return {min_start / max_qmax, max_full / min_qmin};
}

std::string check_vms_assumptions(const Instance& inst, const ScenarioTree& tree) {
  double dmin = kInf, dmax = -kInf;
  for (const auto& n : tree.nodes()) {
    dmin = std::min(dmin, n.demand);
    dmax = std::max(dmax, n.demand);
  }
  if (dmin < 0.0) return "Assumption 2 violated: negative net load in the tree";

  bool covering = false;
  for (const auto& g : inst.generators)
    if (g.min_up == 0 && g.min_down == 0 && g.q_min <= dmin && g.q_max >= dmax) covering = true;
  if (!covering)
    return "Assumption 1 violated: no generator with zero min up/down time covers "
           "[" + std::to_string(dmin) + ", " + std::to_string(dmax) + "] MW";

  for (const auto& g : inst.generators) {
    if (g.prod_cost_c != 0.0)
      return "Assumption 3 violated: generator " + std::to_string(g.id) +
             " has quadratic cost c > 0";
    if (g.startup_cost != 0.0 || g.shutdown_cost != 0.0)
      return "Assumption 3 violated: generator " + std::to_string(g.id) +
             " has nonzero start-up/shut-down cost";
  }
  return "";
}

Theorem1Bounds theorem1_bounds(const Instance& inst, const ScenarioTree& tree,
                               const RiskSpec& spec, bool enforce_assumptions) {
  if (enforce_assumptions) {
    std::string violated = check_vms_assumptions(inst, tree);
    if (!violated.empty()) throw ValidationError(violated);
  }
  Theorem1Bounds out;
  auto [alo, ahi] = alpha_coefficients(inst);
  out.inputs.alpha_lo = alo;
  out.inputs.alpha_hi = ahi;
  // d_t^max realized as the max node demand at period t over the built tree.
  double d_max = 0.0;
  for (int t = 1; t <= tree.horizon(); ++t) {
    double m = 0.0;
    for (int n : tree.stage(t)) m = std::max(m, tree.node(n).demand);
    d_max += m;
  }
  out.inputs.d_max = d_max;
  std::vector<double> demands;
  demands.reserve(tree.size());
  for (const auto& n : tree.nodes()) demands.push_back(n.demand);
  out.inputs.rho_d = composite_risk(tree, demands, spec);
  out.lo = alo * d_max - ahi * out.inputs.rho_d;
  out.hi = ahi * d_max - alo * out.inputs.rho_d;
  return out;
}

AlmostBand approx_almost(double alpha_lo, double alpha_hi, double d_max, double rho_d) {
  double gap = d_max - rho_d;
  return {alpha_lo * gap, 0.5 * (alpha_lo + alpha_hi) * gap, alpha_hi * gap};
}

double approx_final(double alpha, int periods, double lambda, double delta) {
  if (lambda < 0.0 || lambda > 1.0) throw ValidationError("approx_final: lambda outside [0,1]");
  if (delta < 0.0) throw ValidationError("approx_final: delta must be >= 0");
  return alpha * periods * (1.0 - lambda / 4.0) * delta;
}

double uniform_fan_gap(int stages, double delta, int points, double lambda) {
  if (stages < 1 || points < 2) throw ValidationError("uniform_fan_gap: bad stage/point count");
  // One fan: equi-spaced error values on [-delta, delta], equal mass.  By
  // independence and translational equivariance the nested measure adds one
  // identical term per stage, so the per-stage fan is evaluated once.
  std::vector<double> values(points), probs(points, 1.0 / points);
  for (int j = 0; j < points; ++j)
    values[j] = -delta + 2.0 * delta * j / (points - 1);
  double stage_rho = conditional_musd(values, probs, lambda);  // = lambda * E[xi_+]
  // Per stage: d^max - rho contribution = delta - stage_rho.
  return stages * (delta - stage_rho);
}

double CellResult::slack() const {
  return std::abs(z_ts) * gap_ts + std::abs(z_ms) * gap_ms + 1e-9;
}

CellResult run_cell(const Instance& inst, double epsilon, double lambda,
                    const SweepOptions& opts) {
  CellResult cell;
  cell.epsilon = epsilon;
  cell.lambda = lambda;
  try {
    ScenarioTree tree = build_tree(inst, epsilon);
    RiskSpec spec{RiskKind::kMeanUpperSemideviation, lambda};

    // A time-limited solve that carries an incumbent is usable: the achieved
    // gap is recorded in the cell and inflates its slack() accordingly.
    auto usable = [](const MilpSolution& s) {
      return s.status == SolveStatus::kOptimal ||
             (s.status == SolveStatus::kTimeLimit && !s.values.empty());
    };

    ModelArtifacts ts = build_ts(inst, tree, spec, opts.segments);
    MilpSolution ts_sol = solve(ts.model, opts.solver);
    if (!usable(ts_sol))
      throw SolveError("TS solve ended with status " + to_string(ts_sol.status));
    cell.z_ts = ts_sol.objective;
    cell.time_ts_s = ts_sol.wall_time_s;
    cell.gap_ts = ts_sol.rel_gap;
    Policy ts_policy = extract_policy(ts, ts_sol, tree);

    // The TS policy is MS-feasible; hand it to the MS solve as a start.
    ModelArtifacts ms = build_ms(inst, tree, spec, opts.segments);
    SolveOptions ms_solver = opts.solver;
    ms_solver.warm_start = policy_variable_values(ms, tree, inst, ts_policy, spec);
    MilpSolution ms_sol = solve(ms.model, ms_solver);
    if (!usable(ms_sol))
      throw SolveError("MS solve ended with status " + to_string(ms_sol.status));
    cell.z_ms = ms_sol.objective;
    cell.time_ms_s = ms_sol.wall_time_s;
    cell.gap_ms = ms_sol.rel_gap;

    RollingHorizonOptions rh_opts;
    rh_opts.solver = opts.solver;
    rh_opts.segments = opts.segments;
    rh_opts.warm_hint = &ts_policy;
    RollingHorizonResult rh = rolling_horizon(inst, tree, spec, rh_opts);
    cell.z_rh = rh.value;
    cell.time_rh_s = rh.wall_time_s;

    cell.vms_abs = cell.z_ts - cell.z_ms;
    cell.vms_pct = cell.z_ms != 0.0 ? cell.vms_abs / cell.z_ms : 0.0;
    cell.gap_abs = cell.z_rh - cell.z_ms;
    cell.gap_pct = cell.z_ms != 0.0 ? cell.gap_abs / cell.z_ms : 0.0;

    Theorem1Bounds bounds = theorem1_bounds(inst, tree, spec, false);
    cell.bound_lo = bounds.lo;
    cell.bound_hi = bounds.hi;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

namespace {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string cell_cache_key(const Instance& inst, double eps, double lambda,
                           const SweepOptions& opts) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), "|eps=%.17g|lambda=%.17g|backend=%s|gap=%.17g|K=%d|tl=%.17g",
                eps, lambda, opts.solver.backend.c_str(), opts.solver.rel_gap, opts.segments,
                opts.solver.time_limit_s);
  std::uint64_t h = fnv1a64(serialize_instance(inst) + buf);
  std::snprintf(buf, sizeof(buf), "cell_%016llx.json", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json cell_to_json(const CellResult& c) {
  return {{"epsilon", c.epsilon}, {"lambda", c.lambda},   {"z_ts", c.z_ts},
          {"z_ms", c.z_ms},       {"z_rh", c.z_rh},       {"vms_abs", c.vms_abs},
          {"vms_pct", c.vms_pct}, {"gap_abs", c.gap_abs}, {"gap_pct", c.gap_pct},
          {"bound_lo", c.bound_lo}, {"bound_hi", c.bound_hi}, {"time_ts_s", c.time_ts_s},
          {"time_ms_s", c.time_ms_s}, {"time_rh_s", c.time_rh_s}, {"gap_ts", c.gap_ts},
          {"gap_ms", c.gap_ms},   {"error", c.error}};
}

bool cell_from_json(const nlohmann::json& j, CellResult* c) {
  try {
    c->epsilon = j.at("epsilon").get<double>();
    c->lambda = j.at("lambda").get<double>();
    c->z_ts = j.at("z_ts").get<double>();
    c->z_ms = j.at("z_ms").get<double>();
    c->z_rh = j.at("z_rh").get<double>();
    c->vms_abs = j.at("vms_abs").get<double>();
    c->vms_pct = j.at("vms_pct").get<double>();
    c->gap_abs = j.at("gap_abs").get<double>();
    c->gap_pct = j.at("gap_pct").get<double>();
    c->bound_lo = j.at("bound_lo").get<double>();
    c->bound_hi = j.at("bound_hi").get<double>();
    c->time_ts_s = j.at("time_ts_s").get<double>();
    c->time_ms_s = j.at("time_ms_s").get<double>();
    c->time_rh_s = j.at("time_rh_s").get<double>();
    c->gap_ts = j.at("gap_ts").get<double>();
    c->gap_ms = j.at("gap_ms").get<double>();
    c->error = j.at("error").get<std::string>();
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

std::vector<CellResult> run_sweep(const Instance& inst, std::span<const double> eps_grid,
                                  std::span<const double> lambda_grid, const SweepOptions& opts) {
  if (eps_grid.empty() || lambda_grid.empty()) throw ValidationError("run_sweep: empty grid");
  struct Task {
    double eps, lambda;
    std::string cache_file;
  };
  std::vector<Task> tasks;
  for (double e : eps_grid)
    for (double l : lambda_grid) {
      Task t{e, l, ""};
      if (!opts.cache_dir.empty())
        t.cache_file = opts.cache_dir + "/" + cell_cache_key(inst, e, l, opts);
      tasks.push_back(t);
    }
  if (!opts.cache_dir.empty()) std::filesystem::create_directories(opts.cache_dir);

  std::vector<CellResult> cells(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&] {
    for (;;) {
      size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task& task = tasks[k];
      CellResult cell;
      bool cached = false;
      if (!task.cache_file.empty()) {
        std::ifstream in(task.cache_file);
        if (in) {
          try {
            nlohmann::json j = nlohmann::json::parse(in);
            cached = cell_from_json(j, &cell) && cell.error.empty();
          } catch (...) {
            cached = false;
          }
        }
      }
      if (!cached) {
        cell = run_cell(inst, task.eps, task.lambda, opts);
        if (!task.cache_file.empty() && cell.error.empty()) {
          std::lock_guard<std::mutex> lock(io_mutex);
          std::ofstream out(task.cache_file);
          out << cell_to_json(cell).dump(2) << "\n";
        }
      }
      cells[k] = std::move(cell);
    }
  };

  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return cells;
}

std::string results_csv(std::span<const CellResult> cells) {
  std::ostringstream out;
  out << "epsilon,lambda,z_ts,z_ms,z_rh,vms_abs,vms_pct,gap_abs,gap_pct,bound_lo,bound_hi,"
         "time_ts_s,time_ms_s,time_rh_s\n";
  char buf[512];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf),
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.3f,%.3f,"
                  "%.3f\n",
                  c.epsilon, c.lambda, c.z_ts, c.z_ms, c.z_rh, c.vms_abs, c.vms_pct, c.gap_abs,
                  c.gap_pct, c.bound_lo, c.bound_hi, c.time_ts_s, c.time_ms_s, c.time_rh_s);
    out << buf;
  }
  return out.str();
}

SweepSummary summarize(std::span<const CellResult> cells) {
  SweepSummary s;
  std::vector<double> eps, lambda;
  for (const auto& c : cells) {
    if (std::find(eps.begin(), eps.end(), c.epsilon) == eps.end()) eps.push_back(c.epsilon);
    if (std::find(lambda.begin(), lambda.end(), c.lambda) == lambda.end())
      lambda.push_back(c.lambda);
    if (!c.error.empty()) s.failed_cells += 1;
  }
  std::sort(eps.begin(), eps.end());
  std::sort(lambda.begin(), lambda.end());
  s.eps_count = static_cast<int>(eps.size());
  s.lambda_count = static_cast<int>(lambda.size());

  auto find_cell = [&](double e, double l) -> const CellResult* {
    for (const auto& c : cells)
      if (c.epsilon == e && c.lambda == l && c.error.empty()) return &c;
    return nullptr;
  };

  int n = 0;
  for (const auto& c : cells) {
    if (!c.error.empty()) continue;
    n += 1;
    s.mean_vms_pct += c.vms_pct;
    s.mean_gap_pct += c.gap_pct;
    s.max_vms_pct = std::max(s.max_vms_pct, c.vms_pct);
    s.max_gap_pct = std::max(s.max_gap_pct, c.gap_pct);
  }
  if (n > 0) {
    s.mean_vms_pct /= n;
    s.mean_gap_pct /= n;
  }

  // Trend counts on VMS(%): nondecreasing in eps down each lambda column,
  // nonincreasing in lambda along each eps row, with solver-slack leeway.
  for (double l : lambda) {
    bool mono = true;
    for (size_t i = 1; i < eps.size(); ++i) {
      const CellResult* a = find_cell(eps[i - 1], l);
      const CellResult* b = find_cell(eps[i], l);
      if (!a || !b) { mono = false; break; }
      double leeway = (a->slack() + b->slack()) / std::max(1.0, std::abs(b->z_ms));
      if (b->vms_pct < a->vms_pct - leeway) { mono = false; break; }
    }
    if (mono) s.vms_cols_nondecreasing_in_eps += 1;
  }
  for (double e : eps) {
    bool mono = true;
    for (size_t i = 1; i < lambda.size(); ++i) {
      const CellResult* a = find_cell(e, lambda[i - 1]);
      const CellResult* b = find_cell(e, lambda[i]);
      if (!a || !b) { mono = false; break; }
      double leeway = (a->slack() + b->slack()) / std::max(1.0, std::abs(b->z_ms));
      if (b->vms_pct > a->vms_pct + leeway) { mono = false; break; }
    }
    if (mono) s.vms_rows_nonincreasing_in_lambda += 1;
  }
  return s;
}

}  // namespace ruc
