//
//  analysis.hpp — ruc
//
//  VMS / GAP metrics, the analytical bound interval, its closed-form
//  approximations, and the (epsilon, lambda) experiment sweep.
//

#ifndef RUC_ANALYSIS_HPP
#define RUC_ANALYSIS_HPP

#include <span>
#include <string>
#include <vector>

#include "ruc/instance.hpp"
#include "ruc/milp.hpp"
#include "ruc/risk.hpp"
#include "ruc/scenario_tree.hpp"

namespace ruc {

// alpha_lo = min_i {a_i + b_i q_min_i} / max_i {q_max_i}
// alpha_hi = max_i {a_i + b_i q_max_i} / min_i {q_min_i}
// Throws ValidationError when some q_min = 0 (alpha_hi undefined).
std::pair<double, double> alpha_coefficients(const Instance& inst);

struct BoundInputs {
  double alpha_lo = 0.0;  // alpha_*
  double alpha_hi = 0.0;  // alpha^*
  double d_max = 0.0;     // sum_t max-node demand at t
  double rho_d = 0.0;     // composite risk of the demand process
};

struct Theorem1Bounds {
  double lo = 0.0;  // alpha_* D_max - alpha^* rho(D)
  double hi = 0.0;  // alpha^* D_max - alpha_* rho(D)
  BoundInputs inputs;
};

// Checks the three structural assumptions behind the bound interval:
//  1. a covering generator j* with q_min <= demand <= q_max on every node
//     and no minimum up/down time,
//  2. bounded nonnegative demand,
//  3. linear stationary costs (c = 0) and zero start-up/shut-down costs.
// Returns an empty string when satisfied, else a description naming the
// violated assumption.
std::string check_vms_assumptions(const Instance& inst, const ScenarioTree& tree);

// With enforce_assumptions the interval is a certified VMS enclosure
// (throws ValidationError naming the violated assumption otherwise);
// without it the numbers are a diagnostic only.
Theorem1Bounds theorem1_bounds(const Instance& inst, const ScenarioTree& tree,
                               const RiskSpec& spec, bool enforce_assumptions);

struct AlmostBand {
  double low = 0.0, mid = 0.0, high = 0.0;  // alpha (D_max - rho) at alpha_lo, midpoint, alpha_hi
};

AlmostBand approx_almost(double alpha_lo, double alpha_hi, double d_max, double rho_d);

// alpha * T * (1 - lambda/4) * Delta
double approx_final(double alpha, int periods, double lambda, double delta);

// D_max - rho(D) for T independent stages whose error term is a discrete
// uniform fan of `points` equi-spaced values on [-delta, delta], evaluated
// with the conditional mean-upper semideviation stage by stage.  Converges
// to T * (1 - lambda/4) * delta as points grows.
double uniform_fan_gap(int stages, double delta, int points, double lambda);

// --- experiment sweep ---------------------------------------------------------

struct CellResult {
  double epsilon = 0.0, lambda = 0.0;
  double z_ts = 0.0, z_ms = 0.0, z_rh = 0.0;
  double vms_abs = 0.0, vms_pct = 0.0;
  double gap_abs = 0.0, gap_pct = 0.0;
  double bound_lo = 0.0, bound_hi = 0.0;
  double time_ts_s = 0.0, time_ms_s = 0.0, time_rh_s = 0.0;
  double gap_ts = 0.0, gap_ms = 0.0;  // achieved solver gaps
  std::string error;                  // nonempty when the cell failed

  // Sign tolerance for VMS/GAP assertions: differences of independently
  // solved optima inherit both solver gaps.
  double slack() const;
};

struct SweepOptions {
  SolveOptions solver;
  int segments = 4;
  int workers = 1;
  std::string cache_dir;  // empty: no caching
};

// One cell: build the tree at epsilon, solve TS and MS, run the rolling
// horizon, fill in metrics and the (diagnostic) bound interval.
CellResult run_cell(const Instance& inst, double epsilon, double lambda,
                    const SweepOptions& opts);

// Full grid in (epsilon-major, lambda-minor) order; cells are independent
// and restartable via the cell cache.  Per-cell failures are recorded in
// the cell, not fatal.
std::vector<CellResult> run_sweep(const Instance& inst, std::span<const double> eps_grid,
                                  std::span<const double> lambda_grid, const SweepOptions& opts);

// CSV with header
// epsilon,lambda,z_ts,z_ms,z_rh,vms_abs,vms_pct,gap_abs,gap_pct,bound_lo,bound_hi,time_ts_s,time_ms_s,time_rh_s
std::string results_csv(std::span<const CellResult> cells);

struct SweepSummary {
  double mean_vms_pct = 0.0, max_vms_pct = 0.0;
  double mean_gap_pct = 0.0, max_gap_pct = 0.0;
  int vms_rows_nonincreasing_in_lambda = 0;  // of eps rows
  int vms_cols_nondecreasing_in_eps = 0;     // of lambda columns
  int eps_count = 0, lambda_count = 0;
  int failed_cells = 0;
};

SweepSummary summarize(std::span<const CellResult> cells);

}  // namespace ruc

#endif
