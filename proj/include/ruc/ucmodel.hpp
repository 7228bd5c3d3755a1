//
//  ucmodel.hpp — ruc
//
//  Translation of Instance + ScenarioTree + RiskSpec into the deterministic,
//  two-stage (TS) and multi-stage (MS) MILPs: piecewise-linear production
//  costs, demand/capacity rows, min-up/min-down windows, start-up/shut-down
//  indicators and ramp-rate couplings, plus the risk epigraph over the tree.
//

#ifndef RUC_UCMODEL_HPP
#define RUC_UCMODEL_HPP

#include <array>
#include <string>
#include <vector>

#include "ruc/instance.hpp"
#include "ruc/milp.hpp"
#include "ruc/policy.hpp"
#include "ruc/risk.hpp"
#include "ruc/scenario_tree.hpp"

namespace ruc {

// Piecewise-linear over-approximation of g(v) = b v + c v^2 on
// [q_min, q_max] with equal-length segments and secant slopes.  Convexity
// (c >= 0) makes the slopes nondecreasing, so per-segment fill variables
// gated by the commitment need no extra binaries under minimization.
struct PiecewiseCost {
  double q_min = 0.0, q_max = 0.0;
  double cost_at_min = 0.0;          // g(q_min)
  std::vector<double> breakpoints;   // K+1 points, q_min..q_max
  std::vector<double> slopes;        // K secant slopes, nondecreasing
  bool degenerate = false;           // q_min == q_max: single fixed point

  int segments() const { return static_cast<int>(slopes.size()); }
  double segment_length() const { return degenerate ? 0.0 : breakpoints[1] - breakpoints[0]; }
  // Piecewise value for v in [q_min, q_max] (the while-on production cost).
  double evaluate(double v) const;
};

PiecewiseCost piecewise_segments(const Generator& gen, int segments = 4);

// A built model plus the symbol tables needed to read solutions back.
// All tables are node-resolved: for two-stage/deterministic modes the u/y/z
// entries of every node of a period alias the same period-level variable.
struct ModelArtifacts {
  MilpModel model;
  ModelMode mode = ModelMode::kMultiStage;
  int num_generators = 0;
  int num_nodes = 0;
  int segments = 4;
  std::vector<std::vector<int>> u, y, z;               // [gen][node] -> var id
  std::vector<std::vector<int>> v;                     // [gen][node] -> var id
  std::vector<std::vector<std::vector<int>>> fill;     // [gen][node][k] -> var id (empty if degenerate)
  std::vector<int> theta;                              // [node] -> var id (empty for deterministic)
  std::vector<int> risk_m;                             // [node] -> mean var id (-1 at leaves)
  std::vector<std::vector<int>> risk_s;                // [node][child idx] -> semidev var id

  // Sidecar symbol table: JSON text mapping "u[i,n]"-style semantic names
  // to the LP variable names used by export_lp_text.
  std::string symbol_sidecar() const;
};

// Decisions pinned by equality rows (rolling-horizon history).
struct FixedDecisions {
  struct PeriodFix { int gen = 0; int period = 1; double value = 0.0; };
  struct NodeFix { int gen = 0; int node = 0; double value = 0.0; };
  std::vector<PeriodFix> u, y, z;  // commitment/indicator fixes (TS indexing)
  std::vector<NodeFix> v;          // dispatch fixes
};

// Single-path deterministic model; `demand_path` has length T.
ModelArtifacts build_deterministic(const Instance& inst, const std::vector<double>& demand_path,
                                   int segments = 4);

// Multi-stage: every u/v/y/z indexed by (generator, node).
ModelArtifacts build_ms(const Instance& inst, const ScenarioTree& tree, const RiskSpec& spec,
                        int segments = 4);

// Two-stage: u/y/z indexed by (generator, period) and shared by all nodes of
// that period; v and fills per node.  `fixed` pins history for RH sub-solves.
ModelArtifacts build_ts(const Instance& inst, const ScenarioTree& tree, const RiskSpec& spec,
                        int segments = 4, const FixedDecisions* fixed = nullptr);

// Read a solved model back into a per-node policy.  Binaries are rounded
// when within 1e-6 of {0,1}; anything farther is a PolicyError.
Policy extract_policy(const ModelArtifacts& art, const MilpSolution& sol, const ScenarioTree& tree);

// Complete variable assignment induced by a feasible policy (fills loaded
// in slope order, cost-to-go variables from the risk recursion); usable as
// a solver warm start for the artifact's model.
std::vector<double> policy_variable_values(const ModelArtifacts& art, const ScenarioTree& tree,
                                           const Instance& inst, const Policy& pol,
                                           const RiskSpec& spec);

}  // namespace ruc

#endif
