//
//  policy.hpp — ruc
//
//  Tree-indexed commitment/dispatch policies, their evaluation under the
//  composite risk measure, and the rolling-horizon procedure.
//

#ifndef RUC_POLICY_HPP
#define RUC_POLICY_HPP

#include <string>
#include <vector>

#include "ruc/milp.hpp"
#include "ruc/risk.hpp"
#include "ruc/scenario_tree.hpp"

namespace ruc {

// Nonanticipativity structure of a model or policy.
enum class ModelMode { kDeterministic, kTwoStage, kMultiStage };

struct Policy {
  enum class Provenance { kTs, kMs, kRollingHorizon, kExternal };

  ModelMode mode = ModelMode::kMultiStage;
  Provenance provenance = Provenance::kExternal;
  // Node-major tables, [node][generator].
  std::vector<std::vector<int>> u, y, z;
  std::vector<std::vector<double>> v;
};

// Feasibility-checks the policy on the tree (demand, capacity, ramps,
// min-up/down along every path, start/stop indicators, initial conditions),
// then evaluates per-node costs with the piecewise-linear production cost
// and returns the composite risk of the cost process.
// Throws PolicyError listing violated rows when infeasible.
double evaluate_policy(const Instance& inst, const ScenarioTree& tree, const Policy& pol,
                       const RiskSpec& spec, int segments = 4);

struct RollingHorizonOptions {
  SolveOptions solver;
  int segments = 4;
  // Re-solve at every period instead of only at information-revelation
  // nodes.  Same policy value on trees where no information arrives between
  // revelations; exposed for the equivalence check.
  bool solve_every_period = false;
  // Optional feasible policy (e.g. the solved TS policy) used to warm-start
  // the sub-solves.
  const Policy* warm_hint = nullptr;
};

struct RollingHorizonResult {
  Policy policy;
  double value = 0.0;  // z^RH
  int num_solves = 0;
  double wall_time_s = 0.0;
};

// Traverse the tree from the root; at each revelation node solve a
// two-stage model over the remaining horizon with the fixed history imposed,
// then fix this solve's decisions up to the period before the next
// revelation.  1 + 2 + 4 + 8 = 15 solves on the bundled tree.
RollingHorizonResult rolling_horizon(const Instance& inst, const ScenarioTree& tree,
                                     const RiskSpec& spec, const RollingHorizonOptions& opts = {});

// One row per (node, generator): "node_id period gen u v y z", tab-separated.
std::string dump_policy(const ScenarioTree& tree, const Policy& pol);

}  // namespace ruc

#endif
