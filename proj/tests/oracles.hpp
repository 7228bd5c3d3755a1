//
//  oracles.hpp — test-only oracles and generators
//
//  Independent reference implementations used to validate the model
//  builders: exhaustive commitment enumeration with a first-principles
//  dispatch LP, random toy instances with guaranteed recourse, random
//  trees, and instances satisfying the analytical-bound assumptions.
//

#ifndef RUC_TESTS_ORACLES_HPP
#define RUC_TESTS_ORACLES_HPP

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "ruc/instance.hpp"
#include "ruc/milp.hpp"
#include "ruc/policy.hpp"
#include "ruc/risk.hpp"
#include "ruc/scenario_tree.hpp"
#include "ruc/ucmodel.hpp"

namespace ruc::testing {

// ---------------------------------------------------------------- trees ----

inline ScenarioTree chain_tree(const std::vector<double>& demands) {
  ScenarioTree t;
  t.add_root(demands.at(0));
  int prev = 0;
  for (size_t i = 1; i < demands.size(); ++i) prev = t.add_child(prev, 1.0, demands[i]);
  t.finalize();
  return t;
}

// Random tree with bounded depth/branching; demands in [lo, hi].
inline ScenarioTree random_tree(std::mt19937_64& rng, int depth, int max_children, double lo,
                                double hi) {
  std::uniform_real_distribution<double> dem(lo, hi);
  std::uniform_int_distribution<int> kids(1, max_children);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  ScenarioTree t;
  t.add_root(dem(rng));
  std::vector<int> frontier = {0};
  for (int d = 1; d < depth; ++d) {
    std::vector<int> next;
    for (int n : frontier) {
      int k = kids(rng);
      std::vector<double> p(k);
      double tot = 0;
      for (auto& x : p) {
        x = mass(rng);
        tot += x;
      }
      for (int c = 0; c < k; ++c) next.push_back(t.add_child(n, p[c] / tot, dem(rng)));
    }
    frontier = std::move(next);
  }
  t.finalize();
  return t;
}

// ------------------------------------------------------------- instances ----

// Small instance with a covering generator so every commitment enumeration
// admits feasible dispatch.
inline Instance random_toy_instance(std::mt19937_64& rng, int max_gens = 2, int max_periods = 3,
                                    bool allow_branch = true) {
  std::uniform_int_distribution<int> gens_d(1, max_gens), periods_d(2, max_periods);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.horizon = periods_d(rng);
  int I = gens_d(rng);

  double dem_lo = 10.0 + 20.0 * unit(rng);
  double dem_hi = dem_lo * (1.3 + 0.5 * unit(rng));
  for (int t = 0; t < inst.horizon; ++t)
    inst.base_demand.push_back(dem_lo + (dem_hi - dem_lo) * unit(rng));

  for (int g = 0; g < I; ++g) {
    Generator gen;
    gen.id = g + 1;
    gen.fixed_cost_a = 1.0 + 20.0 * unit(rng);
    gen.prod_cost_b = 0.5 + 4.0 * unit(rng);
    gen.prod_cost_c = unit(rng) < 0.5 ? 0.0 : 0.05 * unit(rng);
    if (g == 0) {
      // covering generator: spans the whole demand range even at +eps
      gen.q_min = 1.0;
      gen.q_max = 2.0 * dem_hi;
      gen.min_up = 0;
      gen.min_down = 0;
    } else {
      gen.q_min = 2.0 + 5.0 * unit(rng);
      gen.q_max = gen.q_min + 5.0 + 30.0 * unit(rng);
      gen.min_up = rng() % 2;
      gen.min_down = rng() % 2;
    }
    gen.startup_rate = gen.q_max;
    gen.rampup_rate = gen.q_max;
    gen.shutdown_rate = gen.q_max;
    gen.rampdown_rate = gen.q_max;
    gen.startup_cost = 10.0 * unit(rng);
    gen.shutdown_cost = unit(rng) < 0.5 ? 0.0 : 5.0 * unit(rng);
    inst.generators.push_back(gen);
  }
  inst.initial_state.resize(I);
  for (int g = 0; g < I; ++g) inst.initial_state[g].elapsed_down = inst.generators[g].min_down;

  if (allow_branch && inst.horizon >= 2 && unit(rng) < 0.8) {
    std::uniform_int_distribution<int> bp(2, inst.horizon);
    inst.scenario.branch_periods = {bp(rng)};
    inst.scenario.epsilon = 0.1 + 0.3 * unit(rng);
  } else {
    inst.scenario.epsilon = 0.0;
  }
  return inst;
}

// Instance satisfying the bound assumptions: linear stationary costs, no
// start-up/shut-down costs, and a free-cycling generator covering the whole
// demand range.
inline Instance random_assumption_instance(std::mt19937_64& rng, double dem_lo, double dem_hi,
                                           int periods, int num_gens) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.horizon = periods;
  for (int t = 0; t < periods; ++t)
    inst.base_demand.push_back(dem_lo + (dem_hi - dem_lo) * unit(rng));
  for (int g = 0; g < num_gens; ++g) {
    Generator gen;
    gen.id = g + 1;
    gen.fixed_cost_a = 1.0 + 10.0 * unit(rng);
    gen.prod_cost_b = 1.0 + 5.0 * unit(rng);
    gen.prod_cost_c = 0.0;
    if (g == 0) {
      gen.q_min = 0.5 * dem_lo;
      gen.q_max = 1.6 * dem_hi;
      gen.min_up = 0;
      gen.min_down = 0;
    } else {
      gen.q_min = 0.2 * dem_lo + 0.3 * dem_lo * unit(rng);
      gen.q_max = gen.q_min + dem_hi * unit(rng);
      gen.min_up = rng() % 3;
      gen.min_down = rng() % 3;
    }
    gen.startup_rate = gen.q_max;
    gen.rampup_rate = gen.q_max;
    gen.shutdown_rate = gen.q_max;
    gen.rampdown_rate = gen.q_max;
    gen.startup_cost = 0.0;
    gen.shutdown_cost = 0.0;
    inst.generators.push_back(gen);
  }
  inst.initial_state.resize(num_gens);
  for (int g = 0; g < num_gens; ++g)
    inst.initial_state[g].elapsed_down = inst.generators[g].min_down;
  return inst;
}

// ------------------------------------------------ exhaustive enumeration ----

// Commitment assignment checker mirroring the printed window constraints.
inline bool commitments_feasible(const Instance& inst, const ScenarioTree& tree,
                                 const std::vector<std::vector<int>>& u /*[node][gen]*/) {
  const int T = tree.horizon();
  for (int g = 0; g < inst.num_generators(); ++g) {
    const Generator& gen = inst.generators[g];
    const GeneratorState& s0 = inst.initial_state[g];
    int hold_on = s0.on ? std::max(0, gen.min_up - s0.elapsed_up) : 0;
    int hold_off = !s0.on ? std::max(0, gen.min_down - s0.elapsed_down) : 0;
    for (int n = 0; n < tree.size(); ++n) {
      const TreeNode& node = tree.node(n);
      int up = node.parent < 0 ? (s0.on ? 1 : 0) : u[node.parent][g];
      if (node.period <= hold_on && u[n][g] != 1) return false;
      if (node.period <= hold_off && u[n][g] != 0) return false;
      // windows
      std::vector<int> frontier = {n};
      for (int tau = node.period + 1; tau <= std::min(node.period + gen.min_up, T); ++tau) {
        std::vector<int> next;
        for (int q : frontier)
          for (int c : tree.node(q).children) next.push_back(c);
        for (int m : next)
          if (u[n][g] - up > u[m][g]) return false;
        frontier = std::move(next);
      }
      frontier = {n};
      for (int tau = node.period + 1; tau <= std::min(node.period + gen.min_down, T); ++tau) {
        std::vector<int> next;
        for (int q : frontier)
          for (int c : tree.node(q).children) next.push_back(c);
        for (int m : next)
          if (up - u[n][g] > 1 - u[m][g]) return false;
        frontier = std::move(next);
      }
    }
  }
  return true;
}

// Dispatch LP for a fixed commitment assignment, built from first
// principles (demand, piecewise fills, ramps, risk epigraph), minimizing
// the composite risk of the dispatch costs.  Returns the risk value or
// nullopt when infeasible.
inline std::optional<double> dispatch_risk_value(const Instance& inst, const ScenarioTree& tree,
                                                 const std::vector<std::vector<int>>& u,
                                                 const RiskSpec& spec, int segments = 4) {
  const int N = tree.size(), I = inst.num_generators();
  MilpModel::Builder b;
  std::vector<PiecewiseCost> pw;
  for (int g = 0; g < I; ++g) pw.push_back(piecewise_segments(inst.generators[g], segments));

  // y/z are the exact transition indicators of the fixed commitments.
  std::vector<std::vector<int>> y(N, std::vector<int>(I, 0)), z(N, std::vector<int>(I, 0));
  for (int n = 0; n < N; ++n)
    for (int g = 0; g < I; ++g) {
      int up = tree.node(n).parent < 0 ? (inst.initial_state[g].on ? 1 : 0)
                                       : u[tree.node(n).parent][g];
      y[n][g] = std::max(0, u[n][g] - up);
      z[n][g] = std::max(0, up - u[n][g]);
    }

  std::vector<std::vector<int>> vv(N, std::vector<int>(I, -1));
  std::vector<std::vector<std::vector<int>>> ff(N, std::vector<std::vector<int>>(I));
  for (int n = 0; n < N; ++n)
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      vv[n][g] = b.add_continuous("v" + std::to_string(n) + "_" + std::to_string(g), 0.0,
                                  gen.q_max * u[n][g]);
      if (!pw[g].degenerate && u[n][g] == 1)
        for (int k = 0; k < pw[g].segments(); ++k)
          ff[n][g].push_back(b.add_continuous(
              "f" + std::to_string(n) + "_" + std::to_string(g) + "_" + std::to_string(k), 0.0,
              pw[g].segment_length()));
    }

  for (int n = 0; n < N; ++n) {
    const TreeNode& node = tree.node(n);
    LinExpr dem;
    for (int g = 0; g < I; ++g) dem.add(vv[n][g], 1.0);
    b.add_row(dem, RowSense::kGe, node.demand);
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      if (u[n][g] == 1) {
        LinExpr def{{vv[n][g], 1.0}};
        for (int id : ff[n][g]) def.add(id, -1.0);
        b.add_row(def, RowSense::kEq, gen.q_min);
      } else {
        b.add_row(LinExpr{{vv[n][g], 1.0}}, RowSense::kEq, 0.0);
      }
      double vp_const = node.parent < 0 ? inst.initial_state[g].output : 0.0;
      int up = node.parent < 0 ? (inst.initial_state[g].on ? 1 : 0) : u[node.parent][g];
      LinExpr rup{{vv[n][g], 1.0}};
      if (node.parent >= 0) rup.add(vv[node.parent][g], -1.0);
      b.add_row(rup, RowSense::kLe,
                vp_const + gen.startup_rate * y[n][g] + gen.rampup_rate * up);
      LinExpr rdo{{vv[n][g], -1.0}};
      if (node.parent >= 0) rdo.add(vv[node.parent][g], 1.0);
      b.add_row(rdo, RowSense::kLe,
                -vp_const + gen.shutdown_rate * z[n][g] + gen.rampdown_rate * u[n][g]);
    }
  }

  // risk epigraph over theta with fixed commitment costs as offsets
  std::vector<int> theta(N);
  for (int n = 0; n < N; ++n)
    theta[n] = b.add_continuous("th" + std::to_string(n), -kInf, kInf);
  std::vector<double> fixed_cost(N, 0.0);
  for (int n = 0; n < N; ++n)
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      fixed_cost[n] += (gen.fixed_cost_a + pw[g].cost_at_min) * u[n][g] +
                       gen.startup_cost * y[n][g] + gen.shutdown_cost * z[n][g];
    }
  for (int n = 0; n < N; ++n) {
    const TreeNode& node = tree.node(n);
    LinExpr cost;
    for (int g = 0; g < I; ++g)
      for (size_t k = 0; k < ff[n][g].size(); ++k) cost.add(ff[n][g][k], pw[g].slopes[k]);
    if (node.children.empty()) {
      LinExpr row{{theta[n], 1.0}};
      for (const auto& t : cost.terms()) row.add(t.var, -t.coef);
      b.add_row(row, RowSense::kEq, fixed_cost[n]);
      continue;
    }
    int m = b.add_continuous("m" + std::to_string(n), -kInf, kInf);
    LinExpr mdef{{m, 1.0}};
    for (int c : node.children) mdef.add(theta[c], -tree.node(c).cond_prob);
    b.add_row(mdef, RowSense::kEq, 0.0);
    LinExpr tdef{{theta[n], 1.0}, {m, -1.0}};
    for (int c : node.children) {
      int s = b.add_continuous("s" + std::to_string(n) + "_" + std::to_string(c), 0.0, kInf);
      b.add_row(LinExpr{{theta[c], 1.0}, {m, -1.0}, {s, -1.0}}, RowSense::kLe, 0.0);
      tdef.add(s, -spec.effective_lambda() * tree.node(c).cond_prob);
    }
    for (const auto& t : cost.terms()) tdef.add(t.var, -t.coef);
    b.add_row(tdef, RowSense::kEq, fixed_cost[n]);
  }
  b.set_obj_coef(theta[0], 1.0);

  MilpSolution sol = solve(b.build(), {.backend = "bnb"});
  if (sol.status != SolveStatus::kOptimal) return std::nullopt;
  return sol.objective;
}

// Exhaustive multi-stage optimum: enumerate node-wise commitments, solve
// dispatch for each, take the minimum.
inline std::optional<double> enumerate_ms_optimum(const Instance& inst, const ScenarioTree& tree,
                                                  const RiskSpec& spec, int segments = 4) {
  const int N = tree.size(), I = inst.num_generators();
  const int bits = N * I;
  if (bits > 20) throw std::logic_error("enumeration oracle limited to 2^20 assignments");
  std::optional<double> best;
  for (long mask = 0; mask < (1L << bits); ++mask) {
    std::vector<std::vector<int>> u(N, std::vector<int>(I, 0));
    for (int k = 0; k < bits; ++k)
      if (mask & (1L << k)) u[k / I][k % I] = 1;
    if (!commitments_feasible(inst, tree, u)) continue;
    auto value = dispatch_risk_value(inst, tree, u, spec, segments);
    if (value && (!best || *value < *best)) best = value;
  }
  return best;
}

// Exhaustive two-stage optimum: commitments restricted to period-constant.
inline std::optional<double> enumerate_ts_optimum(const Instance& inst, const ScenarioTree& tree,
                                                  const RiskSpec& spec, int segments = 4) {
  const int N = tree.size(), I = inst.num_generators(), T = tree.horizon();
  const int bits = T * I;
  if (bits > 20) throw std::logic_error("enumeration oracle limited to 2^20 assignments");
  std::optional<double> best;
  for (long mask = 0; mask < (1L << bits); ++mask) {
    std::vector<std::vector<int>> u(N, std::vector<int>(I, 0));
    for (int n = 0; n < N; ++n)
      for (int g = 0; g < I; ++g) {
        int k = (tree.node(n).period - 1) * I + g;
        u[n][g] = (mask & (1L << k)) ? 1 : 0;
      }
    if (!commitments_feasible(inst, tree, u)) continue;
    auto value = dispatch_risk_value(inst, tree, u, spec, segments);
    if (value && (!best || *value < *best)) best = value;
  }
  return best;
}

}  // namespace ruc::testing

#endif
