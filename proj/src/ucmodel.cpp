//
//  ucmodel.cpp — ruc
//
//  The deterministic, two-stage and multi-stage unit-commitment MILPs share
//  one build core; they differ only in where the commitment variables live
//  (per period vs. per tree node) and in the objective (plain sum vs. the
//  nested risk epigraph).
//

#include "ruc/ucmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace ruc {

double PiecewiseCost::evaluate(double v) const {
  if (degenerate) return cost_at_min;
  double x = std::min(std::max(v, q_min), q_max);
  double cost = cost_at_min;
  for (size_t k = 0; k < slopes.size(); ++k) {
    double lo = breakpoints[k], hi = breakpoints[k + 1];
    if (x <= lo) break;
    cost += slopes[k] * (std::min(x, hi) - lo);
  }
  return cost;
}

PiecewiseCost piecewise_segments(const Generator& gen, int segments) {
  if (segments < 1) throw ValidationError("piecewise_segments: need at least one segment");
  if (gen.q_min < 0 || gen.q_min > gen.q_max)
    throw ValidationError("piecewise_segments: invalid production range");
  PiecewiseCost pw;
  pw.q_min = gen.q_min;
  pw.q_max = gen.q_max;
  pw.cost_at_min = gen.production_cost(gen.q_min);
  if (gen.q_min == gen.q_max) {
    pw.degenerate = true;
    pw.breakpoints = {gen.q_min};
    return pw;
  }
  double len = (gen.q_max - gen.q_min) / segments;
  for (int k = 0; k <= segments; ++k) pw.breakpoints.push_back(gen.q_min + k * len);
  pw.breakpoints.back() = gen.q_max;  // exact endpoint
  for (int k = 0; k < segments; ++k) {
    // Secant slope of g(v) = b v + c v^2 over [v_k, v_{k+1}] is b + c (v_k + v_{k+1}).
    pw.slopes.push_back(gen.prod_cost_b + gen.prod_cost_c * (pw.breakpoints[k] + pw.breakpoints[k + 1]));
  }
  return pw;
}

namespace {

std::string gn(const char* stem, int gen_id, const std::string& suffix) {
  return std::string(stem) + "_g" + std::to_string(gen_id) + "_" + suffix;
}

struct BuildCore {
  const Instance& inst;
  const ScenarioTree& tree;
  ModelMode mode;
  const RiskSpec* spec;  // null for deterministic
  int K;
  const FixedDecisions* fixed;

  BuildCore(const Instance& i, const ScenarioTree& t, ModelMode m, const RiskSpec* s, int k,
            const FixedDecisions* f)
      : inst(i), tree(t), mode(m), spec(s), K(k), fixed(f) {}

  MilpModel::Builder b;
  std::vector<PiecewiseCost> pw;
  int I = 0, N = 0, T = 0;

  // commitment/indicator variables; period tables used in TS/det mode
  std::vector<std::vector<int>> u_period, y_period, z_period;  // [gen][t-1]
  std::vector<std::vector<int>> u, y, z;                       // [gen][node], node-resolved
  std::vector<std::vector<int>> v;                             // [gen][node]
  std::vector<std::vector<std::vector<int>>> fill;             // [gen][node][k]
  std::vector<int> theta;                                      // [node]

  bool per_node() const { return mode == ModelMode::kMultiStage; }

  void make_variables() {
    I = inst.num_generators();
    N = tree.size();
    T = tree.horizon();
    for (int g = 0; g < I; ++g) pw.push_back(piecewise_segments(inst.generators[g], K));

    auto make_binary_family = [&](const char* stem, std::vector<std::vector<int>>& node_tab,
                                  std::vector<std::vector<int>>& period_tab) {
      node_tab.assign(I, std::vector<int>(N, -1));
      if (per_node()) {
        for (int g = 0; g < I; ++g)
          for (int n = 0; n < N; ++n)
            node_tab[g][n] = b.add_binary(gn(stem, inst.generators[g].id, "n" + std::to_string(n)));
      } else {
        period_tab.assign(I, std::vector<int>(T, -1));
        for (int g = 0; g < I; ++g)
          for (int t = 1; t <= T; ++t)
            period_tab[g][t - 1] =
                b.add_binary(gn(stem, inst.generators[g].id, "t" + std::to_string(t)));
        for (int g = 0; g < I; ++g)
          for (int n = 0; n < N; ++n) node_tab[g][n] = period_tab[g][tree.node(n).period - 1];
      }
    };
    make_binary_family("u", u, u_period);
    make_binary_family("y", y, y_period);
    make_binary_family("z", z, z_period);

    v.assign(I, std::vector<int>(N, -1));
    fill.assign(I, std::vector<std::vector<int>>(N));
    for (int g = 0; g < I; ++g) {
      for (int n = 0; n < N; ++n) {
        std::string node_tag = "n" + std::to_string(n);
        v[g][n] = b.add_continuous(gn("v", inst.generators[g].id, node_tag), 0.0,
                                   inst.generators[g].q_max);
        if (!pw[g].degenerate) {
          double len = pw[g].segment_length();
          for (int k = 0; k < pw[g].segments(); ++k)
            fill[g][n].push_back(b.add_continuous(
                gn("f", inst.generators[g].id, node_tag + "_" + std::to_string(k + 1)), 0.0, len));
        }
      }
    }
  }

  // Stage cost of node n:  sum_i (a_i + g_i(q_min)) u + sum_k slope_k f + SU y + SD z.
  LinExpr node_cost(int n) const {
    LinExpr e;
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      e.add(u[g][n], gen.fixed_cost_a + pw[g].cost_at_min);
      for (int k = 0; k < static_cast<int>(fill[g][n].size()); ++k)
        e.add(fill[g][n][k], pw[g].slopes[k]);
      e.add(y[g][n], gen.startup_cost);
      e.add(z[g][n], gen.shutdown_cost);
    }
    return e;
  }

  void dispatch_rows() {
    for (int n = 0; n < N; ++n) {
      const TreeNode& node = tree.node(n);
      std::string ntag = "n" + std::to_string(n);
      // demand:  sum_i v_in >= d_n
      LinExpr dem;
      for (int g = 0; g < I; ++g) dem.add(v[g][n], 1.0);
      b.add_row(dem, RowSense::kGe, node.demand, "dem_" + ntag);

      for (int g = 0; g < I; ++g) {
        const Generator& gen = inst.generators[g];
        std::string vtag = gn("v", gen.id, ntag);
        if (pw[g].degenerate) {
          // v = q_min u  (production pinned when committed)
          b.add_row(LinExpr{{v[g][n], 1.0}, {u[g][n], -gen.q_min}}, RowSense::kEq, 0.0,
                    "def_" + vtag);
        } else {
          // v = q_min u + sum_k f_k ;  f_k <= len * u
          LinExpr def{{v[g][n], 1.0}, {u[g][n], -gen.q_min}};
          for (int id : fill[g][n]) def.add(id, -1.0);
          b.add_row(def, RowSense::kEq, 0.0, "def_" + vtag);
          double len = pw[g].segment_length();
          for (int k = 0; k < static_cast<int>(fill[g][n].size()); ++k)
            b.add_row(LinExpr{{fill[g][n][k], 1.0}, {u[g][n], -len}}, RowSense::kLe, 0.0,
                      "cap_" + vtag + "_" + std::to_string(k + 1));
        }

        // ramp / start-up rate:  v_n - v_parent <= V' y_n + V u_parent
        const GeneratorState& s0 = inst.initial_state[g];
        if (node.parent < 0) {
          double rhs = s0.output + gen.rampup_rate * (s0.on ? 1.0 : 0.0);
          b.add_row(LinExpr{{v[g][n], 1.0}, {y[g][n], -gen.startup_rate}}, RowSense::kLe, rhs,
                    "rup_" + vtag);
          double rhs2 = -s0.output;
          b.add_row(LinExpr{{v[g][n], -1.0}, {z[g][n], -gen.shutdown_rate}, {u[g][n], -gen.rampdown_rate}},
                    RowSense::kLe, rhs2, "rdo_" + vtag);
        } else {
          int p = node.parent;
          b.add_row(LinExpr{{v[g][n], 1.0},
                            {v[g][p], -1.0},
                            {y[g][n], -gen.startup_rate},
                            {u[g][p], -gen.rampup_rate}},
                    RowSense::kLe, 0.0, "rup_" + vtag);
          // ramp / shut-down rate:  v_parent - v_n <= B' z_n + B u_n
          b.add_row(LinExpr{{v[g][p], 1.0},
                            {v[g][n], -1.0},
                            {z[g][n], -gen.shutdown_rate},
                            {u[g][n], -gen.rampdown_rate}},
                    RowSense::kLe, 0.0, "rdo_" + vtag);
        }
      }
    }
  }

  // Start/stop indicators and min-up/min-down windows on the commitment
  // variables.  Node-indexed in MS mode (per path through the tree),
  // period-indexed otherwise.
  void commitment_rows() {
    if (per_node()) {
      for (int g = 0; g < I; ++g) {
        const Generator& gen = inst.generators[g];
        const GeneratorState& s0 = inst.initial_state[g];
        double u0 = s0.on ? 1.0 : 0.0;
        for (int n = 0; n < N; ++n) {
          const TreeNode& node = tree.node(n);
          std::string tag = gn("", gen.id, "n" + std::to_string(n));
          int p = node.parent;
          // y_n >= u_n - u_parent ;  z_n >= u_parent - u_n
          if (p < 0) {
            b.add_row(LinExpr{{u[g][n], 1.0}, {y[g][n], -1.0}}, RowSense::kLe, u0, "sup" + tag);
            b.add_row(LinExpr{{u[g][n], -1.0}, {z[g][n], -1.0}}, RowSense::kLe, -u0, "sdo" + tag);
          } else {
            b.add_row(LinExpr{{u[g][n], 1.0}, {u[g][p], -1.0}, {y[g][n], -1.0}}, RowSense::kLe,
                      0.0, "sup" + tag);
            b.add_row(LinExpr{{u[g][p], 1.0}, {u[g][n], -1.0}, {z[g][n], -1.0}}, RowSense::kLe,
                      0.0, "sdo" + tag);
          }
          // windows: iterate descendants of n within the min-up (min-down) span
          auto for_descendants = [&](int span, auto&& fn) {
            if (span <= 0) return;
            int t = node.period;
            int tau_max = std::min(t + span, T);
            std::vector<int> frontier = {n};
            for (int tau = t + 1; tau <= tau_max; ++tau) {
              std::vector<int> next;
              for (int q : frontier)
                for (int c : tree.node(q).children) next.push_back(c);
              for (int mnode : next) fn(mnode);
              frontier = std::move(next);
            }
          };
          for_descendants(gen.min_up, [&](int mnode) {
            // u_n - u_parent <= u_m
            if (p < 0) {
              b.add_row(LinExpr{{u[g][n], 1.0}, {u[g][mnode], -1.0}}, RowSense::kLe, u0,
                        "upt" + tag + "_" + std::to_string(mnode));
            } else {
              b.add_row(LinExpr{{u[g][n], 1.0}, {u[g][p], -1.0}, {u[g][mnode], -1.0}},
                        RowSense::kLe, 0.0, "upt" + tag + "_" + std::to_string(mnode));
            }
          });
          for_descendants(gen.min_down, [&](int mnode) {
            // u_parent - u_n <= 1 - u_m
            if (p < 0) {
              b.add_row(LinExpr{{u[g][n], -1.0}, {u[g][mnode], 1.0}}, RowSense::kLe, 1.0 - u0,
                        "dot" + tag + "_" + std::to_string(mnode));
            } else {
              b.add_row(LinExpr{{u[g][p], 1.0}, {u[g][n], -1.0}, {u[g][mnode], 1.0}},
                        RowSense::kLe, 1.0, "dot" + tag + "_" + std::to_string(mnode));
            }
          });
        }
      }
    } else {
      for (int g = 0; g < I; ++g) {
        const Generator& gen = inst.generators[g];
        const GeneratorState& s0 = inst.initial_state[g];
        double u0 = s0.on ? 1.0 : 0.0;
        for (int t = 1; t <= T; ++t) {
          std::string tag = gn("", gen.id, "t" + std::to_string(t));
          int ut = u_period[g][t - 1];
          int up = t > 1 ? u_period[g][t - 2] : -1;
          if (t == 1) {
            b.add_row(LinExpr{{ut, 1.0}, {y_period[g][0], -1.0}}, RowSense::kLe, u0, "sup" + tag);
            b.add_row(LinExpr{{ut, -1.0}, {z_period[g][0], -1.0}}, RowSense::kLe, -u0, "sdo" + tag);
          } else {
            b.add_row(LinExpr{{ut, 1.0}, {up, -1.0}, {y_period[g][t - 1], -1.0}}, RowSense::kLe,
                      0.0, "sup" + tag);
            b.add_row(LinExpr{{up, 1.0}, {ut, -1.0}, {z_period[g][t - 1], -1.0}}, RowSense::kLe,
                      0.0, "sdo" + tag);
          }
          for (int tau = t + 1; tau <= std::min(t + gen.min_up, T); ++tau) {
            if (t == 1) {
              b.add_row(LinExpr{{ut, 1.0}, {u_period[g][tau - 1], -1.0}}, RowSense::kLe, u0,
                        "upt" + tag + "_" + std::to_string(tau));
            } else {
              b.add_row(LinExpr{{ut, 1.0}, {up, -1.0}, {u_period[g][tau - 1], -1.0}},
                        RowSense::kLe, 0.0, "upt" + tag + "_" + std::to_string(tau));
            }
          }
          for (int tau = t + 1; tau <= std::min(t + gen.min_down, T); ++tau) {
            if (t == 1) {
              b.add_row(LinExpr{{ut, -1.0}, {u_period[g][tau - 1], 1.0}}, RowSense::kLe,
                        1.0 - u0, "dot" + tag + "_" + std::to_string(tau));
            } else {
              b.add_row(LinExpr{{up, 1.0}, {ut, -1.0}, {u_period[g][tau - 1], 1.0}},
                        RowSense::kLe, 1.0, "dot" + tag + "_" + std::to_string(tau));
            }
          }
        }
      }
    }
  }

  // Residual obligations from the initial state are pinned with equality rows
  // so binaries keep {0,1} bounds.
  void initial_residual_rows() {
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      const GeneratorState& s0 = inst.initial_state[g];
      int hold_on = s0.on ? std::max(0, gen.min_up - s0.elapsed_up) : 0;
      int hold_off = !s0.on ? std::max(0, gen.min_down - s0.elapsed_down) : 0;
      auto pin = [&](int t, double val) {
        std::string tag = gn("init", gen.id, "t" + std::to_string(t));
        if (per_node()) {
          for (int n : tree.stage(t))
            b.add_row(LinExpr{{u[g][n], 1.0}}, RowSense::kEq, val,
                      tag + "_n" + std::to_string(n));
        } else {
          b.add_row(LinExpr{{u_period[g][t - 1], 1.0}}, RowSense::kEq, val, tag);
        }
      };
      for (int t = 1; t <= std::min(hold_on, T); ++t) pin(t, 1.0);
      for (int t = 1; t <= std::min(hold_off, T); ++t) pin(t, 0.0);
    }
  }

  std::vector<int> risk_m;
  std::vector<std::vector<int>> risk_s;

  void risk_rows_and_objective() {
    if (mode == ModelMode::kDeterministic) {
      for (int n = 0; n < N; ++n) b.add_obj(node_cost(n));
      return;
    }
    theta.assign(N, -1);
    risk_m.assign(N, -1);
    risk_s.assign(N, {});
    for (int n = 0; n < N; ++n)
      theta[n] = b.add_continuous("th_n" + std::to_string(n), 0.0, kInf);
    for (int n = 0; n < N; ++n) {
      const TreeNode& node = tree.node(n);
      std::string ntag = "n" + std::to_string(n);
      if (node.children.empty()) {
        // theta_leaf = stage cost
        LinExpr e = node_cost(n);
        LinExpr row{{theta[n], 1.0}};
        for (const auto& t : e.terms()) row.add(t.var, -t.coef);
        b.add_row(row, RowSense::kEq, 0.0, "thdef_" + ntag);
        continue;
      }
      std::vector<double> probs;
      for (int c : node.children) probs.push_back(tree.node(c).cond_prob);
      RiskStencil st = epigraph_coefficients(probs, spec->effective_lambda());

      int m_var = b.add_continuous("m_" + ntag, 0.0, kInf);
      risk_m[n] = m_var;
      LinExpr mdef{{m_var, 1.0}};
      for (size_t ci = 0; ci < node.children.size(); ++ci)
        mdef.add(theta[node.children[ci]], -st.child_probs[ci]);
      b.add_row(mdef, RowSense::kEq, 0.0, "mdef_" + ntag);

      LinExpr tdef{{theta[n], 1.0}, {m_var, -1.0}};
      for (size_t ci = 0; ci < node.children.size(); ++ci) {
        int c = node.children[ci];
        int s_var = b.add_continuous("s_" + ntag + "_" + std::to_string(c), 0.0, kInf);
        risk_s[n].push_back(s_var);
        // s_c >= theta_c - m
        b.add_row(LinExpr{{theta[c], 1.0}, {m_var, -1.0}, {s_var, -1.0}}, RowSense::kLe, 0.0,
                  "sdev_" + ntag + "_" + std::to_string(c));
        tdef.add(s_var, -st.lambda * st.child_probs[ci]);
      }
      LinExpr cost = node_cost(n);
      for (const auto& t : cost.terms()) tdef.add(t.var, -t.coef);
      b.add_row(tdef, RowSense::kEq, 0.0, "thdef_" + ntag);
    }
    b.set_obj_coef(theta[tree.root()], 1.0);
  }

  void fixed_rows() {
    if (!fixed) return;
    if (per_node()) throw ModelError("fixed decisions are only supported in two-stage mode");
    auto pin_period = [&](const char* stem, const std::vector<std::vector<int>>& tab,
                          const std::vector<FixedDecisions::PeriodFix>& fixes) {
      for (const auto& f : fixes) {
        if (f.gen < 0 || f.gen >= I || f.period < 1 || f.period > T)
          throw ModelError("fixed decision out of range");
        b.add_row(LinExpr{{tab[f.gen][f.period - 1], 1.0}}, RowSense::kEq, f.value,
                  std::string("fix_") + stem + "_g" + std::to_string(inst.generators[f.gen].id) +
                      "_t" + std::to_string(f.period));
      }
    };
    pin_period("u", u_period, fixed->u);
    pin_period("y", y_period, fixed->y);
    pin_period("z", z_period, fixed->z);
    for (const auto& f : fixed->v) {
      if (f.gen < 0 || f.gen >= I || f.node < 0 || f.node >= N)
        throw ModelError("fixed dispatch out of range");
      b.add_row(LinExpr{{v[f.gen][f.node], 1.0}}, RowSense::kEq, f.value,
                "fix_v_g" + std::to_string(inst.generators[f.gen].id) + "_n" + std::to_string(f.node));
    }
  }

  ModelArtifacts finish() {
    ModelArtifacts art;
    art.mode = mode;
    art.num_generators = I;
    art.num_nodes = N;
    art.segments = K;
    art.u = std::move(u);
    art.y = std::move(y);
    art.z = std::move(z);
    art.v = std::move(v);
    art.fill = std::move(fill);
    art.theta = std::move(theta);
    art.risk_m = std::move(risk_m);
    art.risk_s = std::move(risk_s);
    art.model = b.build();
    return art;
  }
};

ModelArtifacts build_core(const Instance& inst, const ScenarioTree& tree, ModelMode mode,
                          const RiskSpec* spec, int K, const FixedDecisions* fixed) {
  if (!tree.finalized()) throw ValidationError("tree must be finalized");
  if (tree.horizon() != inst.horizon)
    throw ValidationError("tree horizon differs from instance horizon");
  if (inst.initial_state.size() != inst.generators.size())
    throw ValidationError("instance initial_state incomplete");
  BuildCore core(inst, tree, mode, spec, K, fixed);
  core.make_variables();
  core.dispatch_rows();
  core.commitment_rows();
  core.initial_residual_rows();
  core.risk_rows_and_objective();
  core.fixed_rows();
  return core.finish();
}

}  // namespace

ModelArtifacts build_deterministic(const Instance& inst, const std::vector<double>& demand_path,
                                   int segments) {
  if (static_cast<int>(demand_path.size()) != inst.horizon)
    throw ValidationError("demand path length differs from horizon");
  ScenarioTree chain;
  chain.add_root(demand_path[0]);
  int prev = 0;
  for (int t = 2; t <= inst.horizon; ++t) prev = chain.add_child(prev, 1.0, demand_path[t - 1]);
  chain.finalize();
  return build_core(inst, chain, ModelMode::kDeterministic, nullptr, segments, nullptr);
}

ModelArtifacts build_ms(const Instance& inst, const ScenarioTree& tree, const RiskSpec& spec,
                        int segments) {
  return build_core(inst, tree, ModelMode::kMultiStage, &spec, segments, nullptr);
}

ModelArtifacts build_ts(const Instance& inst, const ScenarioTree& tree, const RiskSpec& spec,
                        int segments, const FixedDecisions* fixed) {
  return build_core(inst, tree, ModelMode::kTwoStage, &spec, segments, fixed);
}

Policy extract_policy(const ModelArtifacts& art, const MilpSolution& sol, const ScenarioTree& tree) {
  if (sol.values.empty() ||
      (sol.status != SolveStatus::kOptimal && sol.status != SolveStatus::kGapLimit &&
       sol.status != SolveStatus::kTimeLimit))
    throw PolicyError("extract_policy: no usable solution");
  if (static_cast<int>(sol.values.size()) != art.model.num_vars())
    throw PolicyError("extract_policy: solution does not match model");
  if (tree.size() != art.num_nodes) throw PolicyError("extract_policy: tree does not match model");

  auto binval = [&](int var) {
    double x = sol.values[var];
    double r = std::round(x);
    if (std::abs(x - r) > 1e-6)
      throw PolicyError("extract_policy: binary variable " + art.model.vars()[var].name +
                        " has non-integral value " + std::to_string(x));
    return static_cast<int>(r);
  };

  Policy pol;
  pol.mode = art.mode;
  pol.provenance = art.mode == ModelMode::kTwoStage ? Policy::Provenance::kTs
                   : art.mode == ModelMode::kMultiStage ? Policy::Provenance::kMs
                                                        : Policy::Provenance::kExternal;
  const int N = art.num_nodes, I = art.num_generators;
  pol.u.assign(N, std::vector<int>(I, 0));
  pol.y.assign(N, std::vector<int>(I, 0));
  pol.z.assign(N, std::vector<int>(I, 0));
  pol.v.assign(N, std::vector<double>(I, 0.0));
  for (int g = 0; g < I; ++g) {
    for (int n = 0; n < N; ++n) {
      pol.u[n][g] = binval(art.u[g][n]);
      pol.y[n][g] = binval(art.y[g][n]);
      pol.z[n][g] = binval(art.z[g][n]);
      pol.v[n][g] = sol.values[art.v[g][n]];
    }
  }
  return pol;
}

std::vector<double> policy_variable_values(const ModelArtifacts& art, const ScenarioTree& tree,
                                           const Instance& inst, const Policy& pol,
                                           const RiskSpec& spec) {
  const int N = art.num_nodes, I = art.num_generators;
  if (tree.size() != N || inst.num_generators() != I)
    throw ValidationError("policy_variable_values: shape mismatch");
  std::vector<double> x(art.model.num_vars(), 0.0);
  std::vector<PiecewiseCost> pw;
  for (int g = 0; g < I; ++g) pw.push_back(piecewise_segments(inst.generators[g], art.segments));

  std::vector<double> node_costs(N, 0.0);
  for (int n = 0; n < N; ++n) {
    double cost = 0.0;
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      x[art.u[g][n]] = pol.u[n][g];
      x[art.y[g][n]] = pol.y[n][g];
      x[art.z[g][n]] = pol.z[n][g];
      x[art.v[g][n]] = pol.v[n][g];
      if (pol.u[n][g] == 1) {
        double rem = std::min(std::max(pol.v[n][g] - gen.q_min, 0.0), gen.q_max - gen.q_min);
        double len = pw[g].segment_length();
        for (size_t k = 0; k < art.fill[g][n].size(); ++k) {
          double f = std::min(rem, len);
          x[art.fill[g][n][k]] = f;
          rem -= f;
        }
        cost += gen.fixed_cost_a + pw[g].evaluate(pol.v[n][g]);
      }
      cost += gen.startup_cost * pol.y[n][g] + gen.shutdown_cost * pol.z[n][g];
    }
    node_costs[n] = cost;
  }
  if (art.theta.empty()) return x;

  const double lambda = spec.effective_lambda();
  std::vector<double> value(N, 0.0);
  for (int n = N - 1; n >= 0; --n) {
    const TreeNode& node = tree.node(n);
    if (node.children.empty()) {
      value[n] = node_costs[n];
      x[art.theta[n]] = value[n];
      continue;
    }
    double mean = 0.0;
    for (int c : node.children) mean += tree.node(c).cond_prob * value[c];
    double semidev = 0.0;
    for (size_t ci = 0; ci < node.children.size(); ++ci) {
      int c = node.children[ci];
      double s = std::max(value[c] - mean, 0.0);
      x[art.risk_s[n][ci]] = s;
      semidev += tree.node(c).cond_prob * s;
    }
    x[art.risk_m[n]] = mean;
    value[n] = node_costs[n] + mean + lambda * semidev;
    x[art.theta[n]] = value[n];
  }
  return x;
}

std::string ModelArtifacts::symbol_sidecar() const {
  nlohmann::json doc;
  auto& vars = model.vars();
  auto put = [&](const std::string& key, int var) {
    if (var >= 0) doc[key] = vars[var].name;
  };
  for (int g = 0; g < num_generators; ++g) {
    for (int n = 0; n < num_nodes; ++n) {
      std::string idx = "[" + std::to_string(g + 1) + "," + std::to_string(n) + "]";
      put("u" + idx, u[g][n]);
      put("y" + idx, y[g][n]);
      put("z" + idx, z[g][n]);
      put("v" + idx, v[g][n]);
      for (size_t k = 0; k < fill[g][n].size(); ++k)
        put("v" + idx.substr(0, idx.size() - 1) + "," + std::to_string(k + 1) + "]",
            fill[g][n][k]);
    }
  }
  for (int n = 0; n < num_nodes; ++n)
    if (!theta.empty()) put("theta[" + std::to_string(n) + "]", theta[n]);
  return doc.dump(2) + "\n";
}

}  // namespace ruc
