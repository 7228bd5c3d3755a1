//
//  policy.cpp — ruc
//

#include "ruc/policy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "ruc/ucmodel.hpp"

namespace ruc {

namespace {

constexpr double kTol = 1e-6;

void check_shape(const ScenarioTree& tree, const Instance& inst, const Policy& pol) {
  const size_t N = tree.size(), I = inst.generators.size();
  auto bad = [&](size_t rows, size_t cols) { return rows != N || (rows > 0 && cols != I); };
  if (bad(pol.u.size(), pol.u.empty() ? I : pol.u[0].size()) ||
      bad(pol.v.size(), pol.v.empty() ? I : pol.v[0].size()) ||
      bad(pol.y.size(), pol.y.empty() ? I : pol.y[0].size()) ||
      bad(pol.z.size(), pol.z.empty() ? I : pol.z[0].size()))
    throw PolicyError("policy tables do not match tree/instance shape");
}

}  // namespace

double evaluate_policy(const Instance& inst, const ScenarioTree& tree, const Policy& pol,
                       const RiskSpec& spec, int segments) {
  check_shape(tree, inst, pol);
  const int N = tree.size(), I = inst.num_generators(), T = tree.horizon();
  std::vector<std::string> violations;
  auto violate = [&](const std::string& m) {
    if (violations.size() < 20) violations.push_back(m);
  };

  std::vector<PiecewiseCost> pw;
  for (int g = 0; g < I; ++g) pw.push_back(piecewise_segments(inst.generators[g], segments));

  for (int n = 0; n < N; ++n) {
    const TreeNode& node = tree.node(n);
    std::string ntag = "node " + std::to_string(n);
    double supply = 0.0;
    for (int g = 0; g < I; ++g) supply += pol.v[n][g];
    double dscale = std::max(1.0, node.demand);
    if (supply < node.demand - kTol * dscale)
      violate(ntag + ": demand unmet (" + std::to_string(supply) + " < " +
              std::to_string(node.demand) + ")");

    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      std::string gtag = ntag + " gen " + std::to_string(gen.id);
      int u = pol.u[n][g], y = pol.y[n][g], z = pol.z[n][g];
      double v = pol.v[n][g];
      if ((u != 0 && u != 1) || (y != 0 && y != 1) || (z != 0 && z != 1))
        violate(gtag + ": u/y/z not binary");
      double scale = std::max(1.0, gen.q_max);
      if (u == 0 && std::abs(v) > kTol * scale) violate(gtag + ": output while off");
      if (u == 1 && (v < gen.q_min - kTol * scale || v > gen.q_max + kTol * scale))
        violate(gtag + ": output outside [q_min, q_max]");

      int up;      // parent commitment
      double vp;   // parent output
      if (node.parent < 0) {
        up = inst.initial_state[g].on ? 1 : 0;
        vp = inst.initial_state[g].output;
      } else {
        up = pol.u[node.parent][g];
        vp = pol.v[node.parent][g];
      }
      if (y < u - up) violate(gtag + ": start-up indicator below u_t - u_{t-1}");
      if (z < up - u) violate(gtag + ": shut-down indicator below u_{t-1} - u_t");
      if (v - vp > gen.startup_rate * y + gen.rampup_rate * up + kTol * scale)
        violate(gtag + ": ramp/start-up rate exceeded");
      if (vp - v > gen.shutdown_rate * z + gen.rampdown_rate * u + kTol * scale)
        violate(gtag + ": ramp/shut-down rate exceeded");

      // min-up / min-down windows along the tree
      auto scan = [&](int span, auto&& fn) {
        if (span <= 0) return;
        std::vector<int> frontier = {n};
        for (int tau = node.period + 1; tau <= std::min(node.period + span, T); ++tau) {
          std::vector<int> next;
          for (int q : frontier)
            for (int c : tree.node(q).children) next.push_back(c);
          for (int m : next) fn(m);
          frontier = std::move(next);
        }
      };
      scan(gen.min_up, [&](int m) {
        if (u - up > pol.u[m][g]) violate(gtag + ": min-up time violated");
      });
      scan(gen.min_down, [&](int m) {
        if (up - u > 1 - pol.u[m][g]) violate(gtag + ": min-down time violated");
      });
    }
  }

  // residual obligations from the initial state
  for (int g = 0; g < I; ++g) {
    const Generator& gen = inst.generators[g];
    const GeneratorState& s0 = inst.initial_state[g];
    int hold_on = s0.on ? std::max(0, gen.min_up - s0.elapsed_up) : 0;
    int hold_off = !s0.on ? std::max(0, gen.min_down - s0.elapsed_down) : 0;
    for (int t = 1; t <= std::min(hold_on, T); ++t)
      for (int n : tree.stage(t))
        if (pol.u[n][g] != 1)
          violate("gen " + std::to_string(gen.id) + ": residual min-up obligation violated");
    for (int t = 1; t <= std::min(hold_off, T); ++t)
      for (int n : tree.stage(t))
        if (pol.u[n][g] != 0)
          violate("gen " + std::to_string(gen.id) + ": residual min-down obligation violated");
  }

  if (pol.mode == ModelMode::kTwoStage || pol.mode == ModelMode::kDeterministic) {
    for (int t = 1; t <= T; ++t) {
      const auto& ids = tree.stage(t);
      for (size_t k = 1; k < ids.size(); ++k)
        for (int g = 0; g < I; ++g)
          if (pol.u[ids[k]][g] != pol.u[ids[0]][g] || pol.y[ids[k]][g] != pol.y[ids[0]][g] ||
              pol.z[ids[k]][g] != pol.z[ids[0]][g])
            violate("two-stage policy not period-constant at period " + std::to_string(t));
    }
  }

  if (!violations.empty()) {
    std::string what = "infeasible policy:";
    for (const auto& m : violations) what += "\n  " + m;
    throw PolicyError(what);
  }

  std::vector<double> costs(N, 0.0);
  for (int n = 0; n < N; ++n) {
    double c = 0.0;
    for (int g = 0; g < I; ++g) {
      const Generator& gen = inst.generators[g];
      if (pol.u[n][g] == 1) c += gen.fixed_cost_a + pw[g].evaluate(pol.v[n][g]);
      c += gen.startup_cost * pol.y[n][g] + gen.shutdown_cost * pol.z[n][g];
    }
    costs[n] = c;
  }
  return composite_risk(tree, costs, spec);
}

namespace {

// Restricted tree for a rolling-horizon sub-solve: the realized history path
// root..rev (conditional probability 1) plus the untouched subtree below rev.
struct SubTree {
  ScenarioTree tree;
  std::vector<int> local_of;   // global node id -> local id (-1 if absent)
  std::vector<int> global_of;  // local id -> global
};

SubTree restrict_tree(const ScenarioTree& full, int rev) {
  SubTree st;
  st.local_of.assign(full.size(), -1);

  std::vector<int> path;
  for (int id = rev; id != -1; id = full.node(id).parent) path.push_back(id);
  std::reverse(path.begin(), path.end());

  int local_prev = -1;
  for (size_t i = 0; i < path.size(); ++i) {
    int gid = path[i];
    int lid = (i == 0) ? st.tree.add_root(full.node(gid).demand)
                       : st.tree.add_child(local_prev, 1.0, full.node(gid).demand);
    st.local_of[gid] = lid;
    st.global_of.push_back(gid);
    local_prev = lid;
  }
  // clone the subtree below rev breadth-first
  std::vector<int> frontier = {rev};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int gid : frontier) {
      for (int c : full.node(gid).children) {
        int lid = st.tree.add_child(st.local_of[gid], full.node(c).cond_prob, full.node(c).demand);
        st.local_of[c] = lid;
        st.global_of.push_back(c);
        next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  st.tree.finalize();
  return st;
}

}  // namespace

RollingHorizonResult rolling_horizon(const Instance& inst, const ScenarioTree& tree,
                                     const RiskSpec& spec, const RollingHorizonOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const int N = tree.size(), I = inst.num_generators();

  RollingHorizonResult result;
  Policy& pol = result.policy;
  pol.mode = ModelMode::kMultiStage;
  pol.provenance = Policy::Provenance::kRollingHorizon;
  pol.u.assign(N, std::vector<int>(I, 0));
  pol.y.assign(N, std::vector<int>(I, 0));
  pol.z.assign(N, std::vector<int>(I, 0));
  pol.v.assign(N, std::vector<double>(I, 0.0));

  auto is_revelation = [&](int n) {
    if (opts.solve_every_period) return true;
    if (n == tree.root()) return true;
    int p = tree.node(n).parent;
    return tree.node(p).children.size() > 1;
  };

  // Warm-start state: full solutions of ancestor sub-solves, keyed by global
  // node id (each sub-solve's restricted tree is a subset of its parent's).
  Policy warm;
  bool have_warm = opts.warm_hint != nullptr;
  if (have_warm) {
    warm = *opts.warm_hint;
    if (static_cast<int>(warm.u.size()) != N) throw PolicyError("rolling horizon: bad warm hint");
  } else {
    warm.u.assign(N, std::vector<int>(I, 0));
    warm.y.assign(N, std::vector<int>(I, 0));
    warm.z.assign(N, std::vector<int>(I, 0));
    warm.v.assign(N, std::vector<double>(I, 0.0));
  }

  // Depth-first over revelation nodes.  `fixed` carries the decisions pinned
  // along the history of `rev` (u/y/z by period, dispatch by global node).
  std::function<void(int, FixedDecisions)> descend = [&](int rev, FixedDecisions fixed) {
    SubTree st = restrict_tree(tree, rev);

    // Translate global dispatch fixes into the restricted tree.
    FixedDecisions local = fixed;
    local.v.clear();
    for (const auto& f : fixed.v) {
      int lid = st.local_of[f.node];
      if (lid >= 0) local.v.push_back({f.gen, lid, f.value});
    }

    ModelArtifacts art = build_ts(inst, st.tree, spec, opts.segments, &local);
    SolveOptions solver_opts = opts.solver;
    if (have_warm) {
      Policy lw;
      lw.mode = ModelMode::kTwoStage;
      const int nl = st.tree.size();
      lw.u.assign(nl, std::vector<int>(I, 0));
      lw.y.assign(nl, std::vector<int>(I, 0));
      lw.z.assign(nl, std::vector<int>(I, 0));
      lw.v.assign(nl, std::vector<double>(I, 0.0));
      for (int ln = 0; ln < nl; ++ln) {
        int gnode = st.global_of[ln];
        lw.u[ln] = warm.u[gnode];
        lw.y[ln] = warm.y[gnode];
        lw.z[ln] = warm.z[gnode];
        lw.v[ln] = warm.v[gnode];
      }
      solver_opts.warm_start = policy_variable_values(art, st.tree, inst, lw, spec);
    }
    MilpSolution sol = solve(art.model, solver_opts);
    result.num_solves += 1;
    bool usable = sol.status == SolveStatus::kOptimal ||
                  (sol.status == SolveStatus::kTimeLimit && !sol.values.empty());
    if (!usable)
      throw PolicyError("rolling horizon: sub-solve at node " + std::to_string(rev) +
                        " ended with status " + to_string(sol.status));

    auto binval = [&](int var) {
      double x = sol.values[var];
      if (std::abs(x - std::round(x)) > 1e-6)
        throw PolicyError("rolling horizon: non-integral binary in sub-solve");
      return static_cast<int>(std::round(x));
    };

    // Record the whole sub-solve solution as the warm start for descendants.
    for (int ln = 0; ln < st.tree.size(); ++ln) {
      int gnode = st.global_of[ln];
      for (int g = 0; g < I; ++g) {
        warm.u[gnode][g] = static_cast<int>(std::round(sol.values[art.u[g][ln]]));
        warm.y[gnode][g] = static_cast<int>(std::round(sol.values[art.y[g][ln]]));
        warm.z[gnode][g] = static_cast<int>(std::round(sol.values[art.z[g][ln]]));
        warm.v[gnode][g] = sol.values[art.v[g][ln]];
      }
    }
    have_warm = true;

    // The decision block of this solve: rev and its single-child chain until
    // the next revelation (or a leaf).
    std::vector<int> chain = {rev};
    while (true) {
      const auto& kids = tree.node(chain.back()).children;
      if (kids.size() != 1) break;
      if (is_revelation(kids[0])) break;
      chain.push_back(kids[0]);
    }

    for (int gnode : chain) {
      int lnode = st.local_of[gnode];
      int period = tree.node(gnode).period;
      for (int g = 0; g < I; ++g) {
        int uv = binval(art.u[g][lnode]);
        int yv = binval(art.y[g][lnode]);
        int zv = binval(art.z[g][lnode]);
        double vv = sol.values[art.v[g][lnode]];
        pol.u[gnode][g] = uv;
        pol.y[gnode][g] = yv;
        pol.z[gnode][g] = zv;
        pol.v[gnode][g] = vv;
        fixed.u.push_back({g, period, static_cast<double>(uv)});
        fixed.y.push_back({g, period, static_cast<double>(yv)});
        fixed.z.push_back({g, period, static_cast<double>(zv)});
        fixed.v.push_back({g, gnode, vv});
      }
    }

    for (int child : tree.node(chain.back()).children) descend(child, fixed);
  };

  descend(tree.root(), FixedDecisions{});
  result.value = evaluate_policy(inst, tree, pol, spec, opts.segments);
  result.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
  return result;
}

std::string dump_policy(const ScenarioTree& tree, const Policy& pol) {
  std::ostringstream out;
  char buf[128];
  for (int n = 0; n < tree.size(); ++n) {
    for (size_t g = 0; g < pol.u[n].size(); ++g) {
      std::snprintf(buf, sizeof(buf), "%d\t%d\t%zu\t%d\t%.10g\t%d\t%d\n", n, tree.node(n).period,
                    g + 1, pol.u[n][g], pol.v[n][g], pol.y[n][g], pol.z[n][g]);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace ruc
