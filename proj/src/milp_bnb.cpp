//
//  milp_bnb.cpp — ruc
//
//  Bundled fallback MILP backend: branch-and-bound over the model's binary
//  variables with LP relaxations solved by a dense bounded-variable primal
//  simplex (two phases, explicit basis inverse, periodic refactorization).
//  Zero external dependencies; intended for desk-scale models.  Larger
//  models should go through an external backend.
//

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "ruc/milp.hpp"

namespace ruc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr int kRefactorEvery = 64;

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double obj = 0.0;
  std::vector<double> x;  // structural variables only
};

// Dense LP data in computational form:  A x + s = b  with column bounds on
// both structural variables and slacks.
struct LpData {
  int m = 0;        // rows
  int n_struct = 0; // structural columns
  MatrixXd cols;    // m x n_struct
  VectorXd rhs;
  std::vector<double> slack_lo, slack_hi;
  std::vector<double> cost;  // structural costs
};

LpData prepare(const MilpModel& model) {
  LpData d;
  d.m = model.num_rows();
  d.n_struct = model.num_vars();
  d.cols = MatrixXd::Zero(d.m, d.n_struct);
  d.rhs = VectorXd::Zero(d.m);
  d.slack_lo.resize(d.m);
  d.slack_hi.resize(d.m);
  for (int r = 0; r < d.m; ++r) {
    const MilpRow& row = model.rows()[r];
    for (const auto& t : row.terms) d.cols(r, t.var) = t.coef;
    d.rhs[r] = row.rhs;
    switch (row.sense) {
      case RowSense::kLe: d.slack_lo[r] = 0.0; d.slack_hi[r] = kInf; break;
      case RowSense::kGe: d.slack_lo[r] = -kInf; d.slack_hi[r] = 0.0; break;
      case RowSense::kEq: d.slack_lo[r] = 0.0; d.slack_hi[r] = 0.0; break;
    }
  }
  d.cost.resize(d.n_struct);
  for (int j = 0; j < d.n_struct; ++j) d.cost[j] = model.vars()[j].obj;
  return d;
}

// Bounded-variable primal simplex on the prepared data with caller-supplied
// structural bounds (branch-and-bound tightens these between calls).
class Simplex {
 public:
  Simplex(const LpData& d, const std::vector<double>& lo, const std::vector<double>& hi)
      : d_(d), ncols_(d.n_struct + d.m) {
    lo_ = lo;
    hi_ = hi;
    lo_.insert(lo_.end(), d.slack_lo.begin(), d.slack_lo.end());
    hi_.insert(hi_.end(), d.slack_hi.begin(), d.slack_hi.end());
  }

  LpResult run() {
    init_basis();
    // Phase 1: drive artificial infeasibility to zero, if any.
    if (!artificial_rows_.empty()) {
      phase1_ = true;
      LpStatus st = iterate();
      phase1_ = false;
      if (st == LpStatus::kIterLimit) return {LpStatus::kIterLimit, 0.0, {}};
      double infeas = 0.0;
      for (int a : artificial_cols_) infeas += value_of(a);
      if (infeas > 1e-7 * std::max(1.0, d_.rhs.cwiseAbs().maxCoeff())) return {LpStatus::kInfeasible, 0.0, {}};
      // Freeze artificials at zero for phase 2.
      for (int a : artificial_cols_) {
        lo_[a] = 0.0;
        hi_[a] = 0.0;
      }
    }
    LpStatus st = iterate();
    if (st != LpStatus::kOptimal) return {st, 0.0, {}};
    LpResult res;
    res.status = LpStatus::kOptimal;
    res.x.resize(d_.n_struct);
    for (int j = 0; j < d_.n_struct; ++j) res.x[j] = value_of(j);
    res.obj = 0.0;
    for (int j = 0; j < d_.n_struct; ++j) res.obj += d_.cost[j] * res.x[j];
    return res;
  }

 private:
  const LpData& d_;
  int ncols_;                      // structural + slack (artificials appended)
  std::vector<double> lo_, hi_;    // bounds incl. slacks and artificials
  std::vector<int> basis_;         // column per row
  std::vector<int> in_basis_pos_;  // column -> row position or -1
  std::vector<bool> at_upper_;     // nonbasic rest position
  VectorXd xb_;                    // basic values
  MatrixXd binv_;
  std::vector<int> artificial_cols_;
  std::vector<int> artificial_rows_;
  bool phase1_ = false;
  int pivots_since_refactor_ = 0;
  long degenerate_streak_ = 0;

  double col_cost(int j) const {
    if (phase1_) return in(artificial_cols_, j) ? 1.0 : 0.0;
    if (j < d_.n_struct) return d_.cost[j];
    return 0.0;
  }

  static bool in(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  }

  // Column j of [A | I] (artificials carry a signed unit column).
  VectorXd column(int j) const {
    VectorXd col = VectorXd::Zero(d_.m);
    if (j < d_.n_struct) {
      col = d_.cols.col(j);
    } else if (j < d_.n_struct + d_.m) {
      col[j - d_.n_struct] = 1.0;
    } else {
      int k = j - d_.n_struct - d_.m;
      col[artificial_rows_[k]] = artificial_sign_[k];
    }
    return col;
  }

  std::vector<double> artificial_sign_;

  double rest_value(int j) const {
    if (at_upper_[j]) return hi_[j];
    if (lo_[j] == -kInf && hi_[j] == kInf) return 0.0;  // free var rests at 0
    if (lo_[j] == -kInf) return hi_[j];
    return lo_[j];
  }

  double value_of(int j) const {
    int p = in_basis_pos_[j];
    return p >= 0 ? xb_[p] : rest_value(j);
  }

  void init_basis() {
    // Nonbasic structurals at their rest bound, slack basis.
    at_upper_.assign(ncols_, false);
    for (int j = 0; j < ncols_; ++j)
      if (lo_[j] == -kInf && hi_[j] != kInf) at_upper_[j] = true;

    VectorXd act = VectorXd::Zero(d_.m);
    for (int j = 0; j < d_.n_struct; ++j) {
      double v = rest_value(j);
      if (v != 0.0) act += d_.cols.col(j) * v;
    }
    VectorXd slack_val = d_.rhs - act;

    basis_.clear();
    artificial_cols_.clear();
    artificial_rows_.clear();
    artificial_sign_.clear();
    std::vector<double> xb;
    for (int r = 0; r < d_.m; ++r) {
      int sj = d_.n_struct + r;
      double v = slack_val[r];
      if (v >= lo_[sj] - kFeasTol && v <= hi_[sj] + kFeasTol) {
        basis_.push_back(sj);
        xb.push_back(std::min(std::max(v, lo_[sj]), hi_[sj]));
      } else {
        // Slack rests at its nearest bound; an artificial absorbs the gap.
        double beta = (v < lo_[sj]) ? lo_[sj] : hi_[sj];
        at_upper_[sj] = (beta == hi_[sj] && hi_[sj] != kInf && lo_[sj] != hi_[sj]);
        if (lo_[sj] == hi_[sj]) at_upper_[sj] = false;
        double resid = v - beta;
        artificial_sign_.push_back(resid > 0 ? 1.0 : -1.0);
        artificial_rows_.push_back(r);
        int aj = d_.n_struct + d_.m + static_cast<int>(artificial_cols_.size());
        artificial_cols_.push_back(aj);
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        at_upper_.push_back(false);
        basis_.push_back(aj);
        xb.push_back(std::abs(resid));
      }
    }
    ncols_ = static_cast<int>(lo_.size());
    in_basis_pos_.assign(ncols_, -1);
    for (int r = 0; r < d_.m; ++r) in_basis_pos_[basis_[r]] = r;
    xb_ = Eigen::Map<VectorXd>(xb.data(), xb.size());
    binv_ = MatrixXd::Identity(d_.m, d_.m);
    // Slack basis columns are +/- unit vectors; artificials signed units.
    refactorize();
    pivots_since_refactor_ = 0;
    degenerate_streak_ = 0;
  }

  void refactorize() {
    if (d_.m == 0) return;
    MatrixXd B(d_.m, d_.m);
    for (int r = 0; r < d_.m; ++r) B.col(r) = column(basis_[r]);
    binv_ = B.partialPivLu().inverse();
    recompute_xb();
  }

  void recompute_xb() {
    if (d_.m == 0) return;
    VectorXd act = VectorXd::Zero(d_.m);
    for (int j = 0; j < ncols_; ++j) {
      if (in_basis_pos_[j] >= 0) continue;
      double v = rest_value(j);
      if (v != 0.0) act += column(j) * v;
    }
    xb_ = binv_ * (d_.rhs - act);
  }

  LpStatus iterate() {
    if (d_.m == 0) return solve_unconstrained();
    const long iter_limit = 2000L * std::max(10, d_.m + ncols_);
    double cost_scale = 1.0;
    for (int j = 0; j < ncols_; ++j) cost_scale = std::max(cost_scale, std::abs(col_cost(j)));
    const double dtol = kDualTol * cost_scale;

    for (long iter = 0; iter < iter_limit; ++iter) {
      bool bland = degenerate_streak_ > 400;

      // BTRAN: y = Binv' * c_B, reduced costs for nonbasic columns.
      VectorXd cb(d_.m);
      for (int r = 0; r < d_.m; ++r) cb[r] = col_cost(basis_[r]);
      VectorXd y = binv_.transpose() * cb;

      int enter = -1;
      int dir = 0;
      double best = dtol;
      for (int j = 0; j < ncols_; ++j) {
        if (in_basis_pos_[j] >= 0) continue;
        if (hi_[j] - lo_[j] < 1e-15) continue;  // fixed column can never move
        double dj = col_cost(j) - y.dot(column(j));
        bool is_free = (lo_[j] == -kInf && hi_[j] == kInf);
        int d = 0;
        double score = 0.0;
        if (is_free) {
          if (std::abs(dj) > dtol) {
            d = dj > 0 ? -1 : +1;
            score = std::abs(dj);
          }
        } else if (!at_upper_[j] && dj < -dtol) {
          d = +1;
          score = -dj;
        } else if (at_upper_[j] && dj > dtol) {
          d = -1;
          score = dj;
        }
        if (d != 0) {
          if (bland) { enter = j; dir = d; break; }
          if (score > best) { best = score; enter = j; dir = d; }
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      VectorXd w = binv_ * column(enter);

      // Ratio test.  First pass finds the tightest blocking ratio; second
      // pass picks the leaving row among blockers within a small whisker of
      // it, preferring the largest pivot magnitude (Bland mode: smallest
      // basis index).
      const double bound_span = hi_[enter] - lo_[enter];  // inf for free columns
      auto ratio = [&](int r, double* t, bool* to_upper) {
        double delta = dir * w[r];
        if (delta > kPivotTol) {
          if (lo_[basis_[r]] == -kInf) return false;
          *t = std::max((xb_[r] - lo_[basis_[r]]) / delta, 0.0);
          *to_upper = false;
          return true;
        }
        if (delta < -kPivotTol) {
          if (hi_[basis_[r]] == kInf) return false;
          *t = std::max((xb_[r] - hi_[basis_[r]]) / delta, 0.0);
          *to_upper = true;
          return true;
        }
        return false;
      };

      double t_block = kInf;
      for (int r = 0; r < d_.m; ++r) {
        double t;
        bool up;
        if (ratio(r, &t, &up)) t_block = std::min(t_block, t);
      }
      if (t_block == kInf && bound_span == kInf) return LpStatus::kUnbounded;

      if (bound_span <= t_block) {
        // Bound flip: the entering variable crosses to its other bound.
        at_upper_[enter] = !at_upper_[enter];
        xb_ -= bound_span * dir * w;
        degenerate_streak_ = 0;
        continue;
      }

      const double whisker = t_block * (1.0 + 1e-9) + 1e-12;
      int leave_pos = -1;
      bool leave_to_upper = false;
      double best_pivot = 0.0;
      for (int r = 0; r < d_.m; ++r) {
        double t;
        bool up;
        if (!ratio(r, &t, &up) || t > whisker) continue;
        if (bland) {
          if (leave_pos == -1 || basis_[r] < basis_[leave_pos]) {
            leave_pos = r;
            leave_to_upper = up;
          }
        } else if (std::abs(w[r]) > best_pivot) {
          best_pivot = std::abs(w[r]);
          leave_pos = r;
          leave_to_upper = up;
        }
      }
      const double t_star = t_block;
      degenerate_streak_ = (t_star < 1e-11) ? degenerate_streak_ + 1 : 0;

      // Pivot: entering becomes basic, blocker leaves at the bound it hit.
      double enter_val = rest_value(enter) + dir * t_star;
      xb_ -= t_star * dir * w;
      int leave_col = basis_[leave_pos];
      in_basis_pos_[leave_col] = -1;
      at_upper_[leave_col] = leave_to_upper;
      basis_[leave_pos] = enter;
      in_basis_pos_[enter] = leave_pos;
      xb_[leave_pos] = enter_val;

      double pivot = w[leave_pos];
      binv_.row(leave_pos) /= pivot;
      for (int r = 0; r < d_.m; ++r) {
        if (r == leave_pos) continue;
        double f = w[r];
        if (f != 0.0) binv_.row(r) -= f * binv_.row(leave_pos);
      }

      if (++pivots_since_refactor_ >= kRefactorEvery) {
        refactorize();
        pivots_since_refactor_ = 0;
      }
    }
    return LpStatus::kIterLimit;
  }

  LpStatus solve_unconstrained() {
    for (int j = 0; j < ncols_; ++j) {
      double c = col_cost(j);
      if (c > 0 && lo_[j] == -kInf) return LpStatus::kUnbounded;
      if (c < 0 && hi_[j] == kInf) return LpStatus::kUnbounded;
      at_upper_[j] = c < 0;
      if (lo_[j] == hi_[j]) at_upper_[j] = false;
    }
    return LpStatus::kOptimal;
  }
};

LpResult solve_lp(const LpData& d, const std::vector<double>& lo, const std::vector<double>& hi) {
  Simplex s(d, lo, hi);
  return s.run();
}

struct BnbNode {
  double bound = -kInf;
  long seq = 0;
  std::vector<double> lo, hi;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;
  }
};

}  // namespace

MilpSolution solve_with_bnb(const MilpModel& model, const SolveOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  if (model.num_rows() > 6000 || model.num_vars() > 12000)
    throw SolveError("model too large for the bundled 'bnb' backend (" +
                     std::to_string(model.num_rows()) + " rows, " +
                     std::to_string(model.num_vars()) +
                     " vars); build with HiGHS and select backend 'highs'");

  LpData data = prepare(model);
  std::vector<double> lo(model.num_vars()), hi(model.num_vars());
  std::vector<int> binaries;
  for (int j = 0; j < model.num_vars(); ++j) {
    lo[j] = model.vars()[j].lower;
    hi[j] = model.vars()[j].upper;
    if (model.vars()[j].kind == VarKind::kBinary) binaries.push_back(j);
  }

  MilpSolution sol;
  sol.rel_gap = 0.0;

  auto finish = [&](SolveStatus st) {
    sol.status = st;
    sol.wall_time_s = elapsed();
    return sol;
  };

  // Root relaxation.
  LpResult root = solve_lp(data, lo, hi);
  if (root.status == LpStatus::kIterLimit) throw SolveError("bnb: simplex iteration limit at root");
  if (root.status == LpStatus::kInfeasible) return finish(SolveStatus::kInfeasible);
  if (root.status == LpStatus::kUnbounded) return finish(SolveStatus::kUnbounded);

  // Most fractional binary (smallest index on ties); -1 when all integral.
  const double int_tol = 1e-7;
  auto fractional = [&](const std::vector<double>& x) {
    int best = -1;
    double best_frac = int_tol;
    for (int j : binaries) {
      double f = std::abs(x[j] - std::round(x[j]));
      if (f > best_frac) {
        best_frac = f;
        best = j;
      }
    }
    return best;
  };

  bool have_incumbent = false;
  double incumbent_obj = kInf;
  std::vector<double> incumbent_x;

  if (static_cast<int>(opts.warm_start.size()) == model.num_vars() &&
      check_feasible(model, opts.warm_start, 1e-7)) {
    incumbent_x = opts.warm_start;
    for (int j : binaries) incumbent_x[j] = std::round(incumbent_x[j]);
    incumbent_obj = 0.0;
    for (int j = 0; j < model.num_vars(); ++j)
      incumbent_obj += model.vars()[j].obj * incumbent_x[j];
    have_incumbent = true;
  }

  std::priority_queue<BnbNode, std::vector<BnbNode>, BnbNodeOrder> open;
  long seq = 0;
  open.push({root.obj, seq++, lo, hi});

  bool timed_out = false;
  while (!open.empty()) {
    if (elapsed() > opts.time_limit_s) {
      timed_out = true;
      break;
    }
    BnbNode node = open.top();
    double lb = node.bound;
    if (have_incumbent) {
      double gap = (incumbent_obj - lb) / std::max(1.0, std::abs(incumbent_obj));
      if (gap <= opts.rel_gap) break;
      if (lb >= incumbent_obj - 1e-12) break;
    }
    open.pop();

    LpResult res = solve_lp(data, node.lo, node.hi);
    if (res.status == LpStatus::kIterLimit) throw SolveError("bnb: simplex iteration limit");
    if (res.status == LpStatus::kInfeasible) continue;
    if (res.status == LpStatus::kUnbounded) return finish(SolveStatus::kUnbounded);
    if (have_incumbent && res.obj >= incumbent_obj - 1e-12) continue;

    int branch_var = fractional(res.x);
    if (branch_var < 0) {
      // Integral: new incumbent.  Snap binaries exactly.
      for (int j : binaries) res.x[j] = std::round(res.x[j]);
      if (!have_incumbent || res.obj < incumbent_obj) {
        have_incumbent = true;
        incumbent_obj = res.obj;
        incumbent_x = res.x;
      }
      continue;
    }
    BnbNode down{res.obj, seq++, node.lo, node.hi};
    down.hi[branch_var] = 0.0;
    BnbNode up{res.obj, seq++, node.lo, node.hi};
    up.lo[branch_var] = 1.0;
    open.push(std::move(down));
    open.push(std::move(up));
  }

  if (!have_incumbent) {
    if (timed_out) return finish(SolveStatus::kTimeLimit);
    return finish(SolveStatus::kInfeasible);
  }
  double lb = open.empty() ? incumbent_obj : std::min(incumbent_obj, open.top().bound);
  sol.objective = incumbent_obj + model.obj_offset();
  sol.values = incumbent_x;
  sol.rel_gap = std::max(0.0, (incumbent_obj - lb) / std::max(1.0, std::abs(incumbent_obj)));
  if (timed_out && sol.rel_gap > opts.rel_gap) return finish(SolveStatus::kTimeLimit);
  return finish(SolveStatus::kOptimal);
}

}  // namespace ruc
