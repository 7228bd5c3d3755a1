//
//  milp_highs.cpp — ruc
//
//  External solver backend linked against HiGHS.  Compiled only when a
//  HiGHS install is found at configure time (RUC_HAVE_HIGHS).
//

#ifdef RUC_HAVE_HIGHS

#include <chrono>
#include <cmath>

#include "Highs.h"
#include "ruc/milp.hpp"

namespace ruc {

MilpSolution solve_with_highs(const MilpModel& model, const SolveOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  HighsModel hm;
  HighsLp& lp = hm.lp_;
  const int n = model.num_vars();
  const int m = model.num_rows();
  lp.num_col_ = n;
  lp.num_row_ = m;
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = model.obj_offset();
  lp.col_cost_.resize(n);
  lp.col_lower_.resize(n);
  lp.col_upper_.resize(n);
  lp.integrality_.resize(n);
  bool any_int = false;
  for (int j = 0; j < n; ++j) {
    const MilpVar& v = model.vars()[j];
    lp.col_cost_[j] = v.obj;
    lp.col_lower_[j] = v.lower == -kInf ? -kHighsInf : v.lower;
    lp.col_upper_[j] = v.upper == kInf ? kHighsInf : v.upper;
    lp.integrality_[j] = v.kind == VarKind::kBinary ? HighsVarType::kInteger : HighsVarType::kContinuous;
    any_int = any_int || v.kind == VarKind::kBinary;
  }
  if (!any_int) lp.integrality_.clear();

  lp.row_lower_.resize(m);
  lp.row_upper_.resize(m);
  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.start_.resize(m + 1);
  lp.a_matrix_.start_[0] = 0;
  for (int r = 0; r < m; ++r) {
    const MilpRow& row = model.rows()[r];
    for (const auto& t : row.terms) {
      lp.a_matrix_.index_.push_back(t.var);
      lp.a_matrix_.value_.push_back(t.coef);
    }
    lp.a_matrix_.start_[r + 1] = static_cast<int>(lp.a_matrix_.index_.size());
    switch (row.sense) {
      case RowSense::kLe:
        lp.row_lower_[r] = -kHighsInf;
        lp.row_upper_[r] = row.rhs;
        break;
      case RowSense::kGe:
        lp.row_lower_[r] = row.rhs;
        lp.row_upper_[r] = kHighsInf;
        break;
      case RowSense::kEq:
        lp.row_lower_[r] = row.rhs;
        lp.row_upper_[r] = row.rhs;
        break;
    }
  }

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", opts.threads);
  highs.setOptionValue("random_seed", 0);
  highs.setOptionValue("mip_rel_gap", opts.rel_gap);
  // Tighter than our own 1e-6 re-check and the 1e-6 binary rounding rule.
  highs.setOptionValue("mip_feasibility_tolerance", 1e-7);
  highs.setOptionValue("primal_feasibility_tolerance", 1e-8);
  if (opts.time_limit_s != kInf) highs.setOptionValue("time_limit", opts.time_limit_s);
  if (highs.passModel(hm) != HighsStatus::kOk) throw SolveError("highs: passModel failed");
  if (static_cast<int>(opts.warm_start.size()) == n) {
    HighsSolution start;
    start.col_value = opts.warm_start;
    highs.setSolution(start);
  }
  HighsStatus st = highs.run();
  if (st == HighsStatus::kError) throw SolveError("highs: run failed");

  MilpSolution sol;
  sol.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
  const HighsModelStatus ms = highs.getModelStatus();
  switch (ms) {
    case HighsModelStatus::kOptimal: sol.status = SolveStatus::kOptimal; break;
    case HighsModelStatus::kInfeasible: sol.status = SolveStatus::kInfeasible; break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible: sol.status = SolveStatus::kUnbounded; break;
    case HighsModelStatus::kTimeLimit: sol.status = SolveStatus::kTimeLimit; break;
    case HighsModelStatus::kObjectiveBound:
    case HighsModelStatus::kObjectiveTarget: sol.status = SolveStatus::kGapLimit; break;
    default:
      throw SolveError("highs: unexpected model status " + highs.modelStatusToString(ms));
  }
  if (sol.status == SolveStatus::kOptimal ||
      (sol.status == SolveStatus::kTimeLimit && highs.getSolution().value_valid)) {
    sol.objective = highs.getObjectiveValue();
    sol.values = highs.getSolution().col_value;
    if (any_int) {
      const HighsInfo& info = highs.getInfo();
      sol.rel_gap = info.mip_gap >= 0 && info.mip_gap < kHighsInf ? info.mip_gap : 0.0;
      // Snap integer values returned within the solver's integrality slack.
      for (int j = 0; j < n; ++j)
        if (model.vars()[j].kind == VarKind::kBinary) sol.values[j] = std::round(sol.values[j]);
    }
  }
  return sol;
}

}  // namespace ruc

#endif  // RUC_HAVE_HIGHS
