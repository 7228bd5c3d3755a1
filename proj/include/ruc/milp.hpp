//
//  milp.hpp — ruc
//
//  Minimal mixed-integer linear programming layer: an immutable model
//  representation, a narrow solver-backend interface, a deterministic
//  LP-format text export, and an independent feasibility re-check of
//  returned solutions.
//
//  Two backends are provided: "bnb", a bundled branch-and-bound solver over
//  a bounded-variable simplex with no external dependencies (adequate for
//  desk-scale models), and "highs", linked in when a HiGHS install is found
//  at configure time.  "auto" picks highs when built, bnb otherwise.
//

#ifndef RUC_MILP_HPP
#define RUC_MILP_HPP

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ruc/errors.hpp"

namespace ruc {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { kContinuous, kBinary };
enum class RowSense { kLe, kEq, kGe };

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

// Small linear expression helper; duplicate variables are allowed and are
// merged when the expression enters a row or objective.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(std::initializer_list<LinTerm> terms) : terms_(terms) {}
  LinExpr& add(int var, double coef) {
    terms_.push_back({var, coef});
    return *this;
  }
  LinExpr& add_offset(double c) {
    offset_ += c;
    return *this;
  }
  const std::vector<LinTerm>& terms() const { return terms_; }
  double offset() const { return offset_; }

 private:
  std::vector<LinTerm> terms_;
  double offset_ = 0.0;
};

struct MilpVar {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInf;
  double obj = 0.0;
};

struct MilpRow {
  std::string name;
  std::vector<LinTerm> terms;  // merged, sorted by variable id
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
};

class MilpModel {
 public:
  MilpModel() = default;  // empty model; populated via Builder::build()

  class Builder {
   public:
    // Returns the variable id.  Throws ModelError on a duplicate name.
    int add_var(const std::string& name, VarKind kind, double lower, double upper,
                double obj_coef = 0.0);
    int add_continuous(const std::string& name, double lower, double upper, double obj = 0.0) {
      return add_var(name, VarKind::kContinuous, lower, upper, obj);
    }
    int add_binary(const std::string& name, double obj = 0.0) {
      return add_var(name, VarKind::kBinary, 0.0, 1.0, obj);
    }
    // Constant offsets in `expr` are moved to the right-hand side.
    void add_row(const LinExpr& expr, RowSense sense, double rhs, const std::string& name = "");
    void set_obj_coef(int var, double coef);
    void add_obj(const LinExpr& expr);  // accumulates
    void set_obj_offset(double c) { obj_offset_ = c; }
    int num_vars() const { return static_cast<int>(vars_.size()); }

    MilpModel build();

   private:
    std::vector<MilpVar> vars_;
    std::vector<MilpRow> rows_;
    double obj_offset_ = 0.0;
    friend class MilpModel;
  };

  const std::vector<MilpVar>& vars() const { return vars_; }
  const std::vector<MilpRow>& rows() const { return rows_; }
  double obj_offset() const { return obj_offset_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;

 private:
  std::vector<MilpVar> vars_;
  std::vector<MilpRow> rows_;
  double obj_offset_ = 0.0;
};

// --- solving -----------------------------------------------------------------

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit, kTimeLimit };

std::string to_string(SolveStatus s);

struct SolveOptions {
  double rel_gap = 1e-6;
  double time_limit_s = kInf;
  std::string backend = "auto";  // "auto" | "bnb" | "highs"
  int threads = 1;
  // Optional feasible starting point (one value per variable); backends use
  // it as the initial incumbent.
  std::vector<double> warm_start;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // one per variable; empty unless a solution exists
  double rel_gap = 0.0;        // achieved relative gap
  double wall_time_s = 0.0;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual MilpSolution solve(const MilpModel& model, const SolveOptions& opts) = 0;
};

std::vector<std::string> available_backends();

// Solve and, for optimal outcomes, independently re-check every row within
// a 1e-6 row-scaled feasibility tolerance (the backend is not trusted).
// Throws SolveError if the backend is unavailable or the re-check fails.
MilpSolution solve(const MilpModel& model, const SolveOptions& opts = {});

// Row-by-row feasibility check at absolute tolerance `tol` scaled by each
// row's coefficient magnitude.  Appends one message per violated row.
bool check_feasible(const MilpModel& model, std::span<const double> x, double tol,
                    std::vector<std::string>* violations = nullptr);

// Deterministic LP-format text (sections: Minimize, Subject To, Bounds,
// Binaries, End); identical models produce identical bytes.
std::string export_lp_text(const MilpModel& model);

}  // namespace ruc

#endif
