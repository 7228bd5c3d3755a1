//
//  instance.hpp — ruc
//
//  Problem data: generator fleet, base demand profile, scenario
//  specification.  Instances are immutable after load and safe to share
//  read-only across threads.
//

#ifndef RUC_INSTANCE_HPP
#define RUC_INSTANCE_HPP

#include <string>
#include <vector>

#include "ruc/errors.hpp"

namespace ruc {

struct Generator {
  int id = 0;
  double fixed_cost_a = 0.0;   // a,  $/h while committed
  double prod_cost_b = 0.0;    // b,  $/MWh
  double prod_cost_c = 0.0;    // c,  $/MW^2 h
  double q_min = 0.0;          // MW
  double q_max = 0.0;          // MW
  double startup_rate = 0.0;   // V', MW   (first-hour output cap after a start)
  double rampup_rate = 0.0;    // V,  MW/h
  double shutdown_rate = 0.0;  // B', MW   (last-hour output cap before a stop)
  double rampdown_rate = 0.0;  // B,  MW/h
  int min_up = 0;              // M, h
  int min_down = 0;            // L, h
  double startup_cost = 0.0;   // SU, $
  double shutdown_cost = 0.0;  // SD, $

  // Quadratic production cost g(v) = b v + c v^2.
  double production_cost(double v) const { return prod_cost_b * v + prod_cost_c * v * v; }
};

// Symbolic scenario structure: the filtration grows at each branch period,
// multiplying the base demand of the whole block by (1-eps) or (1+eps).
struct ScenarioSpec {
  std::vector<int> branch_periods;               // strictly increasing, in 2..T
  double epsilon = 0.0;                          // default variability; sweeps override
  std::vector<double> branch_probs = {0.5, 0.5}; // P(low), P(high) at every branch
};

struct GeneratorState {
  bool on = false;
  double output = 0.0;  // MW at t=0
  int elapsed_up = 0;   // h the unit has been on (if on)
  int elapsed_down = 0; // h the unit has been off (if off)
};

struct Instance {
  int horizon = 0;  // T, periods
  std::vector<Generator> generators;
  std::vector<double> base_demand;          // length T, MW
  ScenarioSpec scenario;
  std::vector<GeneratorState> initial_state;  // one per generator

  int num_generators() const { return static_cast<int>(generators.size()); }
  double fleet_capacity() const;  // sum of q_max
};

// --- loading / saving ------------------------------------------------------

// Parse a JSON instance document.  Throws ParseError on malformed text,
// SchemaError on missing fields, wrong types or sign violations.
Instance load_instance(const std::string& path);
Instance parse_instance_text(const std::string& json_text);

std::string serialize_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

// --- validation -------------------------------------------------------------

struct ValidationIssue {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  int error_count() const;
  int warning_count() const;
  bool ok() const { return error_count() == 0; }
};

// Reports every violated invariant; never throws.  An empty report means
// the instance is usable by all downstream modules.
ValidationReport validate_instance(const Instance& inst);

}  // namespace ruc

#endif
