#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "ruc/instance.hpp"

using namespace ruc;

#ifndef RUC_DATA_DIR
#define RUC_DATA_DIR "data"
#endif

static std::string bundled() { return std::string(RUC_DATA_DIR) + "/kazarlis10.json"; }

TEST_CASE("bundled instance loads with the documented shape") {
  Instance inst = load_instance(bundled());
  CHECK(inst.horizon == 24);
  CHECK(inst.generators.size() == 10);
  CHECK(inst.base_demand.size() == 24);
  CHECK(inst.scenario.branch_periods == std::vector<int>{7, 13, 19});
  CHECK(inst.scenario.branch_probs == std::vector<double>{0.5, 0.5});
  CHECK(inst.fleet_capacity() == doctest::Approx(2493.0));  // sum of the q_max column
  // all-off default initial state with no residual obligations
  for (size_t g = 0; g < inst.generators.size(); ++g) {
    CHECK_FALSE(inst.initial_state[g].on);
    CHECK(inst.initial_state[g].output == 0.0);
    CHECK(inst.initial_state[g].elapsed_down >= inst.generators[g].min_down);
  }
  // Spot-check a generator row (unit 6 drives alpha_* downstream).
  CHECK(inst.generators[5].fixed_cost_a == 370);
  CHECK(inst.generators[5].prod_cost_b == doctest::Approx(22.26));
  CHECK(inst.generators[5].q_min == 30);
}

TEST_CASE("bundled instance validates clean") {
  ValidationReport rep = validate_instance(load_instance(bundled()));
  CHECK(rep.error_count() == 0);
  CHECK(rep.warning_count() == 0);
  CHECK(rep.ok());
}

TEST_CASE("round-trip serialization is field-exact") {
  Instance a = load_instance(bundled());
  Instance b = parse_instance_text(serialize_instance(a));
  CHECK(a.horizon == b.horizon);
  REQUIRE(a.generators.size() == b.generators.size());
  for (size_t g = 0; g < a.generators.size(); ++g) {
    CHECK(a.generators[g].fixed_cost_a == b.generators[g].fixed_cost_a);
    CHECK(a.generators[g].prod_cost_b == b.generators[g].prod_cost_b);
    CHECK(a.generators[g].prod_cost_c == b.generators[g].prod_cost_c);
    CHECK(a.generators[g].q_min == b.generators[g].q_min);
    CHECK(a.generators[g].q_max == b.generators[g].q_max);
    CHECK(a.generators[g].startup_rate == b.generators[g].startup_rate);
    CHECK(a.generators[g].rampup_rate == b.generators[g].rampup_rate);
    CHECK(a.generators[g].shutdown_rate == b.generators[g].shutdown_rate);
    CHECK(a.generators[g].rampdown_rate == b.generators[g].rampdown_rate);
    CHECK(a.generators[g].min_up == b.generators[g].min_up);
    CHECK(a.generators[g].min_down == b.generators[g].min_down);
    CHECK(a.generators[g].startup_cost == b.generators[g].startup_cost);
    CHECK(a.generators[g].shutdown_cost == b.generators[g].shutdown_cost);
  }
  CHECK(a.base_demand == b.base_demand);
  CHECK(a.scenario.branch_periods == b.scenario.branch_periods);
  CHECK(a.scenario.epsilon == b.scenario.epsilon);
}

TEST_CASE("malformed and schema-violating documents are rejected") {
  CHECK_THROWS_AS(parse_instance_text("{not json"), ParseError);
  CHECK_THROWS_AS(parse_instance_text("{}"), SchemaError);
  // q_min > q_max
  std::string bad = R"({"horizon":1,
    "generators":[{"a":1,"b":1,"c":0,"q_min":50,"q_max":10,"V_prime":50,"V":50,
                   "B_prime":50,"B":50,"M":0,"L":0,"SU":0,"SD":0}],
    "base_demand":[5],
    "scenario":{"branch_periods":[],"epsilon":0.1,"branch_probs":[0.5,0.5]}})";
  CHECK_THROWS_AS(parse_instance_text(bad), SchemaError);
  // negative cost
  std::string neg = R"({"horizon":1,
    "generators":[{"a":-1,"b":1,"c":0,"q_min":5,"q_max":10,"V_prime":5,"V":5,
                   "B_prime":5,"B":5,"M":0,"L":0,"SU":0,"SD":0}],
    "base_demand":[5],
    "scenario":{"branch_periods":[],"epsilon":0.1,"branch_probs":[0.5,0.5]}})";
  CHECK_THROWS_AS(parse_instance_text(neg), SchemaError);
  // demand length mismatch
  std::string len = R"({"horizon":2,
    "generators":[{"a":1,"b":1,"c":0,"q_min":5,"q_max":10,"V_prime":5,"V":5,
                   "B_prime":5,"B":5,"M":0,"L":0,"SU":0,"SD":0}],
    "base_demand":[5],
    "scenario":{"branch_periods":[],"epsilon":0.1,"branch_probs":[0.5,0.5]}})";
  CHECK_THROWS_AS(parse_instance_text(len), SchemaError);
}

TEST_CASE("validate_instance flags relational violations") {
  Instance inst = load_instance(bundled());

  SUBCASE("startup rate below q_min") {
    inst.generators[2].startup_rate = inst.generators[2].q_min - 1.0;
    ValidationReport rep = validate_instance(inst);
    CHECK(rep.error_count() == 1);
    CHECK(rep.issues[0].message.find("generator 3") != std::string::npos);
    CHECK(rep.issues[0].message.find("startup rate") != std::string::npos);
  }

  SUBCASE("capacity shortfall is a warning, not an error") {
    // Lift the peak so (1+eps) * peak exceeds the 2452.5 MW fleet.
    inst.base_demand[11] = 2400.0;
    inst.scenario.epsilon = 0.6;
    ValidationReport rep = validate_instance(inst);
    CHECK(rep.error_count() == 0);
    REQUIRE(rep.warning_count() == 1);
    CHECK(rep.issues[0].message.find("capacity shortfall") != std::string::npos);
  }

  SUBCASE("epsilon >= 1 is an error") {
    inst.scenario.epsilon = 1.0;
    CHECK(validate_instance(inst).error_count() == 1);
  }

  SUBCASE("on generator with out-of-range initial output") {
    inst.initial_state[0].on = true;
    inst.initial_state[0].output = inst.generators[0].q_max + 1.0;
    CHECK(validate_instance(inst).error_count() == 1);
  }
}
