//
//  instance.cpp — ruc
//

#include "ruc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ruc {

using nlohmann::json;

double Instance::fleet_capacity() const {
  double cap = 0.0;
  for (const auto& g : generators) cap += g.q_max;
  return cap;
}

int ValidationReport::error_count() const {
  return static_cast<int>(std::count_if(issues.begin(), issues.end(), [](const ValidationIssue& i) {
    return i.severity == ValidationIssue::Severity::kError;
  }));
}

int ValidationReport::warning_count() const {
  return static_cast<int>(issues.size()) - error_count();
}

namespace {

double require_number(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key)) throw SchemaError(ctx + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(ctx + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double require_nonneg(const json& obj, const char* key, const std::string& ctx) {
  double x = require_number(obj, key, ctx);
  if (x < 0.0) throw SchemaError(ctx + ": field '" + key + "' must be >= 0");
  return x;
}

int require_nonneg_int(const json& obj, const char* key, const std::string& ctx) {
  double x = require_nonneg(obj, key, ctx);
  if (x != std::floor(x)) throw SchemaError(ctx + ": field '" + key + "' must be an integer");
  return static_cast<int>(x);
}

Generator parse_generator(const json& g, int index) {
  std::string ctx = "generators[" + std::to_string(index) + "]";
  if (!g.is_object()) throw SchemaError(ctx + ": must be an object");
  Generator out;
  out.id = index + 1;
  out.fixed_cost_a = require_nonneg(g, "a", ctx);
  out.prod_cost_b = require_nonneg(g, "b", ctx);
  out.prod_cost_c = require_nonneg(g, "c", ctx);
  out.q_min = require_nonneg(g, "q_min", ctx);
  out.q_max = require_nonneg(g, "q_max", ctx);
  out.startup_rate = require_nonneg(g, "V_prime", ctx);
  out.rampup_rate = require_nonneg(g, "V", ctx);
  out.shutdown_rate = require_nonneg(g, "B_prime", ctx);
  out.rampdown_rate = require_nonneg(g, "B", ctx);
  out.min_up = require_nonneg_int(g, "M", ctx);
  out.min_down = require_nonneg_int(g, "L", ctx);
  out.startup_cost = require_nonneg(g, "SU", ctx);
  out.shutdown_cost = require_nonneg(g, "SD", ctx);
  if (out.q_min > out.q_max) throw SchemaError(ctx + ": q_min > q_max");
  return out;
}

}  // namespace

Instance parse_instance_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("top level must be an object");

  Instance inst;
  if (!doc.contains("horizon") || !doc["horizon"].is_number_integer())
    throw SchemaError("missing or non-integer field 'horizon'");
  inst.horizon = doc["horizon"].get<int>();
  if (inst.horizon < 1) throw SchemaError("'horizon' must be >= 1");

  if (!doc.contains("generators") || !doc["generators"].is_array() || doc["generators"].empty())
    throw SchemaError("missing or empty 'generators' array");
  int gi = 0;
  for (const auto& g : doc["generators"]) inst.generators.push_back(parse_generator(g, gi++));

  if (!doc.contains("base_demand") || !doc["base_demand"].is_array())
    throw SchemaError("missing 'base_demand' array");
  for (const auto& d : doc["base_demand"]) {
    if (!d.is_number()) throw SchemaError("'base_demand' entries must be numbers");
    double v = d.get<double>();
    if (v < 0.0) throw SchemaError("'base_demand' entries must be >= 0");
    inst.base_demand.push_back(v);
  }
  if (static_cast<int>(inst.base_demand.size()) != inst.horizon)
    throw SchemaError("'base_demand' length must equal 'horizon'");

  if (!doc.contains("scenario") || !doc["scenario"].is_object())
    throw SchemaError("missing 'scenario' object");
  const json& sc = doc["scenario"];
  if (!sc.contains("branch_periods") || !sc["branch_periods"].is_array())
    throw SchemaError("scenario: missing 'branch_periods' array");
  for (const auto& p : sc["branch_periods"]) {
    if (!p.is_number_integer()) throw SchemaError("scenario: branch periods must be integers");
    inst.scenario.branch_periods.push_back(p.get<int>());
  }
  inst.scenario.epsilon = require_nonneg(sc, "epsilon", "scenario");
  if (sc.contains("branch_probs")) {
    inst.scenario.branch_probs.clear();
    for (const auto& p : sc["branch_probs"]) {
      if (!p.is_number()) throw SchemaError("scenario: branch_probs must be numbers");
      double q = p.get<double>();
      if (q < 0.0) throw SchemaError("scenario: branch_probs must be >= 0");
      inst.scenario.branch_probs.push_back(q);
    }
  }
  for (size_t k = 1; k < inst.scenario.branch_periods.size(); ++k)
    if (inst.scenario.branch_periods[k] <= inst.scenario.branch_periods[k - 1])
      throw SchemaError("scenario: branch_periods must be strictly increasing");
  for (int p : inst.scenario.branch_periods)
    if (p < 2 || p > inst.horizon)
      throw SchemaError("scenario: branch periods must lie in 2..horizon");

  // Initial state defaults to everything off with no residual min-down
  // obligation (elapsed down time >= the unit's own L).
  inst.initial_state.resize(inst.generators.size());
  for (size_t i = 0; i < inst.generators.size(); ++i)
    inst.initial_state[i].elapsed_down = inst.generators[i].min_down;

  if (doc.contains("initial_state")) {
    const json& st = doc["initial_state"];
    if (!st.is_array() || st.size() != inst.generators.size())
      throw SchemaError("'initial_state' must be an array with one entry per generator");
    for (size_t i = 0; i < st.size(); ++i) {
      const json& s = st[i];
      std::string ctx = "initial_state[" + std::to_string(i) + "]";
      if (!s.is_object()) throw SchemaError(ctx + ": must be an object");
      GeneratorState gs;
      if (!s.contains("on") || !s["on"].is_boolean()) throw SchemaError(ctx + ": missing boolean 'on'");
      gs.on = s["on"].get<bool>();
      gs.output = require_nonneg(s, "output", ctx);
      gs.elapsed_up = s.contains("elapsed_up") ? require_nonneg_int(s, "elapsed_up", ctx) : 0;
      gs.elapsed_down = s.contains("elapsed_down") ? require_nonneg_int(s, "elapsed_down", ctx)
                                                   : inst.generators[i].min_down;
      const Generator& g = inst.generators[i];
      if (gs.on && (gs.output < g.q_min || gs.output > g.q_max))
        throw SchemaError(ctx + ": output of an on generator must lie in [q_min, q_max]");
      if (!gs.on && gs.output != 0.0)
        throw SchemaError(ctx + ": output of an off generator must be 0");
      inst.initial_state[i] = gs;
    }
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance_text(buf.str());
}

std::string serialize_instance(const Instance& inst) {
  json doc;
  doc["horizon"] = inst.horizon;
  doc["generators"] = json::array();
  for (const auto& g : inst.generators) {
    doc["generators"].push_back({{"a", g.fixed_cost_a},
                                 {"b", g.prod_cost_b},
                                 {"c", g.prod_cost_c},
                                 {"q_min", g.q_min},
                                 {"q_max", g.q_max},
                                 {"V_prime", g.startup_rate},
                                 {"V", g.rampup_rate},
                                 {"B_prime", g.shutdown_rate},
                                 {"B", g.rampdown_rate},
                                 {"M", g.min_up},
                                 {"L", g.min_down},
                                 {"SU", g.startup_cost},
                                 {"SD", g.shutdown_cost}});
  }
  doc["base_demand"] = inst.base_demand;
  doc["scenario"] = {{"branch_periods", inst.scenario.branch_periods},
                     {"epsilon", inst.scenario.epsilon},
                     {"branch_probs", inst.scenario.branch_probs}};
  doc["initial_state"] = json::array();
  for (const auto& s : inst.initial_state) {
    doc["initial_state"].push_back({{"on", s.on},
                                    {"output", s.output},
                                    {"elapsed_up", s.elapsed_up},
                                    {"elapsed_down", s.elapsed_down}});
  }
  return doc.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << serialize_instance(inst);
}

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto error = [&](const std::string& m) {
    rep.issues.push_back({ValidationIssue::Severity::kError, m});
  };
  auto warn = [&](const std::string& m) {
    rep.issues.push_back({ValidationIssue::Severity::kWarning, m});
  };

  if (inst.horizon < 1) error("horizon must be >= 1");
  if (static_cast<int>(inst.base_demand.size()) != inst.horizon)
    error("base_demand length differs from horizon");
  for (size_t t = 0; t < inst.base_demand.size(); ++t)
    if (inst.base_demand[t] < 0.0)
      error("base demand at period " + std::to_string(t + 1) + " is negative");

  std::vector<int> seen_ids;
  for (const auto& g : inst.generators) {
    std::string who = "generator " + std::to_string(g.id);
    if (std::find(seen_ids.begin(), seen_ids.end(), g.id) != seen_ids.end())
      error(who + ": duplicate id");
    seen_ids.push_back(g.id);
    if (g.q_min < 0.0 || g.q_min > g.q_max) error(who + ": requires 0 <= q_min <= q_max");
    if (g.fixed_cost_a < 0 || g.prod_cost_b < 0 || g.prod_cost_c < 0 || g.startup_cost < 0 ||
        g.shutdown_cost < 0)
      error(who + ": costs must be >= 0");
    if (g.min_up < 0 || g.min_down < 0) error(who + ": min up/down times must be >= 0");
    // A unit whose first-hour (last-hour) output cap is below q_min could
    // never legally start (stop).
    if (g.startup_rate < g.q_min) error(who + ": startup rate V' below q_min");
    if (g.shutdown_rate < g.q_min) error(who + ": shutdown rate B' below q_min");
  }

  const auto& sc = inst.scenario;
  for (size_t k = 1; k < sc.branch_periods.size(); ++k)
    if (sc.branch_periods[k] <= sc.branch_periods[k - 1])
      error("scenario: branch periods must be strictly increasing");
  for (int p : sc.branch_periods)
    if (p < 2 || p > inst.horizon) error("scenario: branch period out of 2..T");
  double psum = 0.0;
  for (double p : sc.branch_probs) psum += p;
  if (sc.branch_probs.size() != 2 || std::abs(psum - 1.0) > 1e-9)
    error("scenario: branch probabilities must be a pair summing to 1");
  if (sc.epsilon < 0.0) error("scenario: epsilon must be >= 0");
  if (sc.epsilon >= 1.0) error("scenario: epsilon must be < 1 (demand would be nonpositive)");

  if (inst.initial_state.size() != inst.generators.size()) {
    error("initial_state size differs from generator count");
  } else {
    for (size_t i = 0; i < inst.initial_state.size(); ++i) {
      const auto& s = inst.initial_state[i];
      const auto& g = inst.generators[i];
      std::string who = "generator " + std::to_string(g.id);
      if (s.on && (s.output < g.q_min || s.output > g.q_max))
        error(who + ": initial output outside [q_min, q_max]");
      if (!s.on && s.output != 0.0) error(who + ": off at t=0 but nonzero output");
    }
  }

  // Capacity shortfall check against the worst-case scaled hourly demand.
  if (sc.epsilon >= 0.0 && sc.epsilon < 1.0 && !inst.base_demand.empty()) {
    double peak = *std::max_element(inst.base_demand.begin(), inst.base_demand.end());
    double worst = (1.0 + sc.epsilon) * peak;
    if (worst > inst.fleet_capacity())
      warn("capacity shortfall: scaled peak demand " + std::to_string(worst) +
           " MW exceeds fleet capacity " + std::to_string(inst.fleet_capacity()) + " MW");
  }
  return rep;
}

}  // namespace ruc
