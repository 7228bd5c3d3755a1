//
//  risk.cpp — ruc
//

#include "ruc/risk.hpp"

#include <cmath>
#include <random>

namespace ruc {

double conditional_musd(std::span<const double> child_values, std::span<const double> child_probs,
                        double lambda) {
  if (child_values.empty()) throw ValidationError("conditional_musd: empty child list");
  if (child_values.size() != child_probs.size())
    throw ValidationError("conditional_musd: values/probs length mismatch");
  if (lambda < 0.0 || lambda > 1.0) throw ValidationError("conditional_musd: lambda outside [0,1]");
  double psum = 0.0;
  for (double p : child_probs) psum += p;
  if (std::abs(psum - 1.0) > 1e-9)
    throw ValidationError("conditional_musd: probabilities sum to " + std::to_string(psum));

  double mean = 0.0;
  for (size_t c = 0; c < child_values.size(); ++c) mean += child_probs[c] * child_values[c];
  double semidev = 0.0;
  for (size_t c = 0; c < child_values.size(); ++c)
    semidev += child_probs[c] * std::max(child_values[c] - mean, 0.0);
  return mean + lambda * semidev;
}

double composite_risk(const ScenarioTree& tree, std::span<const double> node_costs,
                      const RiskSpec& spec) {
  if (static_cast<int>(node_costs.size()) != tree.size())
    throw ValidationError("composite_risk: one cost per tree node required");
  const double lambda = spec.effective_lambda();

  // Children have larger ids than parents (construction invariant), so one
  // reverse sweep evaluates the recursion.
  std::vector<double> value(node_costs.begin(), node_costs.end());
  std::vector<double> cv, cp;
  for (int id = tree.size() - 1; id >= 0; --id) {
    const TreeNode& n = tree.node(id);
    if (n.children.empty()) continue;
    cv.clear();
    cp.clear();
    for (int c : n.children) {
      cv.push_back(value[c]);
      cp.push_back(tree.node(c).cond_prob);
    }
    value[id] = node_costs[id] + conditional_musd(cv, cp, lambda);
  }
  return value[tree.root()];
}

RiskStencil epigraph_coefficients(std::span<const double> child_probs, double lambda) {
  if (child_probs.empty()) throw ValidationError("epigraph_coefficients: node has no children");
  if (lambda < 0.0 || lambda > 1.0) throw ValidationError("epigraph_coefficients: lambda outside [0,1]");
  double psum = 0.0;
  for (double p : child_probs) psum += p;
  if (std::abs(psum - 1.0) > 1e-9)
    throw ValidationError("epigraph_coefficients: probabilities sum to " + std::to_string(psum));
  return RiskStencil{{child_probs.begin(), child_probs.end()}, lambda};
}

namespace {

// One sampled finite probability space with two random variables on it.
struct Sample {
  std::vector<double> probs, z, w;
};

Sample draw_sample(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size_dist(2, 8);
  std::uniform_real_distribution<double> val_dist(-100.0, 100.0);
  std::uniform_real_distribution<double> mass_dist(0.05, 1.0);
  Sample s;
  int n = size_dist(rng);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    s.probs.push_back(mass_dist(rng));
    total += s.probs.back();
  }
  for (auto& p : s.probs) p /= total;
  for (int i = 0; i < n; ++i) {
    s.z.push_back(val_dist(rng));
    s.w.push_back(val_dist(rng));
  }
  return s;
}

}  // namespace

CoherenceReport check_coherence(const RiskSpec& spec, int trials, std::uint64_t rng_seed) {
  if (trials < 1) throw ValidationError("check_coherence: trials must be >= 1");
  const double lambda = spec.effective_lambda();
  const double tol = 1e-9;
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> alpha_dist(0.0, 1.0);
  std::uniform_real_distribution<double> shift_dist(-50.0, 50.0);
  std::uniform_real_distribution<double> scale_dist(0.01, 10.0);
  std::uniform_real_distribution<double> gap_dist(0.0, 10.0);

  CoherenceReport rep;
  rep.trials = trials;
  auto rho = [&](const std::vector<double>& v, const std::vector<double>& p) {
    return conditional_musd(v, p, lambda);
  };

  for (int t = 0; t < trials; ++t) {
    Sample s = draw_sample(rng);
    const size_t n = s.z.size();
    const double rho_z = rho(s.z, s.probs);
    const double rho_w = rho(s.w, s.probs);
    // Violation tolerance is scaled by the magnitude of the values involved.
    const double scale = std::max({1.0, std::abs(rho_z), std::abs(rho_w)});

    // (A1) convexity
    double alpha = alpha_dist(rng);
    std::vector<double> mix(n);
    for (size_t i = 0; i < n; ++i) mix[i] = alpha * s.z[i] + (1.0 - alpha) * s.w[i];
    if (rho(mix, s.probs) > alpha * rho_z + (1.0 - alpha) * rho_w + tol * scale)
      rep.violations.push_back("A1 convexity violated at trial " + std::to_string(t));

    // (A2) monotonicity: build W <= Z pointwise.
    std::vector<double> below(n);
    for (size_t i = 0; i < n; ++i) below[i] = s.z[i] - gap_dist(rng);
    if (rho(below, s.probs) > rho_z + tol * scale)
      rep.violations.push_back("A2 monotonicity violated at trial " + std::to_string(t));

    // (A3) translational equivariance
    double c = shift_dist(rng);
    std::vector<double> shifted(n);
    for (size_t i = 0; i < n; ++i) shifted[i] = s.z[i] + c;
    if (std::abs(rho(shifted, s.probs) - (rho_z + c)) > tol * scale)
      rep.violations.push_back("A3 translational equivariance violated at trial " + std::to_string(t));

    // (A4) positive homogeneity
    double k = scale_dist(rng);
    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i) scaled[i] = k * s.z[i];
    if (std::abs(rho(scaled, s.probs) - k * rho_z) > tol * scale * k)
      rep.violations.push_back("A4 positive homogeneity violated at trial " + std::to_string(t));
  }
  return rep;
}

}  // namespace ruc
