//
//  risk.hpp — ruc
//
//  Conditional mean-upper semideviation and its nested (composite) form on
//  scenario trees, plus the linear epigraph stencil used to embed the
//  measure in a MILP.  All functions here are pure.
//

#ifndef RUC_RISK_HPP
#define RUC_RISK_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ruc/scenario_tree.hpp"

namespace ruc {

enum class RiskKind { kExpectation, kMeanUpperSemideviation };

struct RiskSpec {
  RiskKind kind = RiskKind::kMeanUpperSemideviation;
  double lambda = 0.0;  // in [0,1]; ignored for kExpectation

  // Effective penalty: expectation is the lambda = 0 special case.
  double effective_lambda() const { return kind == RiskKind::kExpectation ? 0.0 : lambda; }
};

// rho(Z) = m + lambda * sum_c p_c (v_c - m)_+  with  m = sum_c p_c v_c.
// Throws ValidationError on empty input, mismatched lengths, lambda outside
// [0,1], or probabilities not summing to 1 within 1e-9.
double conditional_musd(std::span<const double> child_values, std::span<const double> child_probs,
                        double lambda);

// Backward recursion over the tree:  value(leaf) = cost(leaf),
// value(n) = cost(n) + rho(children's values);  returns value(root).
// `node_costs` holds one value per tree node, indexed by node id.
double composite_risk(const ScenarioTree& tree, std::span<const double> node_costs,
                      const RiskSpec& spec);

// --- coherence property check -----------------------------------------------

struct CoherenceReport {
  int trials = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Randomized check of axioms (A1) convexity, (A2) monotonicity,
// (A3) translational equivariance, (A4) positive homogeneity at tolerance
// 1e-9, on sampled finite random variables.
CoherenceReport check_coherence(const RiskSpec& spec, int trials, std::uint64_t rng_seed);

// --- epigraph linearization ---------------------------------------------------

// Linear stencil for one internal tree node under minimization.  With
// cost-to-go variables theta_c for the children, auxiliary scalars
//   m   (free):        m = sum_c p_c theta_c
//   s_c (>= 0):        s_c >= theta_c - m
// the node's cost-to-go is
//   theta_n = cost_n + m + lambda * sum_c p_c s_c.
// s_c tightens to (theta_c - m)_+ at optimality because theta_root is
// minimized and every coefficient on the recursion path is nonnegative.
struct RiskStencil {
  std::vector<double> child_probs;
  double lambda = 0.0;
};

// Throws ValidationError on an empty child set (a leaf has no stencil).
RiskStencil epigraph_coefficients(std::span<const double> child_probs, double lambda);

}  // namespace ruc

#endif
