#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collopt/instances.hpp"
#include "collopt/qubo.hpp"

namespace collopt {

/// Penalty multipliers. lambda[0] always weights the cost term; the meaning
/// of the rest depends on the encoding (see the builders below).
struct PenaltyWeights {
  std::array<double, 7> lambda{};

  double operator[](std::size_t k) const { return lambda[k]; }
  void validate() const;  // all >= 0
};

/// Binary digits needed for a slack variable with upper bound u > 0:
/// ceil(log2(u)), minimum 1.
std::size_t slack_bit_count(double upper_bound);

/// Discretization weights p_b = 2^(b-1) (qmax - qmin) / (2^B - 1) for
/// b = 1..B. Summed in ascending order they reproduce qmax - qmin.
std::vector<double> bit_weights(std::size_t bits, double qmin, double qmax);

/// Bits kept for a pair whose quantity limit binds:
/// min(B, floor(log2(limit/quantity * M))), 0 if even one grid step violates
/// the limit, B if the limit does not bind. Guarantees
/// (2^n - 1)/M <= limit/quantity.
std::size_t truncated_bits(double limit, double quantity, std::size_t m_value,
                           std::size_t bit_width);

/// Per-term scale factors: divide by the largest magnitude, then shift by a
/// decimal power so the smallest magnitude lands in [1, 10). Scaling a term
/// by a positive factor never changes its argmin set. All-zero collections
/// get factor 1 and a warning.
std::vector<double> normalize_terms(
    const std::vector<std::vector<double>>& term_coefficient_sets,
    std::vector<std::string>* warnings = nullptr);

// --- Knapsack encodings (minimization convention: value term negated) ---

/// Log-encoded slack: energy = -sum v x + lambda0 (sum w x - W + S)^2 with
/// S spanning 0..2^ceil(log2 W) - 1.
QuboModel kp_qubo_log(const KnapsackInstance& instance, double lambda0);

/// One-hot slack over W indicator bits:
/// energy = -sum v x + lambda0 (sum w x - sum k s_k)^2
///          + lambda1 (1 - sum s_k)^2.
QuboModel kp_qubo_onehot(const KnapsackInstance& instance, double lambda0,
                         double lambda1);

/// Slack-free penalty from the second-order expansion of exp(g), g = sum w x - W:
/// energy = -lambda_cost sum v x + lambda_linear g + lambda_quadratic g^2.
QuboModel kp_qubo_unbalanced(const KnapsackInstance& instance,
                             double lambda_linear, double lambda_quadratic,
                             double lambda_cost);

// --- Collateral encodings ---

struct CoQuboOptions {
  std::size_t bit_width = 7;  // B; grid step 1/(2^B - 1)
  bool normalize = true;      // apply normalize_terms before the lambdas
  bool cost_quantity_weighted = false;  // multiply cost coefficients by a_i
};

/// Raw coefficient accumulator for one penalty/cost term before weighting.
struct QuboPolynomial {
  std::size_t dimension = 0;
  std::vector<double> linear;
  std::map<QuadKey, double> quadratic;
  double offset = 0.0;

  QuboPolynomial() = default;
  explicit QuboPolynomial(std::size_t dim) : dimension(dim), linear(dim, 0.0) {}

  void add_linear(std::size_t i, double c);
  void add_quadratic(std::size_t i, std::size_t j, double c);
  /// weight * (sum_k coeff_k x_idx_k + constant)
  void add_affine(std::span<const std::pair<std::size_t, double>> terms,
                  double constant, double weight);
  /// weight * (sum_k coeff_k x_idx_k + constant)^2
  void add_squared(std::span<const std::pair<std::size_t, double>> terms,
                   double constant, double weight);

  double energy(std::span<const std::uint8_t> bits) const;
  /// Nonzero |linear| and |quadratic| values, the collection fed to
  /// normalize_terms.
  std::vector<double> coefficient_magnitudes() const;
};

/// One weighted term of a built model. The final model accumulates
/// weight * scale * poly for each component, so
/// poly.energy(x) == (component contribution at x) / (weight * scale).
struct TermComponent {
  std::string name;
  double weight = 0.0;  // signed multiplier (negative for reward terms)
  double scale = 1.0;   // normalize_terms factor, 1 when normalization is off
  QuboPolynomial poly;
};

struct CoQuboBuild {
  QuboModel model;
  std::vector<TermComponent> terms;

  const TermComponent* find_term(const std::string& name) const;
};

/// Slack-based formulation. Weights: lambda0 cost, lambda1 consistency,
/// lambda2 exposure equality, lambda3 group caps. Decision bits are
/// truncated per pair limit; each asset gets a consistency slack block of
/// ceil(log2 M) bits; exposure is relaxed to an equality and carries no
/// slack. Unreachable exposures are flagged on model.warnings.
CoQuboBuild co_qubo_balanced(const CollateralInstance& instance,
                             const CoQuboOptions& options,
                             const PenaltyWeights& weights);

/// Slack-free formulation over decision bits only. Weights:
/// lambda0 cost, lambda1/lambda2 consistency linear/quadratic,
/// lambda3/lambda4 exposure linear/quadratic (linear term enters negated so
/// over-coverage is rewarded), lambda5/lambda6 group linear/quadratic.
CoQuboBuild co_qubo_unbalanced(const CollateralInstance& instance,
                               const CoQuboOptions& options,
                               const PenaltyWeights& weights);

/// Decision-bit layout shared by both collateral encodings (no slack blocks).
VariableLayout co_decision_layout(const CollateralInstance& instance,
                                  std::size_t bit_width);

}  // namespace collopt
