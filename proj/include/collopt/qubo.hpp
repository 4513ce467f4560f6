#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace collopt {

using BitVector = std::vector<std::uint8_t>;
using SpinVector = std::vector<std::int8_t>;

std::string bits_to_string(std::span<const std::uint8_t> bits);
BitVector bits_from_string(const std::string& s);

/// Spin image of a bitstring under sigma = 1 - 2x (x=0 -> +1, x=1 -> -1).
SpinVector spins_from_bits(std::span<const std::uint8_t> bits);

/// Decision-bit block for one (asset, account) pair. `weights[b]` is the
/// fractional allocation contributed by bit b; blocks shortened by limit
/// truncation simply carry fewer bits.
struct DecisionBits {
  std::size_t asset = 0;
  std::size_t account = 0;
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

/// Slack block for one constraint, identified by a stable string id
/// ("con_3", "grp_0_2", "kp_slack").
struct SlackBits {
  std::string id;
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

struct VariableLayout {
  std::vector<DecisionBits> decision;
  std::vector<SlackBits> slack;
  std::size_t total = 0;

  std::size_t decision_bit_count() const;
  const DecisionBits* find(std::size_t asset, std::size_t account) const;
  /// Checks that decision and slack indices are disjoint and exactly cover
  /// 0..total-1. Throws std::invalid_argument otherwise.
  void validate() const;
};

using QuadKey = std::pair<std::size_t, std::size_t>;

/// Upper-triangular QUBO: energy(x) = sum_i linear[i] x_i
/// + sum_{i<j} quadratic[{i,j}] x_i x_j + offset, x in {0,1}^N.
/// Quadratic terms are stored sparsely with row-major (i, j) key order so
/// iteration -- and every artifact built from it -- is reproducible.
struct QuboModel {
  std::size_t dimension = 0;
  std::vector<double> linear;
  std::map<QuadKey, double> quadratic;
  double offset = 0.0;
  VariableLayout layout;
  std::vector<std::string> warnings;

  double energy(std::span<const std::uint8_t> bits) const;
  void validate() const;
};

/// Ising counterpart: energy(s) = -sum_j h[j] s_j - sum_{j<k} J[{j,k}] s_j s_k
/// + epsilon, s in {-1,+1}^N.
struct IsingModel {
  std::size_t dimension = 0;
  std::vector<double> h;
  std::map<QuadKey, double> coupling;
  double epsilon = 0.0;

  double energy(std::span<const std::int8_t> spins) const;
};

/// Change of variables x = (1 - sigma) / 2. Energies agree state-for-state:
/// ising.energy(spins_from_bits(x)) == qubo.energy(x).
IsingModel qubo_to_ising(const QuboModel& q);

/// Inverse transform; composes with qubo_to_ising to the identity on
/// coefficients. The layout is not representable on the Ising side and is
/// left empty.
QuboModel ising_to_qubo(const IsingModel& ising);

/// Flattened adjacency (CSR) view of a QuboModel for the hot paths:
/// single-flip energy deltas in O(degree) and fast full evaluations.
class QuboEvaluator {
 public:
  explicit QuboEvaluator(const QuboModel& model);

  std::size_t dimension() const { return linear_.size(); }
  double energy(std::span<const std::uint8_t> bits) const;

  /// E(bits with `flip` toggled) - E(bits).
  double delta(std::span<const std::uint8_t> bits, std::size_t flip) const;

  /// Same contract over a 0.0/1.0-valued state vector; the sampler's hot
  /// path, which avoids per-neighbor integer conversions.
  double delta(std::span<const double> state, std::size_t flip) const;

 private:
  std::vector<double> linear_;
  std::vector<std::size_t> row_begin_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
  double offset_ = 0.0;
};

/// Convenience wrapper matching the operation name used elsewhere.
inline double delta_energy(const QuboEvaluator& eval,
                           std::span<const std::uint8_t> bits,
                           std::size_t flip) {
  return eval.delta(bits, flip);
}

/// FNV-1a over the canonical byte serialization of the coefficients;
/// identifies a model in sample-set metadata.
std::string model_hash(const QuboModel& model);

}  // namespace collopt
