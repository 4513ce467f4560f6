#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "collopt/instances.hpp"
#include "collopt/matrix.hpp"
#include "collopt/qubo.hpp"

namespace collopt {

/// Absolute tolerance for consistency residuals. Decoded allocations are
/// dyadic fractions over M, so anything above this is a real violation.
constexpr double kConsistencyTol = 1e-9;

/// Fractional allocation Q(i, j) of asset i posted to account j. Entries
/// must lie in [0, 1]; the row/column constraints are feasibility questions,
/// not type invariants.
class AllocationMatrix {
 public:
  AllocationMatrix() = default;
  explicit AllocationMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }

  friend bool operator==(const AllocationMatrix&, const AllocationMatrix&) = default;

 private:
  Matrix entries_;
};

struct LimitViolation {
  std::size_t asset = 0;
  std::size_t account = 0;
  double excess = 0.0;  // quantity units above the pair limit
};

struct GroupViolation {
  std::size_t group = 0;
  std::size_t account = 0;
  double excess = 0.0;
};

/// Everything one needs to judge a decoded allocation: the cost objective,
/// per-asset oversell residuals, per-account exposure coverage ratios and
/// hard-limit violations. `feasible_within` is the epsilon-relaxed verdict:
/// consistency within kConsistencyTol, no limit or group violations, every
/// coverage >= 1 - epsilon.
struct FeasibilityReport {
  double objective = 0.0;
  std::vector<double> consistency_residuals;  // max(0, sum_j Q_ij - 1)
  std::vector<double> exposure_coverage;      // posted/required, 1 if c_j = 0
  std::vector<LimitViolation> limit_violations;
  std::vector<GroupViolation> group_violations;
  bool feasible_within = false;

  /// Largest relative exposure shortfall, max_j max(0, 1 - coverage_j).
  double max_exposure_shortfall() const;
};

/// Cost coefficients Omega(i, j) = |tier_i - duration_j|; entries in [0, 1].
Matrix omega_matrix(const CollateralInstance& instance);

FeasibilityReport evaluate_allocation(const AllocationMatrix& q,
                                      const CollateralInstance& instance,
                                      double epsilon);

/// Reads the decision bits of `bits` through `layout` and assembles the
/// allocation matrix. Slack bits are ignored.
AllocationMatrix decode_solution(std::span<const std::uint8_t> bits,
                                 const VariableLayout& layout,
                                 const CollateralInstance& instance);

}  // namespace collopt
