#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "collopt/allocation.hpp"
#include "collopt/instances.hpp"

namespace collopt {

/// Continuous relaxation of the allocation problem, one variable per
/// (asset, account) pair in row-major order. Lower bounds are all zero.
struct LpRow {
  enum class Kind { less_equal, greater_equal };
  Kind kind = Kind::less_equal;
  std::vector<std::pair<std::size_t, double>> coeffs;
  double rhs = 0.0;
  std::string name;
};

struct LpProblem {
  std::size_t n_vars = 0;
  std::vector<double> upper;      // min(1, B_ij / a_i); unbounded limits -> 1
  std::vector<double> objective;  // Omega_ij, row-major
  std::vector<LpRow> rows;        // consistency, exposure, group rows
};

LpProblem lp_problem(const CollateralInstance& instance);

enum class LpStatus { optimal, infeasible, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  AllocationMatrix allocation;
  double objective = 0.0;
  std::size_t iterations = 0;

  // Certificates, all expected <= 1e-7 at optimal status.
  double max_primal_residual = 0.0;
  double max_dual_residual = 0.0;
  double complementary_residual = 0.0;
};

/// Bounded-variable two-phase primal simplex with Bland's rule. Exposure
/// rows are scaled by 1/c_j before solving so the tableau stays O(1).
/// Deterministic: identical instances give identical pivot sequences.
LpSolution solve_lp(const CollateralInstance& instance,
                    std::size_t max_iterations = 100000);

/// report.objective - lp.objective. Requires lp.status == optimal.
double lp_gap(const LpSolution& lp, const FeasibilityReport& report);

/// MPS text of the unscaled problem; columns named Q_i_j in row-major order.
std::string lp_to_mps(const CollateralInstance& instance);

}  // namespace collopt
