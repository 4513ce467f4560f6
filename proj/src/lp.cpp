#include "collopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace collopt {

namespace {

constexpr double kTol = 1e-7;       // feasibility / optimality
constexpr double kPivotTol = 1e-9;  // smallest usable pivot element
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

LpProblem lp_problem(const CollateralInstance& instance) {
  instance.validate();
  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();

  LpProblem problem;
  problem.n_vars = n * m;
  problem.upper.assign(n * m, 1.0);
  problem.objective.assign(n * m, 0.0);

  const Matrix omega = omega_matrix(instance);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      problem.objective[k] = omega(i, j);
      const double limit = instance.limits(i, j);
      const double quantity = instance.assets[i].quantity;
      if (limit != kUnboundedLimit && quantity > 0.0)
        problem.upper[k] = std::min(1.0, limit / quantity);
      else if (limit == 0.0)
        problem.upper[k] = 0.0;
    }

  for (std::size_t i = 0; i < n; ++i) {
    LpRow row;
    row.kind = LpRow::Kind::less_equal;
    row.rhs = 1.0;
    row.name = "CONS_" + std::to_string(i);
    for (std::size_t j = 0; j < m; ++j) row.coeffs.emplace_back(i * m + j, 1.0);
    problem.rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < m; ++j) {
    LpRow row;
    row.kind = LpRow::Kind::greater_equal;
    row.rhs = instance.accounts[j].exposure;
    row.name = "EXPO_" + std::to_string(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double coeff = instance.assets[i].quantity *
                           instance.assets[i].unit_value * instance.haircut(i, j);
      if (coeff != 0.0) row.coeffs.emplace_back(i * m + j, coeff);
    }
    problem.rows.push_back(std::move(row));
  }
  if (instance.groups) {
    const std::size_t g_count = instance.n_groups();
    for (std::size_t g = 0; g < g_count; ++g)
      for (std::size_t j = 0; j < m; ++j) {
        const double cap = instance.groups->caps(g, j);
        LpRow row;
        row.kind = LpRow::Kind::less_equal;
        row.rhs = cap;
        row.name = "GRP_" + std::to_string(g) + "_" + std::to_string(j);
        for (std::size_t i = 0; i < n; ++i) {
          if (instance.groups->membership(i, g) == 0.0) continue;
          const double coeff = instance.assets[i].quantity;
          if (coeff != 0.0) row.coeffs.emplace_back(i * m + j, coeff);
        }
        if (!row.coeffs.empty()) problem.rows.push_back(std::move(row));
      }
  }
  return problem;
}

namespace {

enum class VarStatus { basic, at_lower, at_upper };

/// Dense two-phase bounded-variable primal simplex. Every row carries an
/// artificial column, so the final tableau's artificial block is B^-1 and
/// yields the row duals directly.
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& problem, std::size_t max_iterations)
      : max_iterations_(max_iterations) {
    const std::size_t rows = problem.rows.size();
    n_struct_ = problem.n_vars;
    n_cols_ = n_struct_ + rows /*slack*/ + rows /*artificial*/;
    slack0_ = n_struct_;
    art0_ = n_struct_ + rows;

    lower_.assign(n_cols_, 0.0);
    upper_.assign(n_cols_, kInf);
    cost_.assign(n_cols_, 0.0);
    for (std::size_t k = 0; k < n_struct_; ++k) {
      upper_[k] = problem.upper[k];
      cost_[k] = problem.objective[k];
    }

    // Scale >= rows by their rhs where possible; keeps the tableau O(1).
    tableau_.assign(rows, std::vector<double>(n_cols_, 0.0));
    rhs_.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const LpRow& row = problem.rows[r];
      double scale = 1.0;
      if (row.kind == LpRow::Kind::greater_equal && row.rhs > 0.0)
        scale = 1.0 / row.rhs;
      for (const auto& [k, coeff] : row.coeffs) tableau_[r][k] = coeff * scale;
      rhs_[r] = row.rhs * scale;
      const double slack_sign =
          row.kind == LpRow::Kind::less_equal ? 1.0 : -1.0;
      tableau_[r][slack0_ + r] = slack_sign;
      tableau_[r][art0_ + r] = 1.0;
    }

    status_.assign(n_cols_, VarStatus::at_lower);
    basis_.assign(rows, 0);
    basic_value_.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      basis_[r] = art0_ + r;
      status_[art0_ + r] = VarStatus::basic;
      basic_value_[r] = rhs_[r];  // rhs >= 0 by construction
    }
  }

  LpStatus run() {
    // Phase 1: minimize the artificial sum.
    std::vector<double> phase1_cost(n_cols_, 0.0);
    for (std::size_t r = 0; r < basis_.size(); ++r) phase1_cost[art0_ + r] = 1.0;
    load_costs(phase1_cost);
    if (!iterate()) return LpStatus::iteration_limit;
    if (objective_value(phase1_cost) > kTol) return LpStatus::infeasible;

    pivot_out_artificials();
    for (std::size_t r = 0; r < basis_.size(); ++r) upper_[art0_ + r] = 0.0;

    load_costs(cost_);
    if (!iterate()) return LpStatus::iteration_limit;
    return LpStatus::optimal;
  }

  std::size_t iterations() const { return iterations_; }

  std::vector<double> solution() const {
    std::vector<double> x(n_cols_, 0.0);
    for (std::size_t k = 0; k < n_cols_; ++k)
      x[k] = status_[k] == VarStatus::at_upper ? upper_[k] : lower_[k];
    for (std::size_t r = 0; r < basis_.size(); ++r) x[basis_[r]] = basic_value_[r];
    return x;
  }

  /// Row duals from the artificial block (B^-1) of the tableau.
  std::vector<double> duals() const {
    std::vector<double> y(basis_.size(), 0.0);
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < basis_.size(); ++r)
        acc += cost_[basis_[r]] * tableau_[r][art0_ + j];
      y[j] = acc;
    }
    return y;
  }

  std::size_t n_struct() const { return n_struct_; }
  std::size_t slack0() const { return slack0_; }
  std::size_t art0() const { return art0_; }
  VarStatus var_status(std::size_t k) const { return status_[k]; }
  double var_upper(std::size_t k) const { return upper_[k]; }
  const std::vector<double>& reduced_costs() const { return reduced_; }

 private:
  double objective_value(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t r = 0; r < basis_.size(); ++r)
      v += cost[basis_[r]] * basic_value_[r];
    for (std::size_t k = 0; k < n_cols_; ++k)
      if (status_[k] == VarStatus::at_upper) v += cost[k] * upper_[k];
    return v;
  }

  void load_costs(const std::vector<double>& cost) {
    reduced_ = cost;
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < n_cols_; ++k)
        reduced_[k] -= cb * tableau_[r][k];
    }
  }

  /// Bland's rule: smallest-index eligible entering variable.
  std::size_t pick_entering() const {
    for (std::size_t k = 0; k < n_cols_; ++k) {
      if (status_[k] == VarStatus::basic) continue;
      if (upper_[k] <= lower_[k]) continue;  // fixed (phase-2 artificials)
      if (status_[k] == VarStatus::at_lower && reduced_[k] < -kTol) return k;
      if (status_[k] == VarStatus::at_upper && reduced_[k] > kTol) return k;
    }
    return n_cols_;
  }

  bool iterate() {
    while (true) {
      if (iterations_ >= max_iterations_) return false;
      const std::size_t q = pick_entering();
      if (q == n_cols_) return true;  // optimal for the loaded costs
      const double dir = status_[q] == VarStatus::at_lower ? 1.0 : -1.0;

      // Ratio test: first basic variable to hit a bound, or the entering
      // variable reaching its opposite bound.
      double t_best = upper_[q] - lower_[q];
      std::size_t leave_row = basis_.size();
      for (std::size_t r = 0; r < basis_.size(); ++r) {
        const double eff = dir * tableau_[r][q];
        double t_row = kInf;
        if (eff > kPivotTol)
          t_row = (basic_value_[r] - lower_[basis_[r]]) / eff;
        else if (eff < -kPivotTol && upper_[basis_[r]] < kInf)
          t_row = (upper_[basis_[r]] - basic_value_[r]) / (-eff);
        t_row = std::max(t_row, 0.0);
        if (t_row < t_best - kPivotTol ||
            (leave_row < basis_.size() && t_row <= t_best + kPivotTol &&
             basis_[r] < basis_[leave_row])) {
          t_best = t_row;
          leave_row = r;
        }
      }
      if (t_best == kInf)
        throw std::runtime_error("simplex: unbounded direction");

      ++iterations_;
      const double t = t_best;
      for (std::size_t r = 0; r < basis_.size(); ++r)
        basic_value_[r] -= dir * t * tableau_[r][q];

      if (leave_row == basis_.size()) {
        // The entering variable traverses its whole range: bound flip only.
        status_[q] = status_[q] == VarStatus::at_lower ? VarStatus::at_upper
                                                       : VarStatus::at_lower;
        continue;
      }

      const std::size_t leaving = basis_[leave_row];
      const double entering_value =
          (status_[q] == VarStatus::at_lower ? lower_[q] : upper_[q]) + dir * t;
      // Classify which bound the leaving variable hit.
      const double eff = dir * tableau_[leave_row][q];
      status_[leaving] = eff > 0.0 ? VarStatus::at_lower : VarStatus::at_upper;

      pivot(leave_row, q);
      basis_[leave_row] = q;
      status_[q] = VarStatus::basic;
      basic_value_[leave_row] = entering_value;
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    std::vector<double>& prow = tableau_[row];
    const double inv = 1.0 / prow[col];
    for (double& v : prow) v *= inv;
    prow[col] = 1.0;  // exact
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (r == row) continue;
      const double factor = tableau_[r][col];
      if (factor == 0.0) continue;
      std::vector<double>& target = tableau_[r];
      for (std::size_t k = 0; k < n_cols_; ++k) target[k] -= factor * prow[k];
      target[col] = 0.0;
    }
    const double zfac = reduced_[col];
    if (zfac != 0.0) {
      for (std::size_t k = 0; k < n_cols_; ++k) reduced_[k] -= zfac * prow[k];
      reduced_[col] = 0.0;
    }
  }

  /// Degenerate pivots replacing basic artificials after phase 1. Rows with
  /// no usable pivot element are redundant; their artificial stays basic at
  /// zero and is pinned there by its bounds.
  void pivot_out_artificials() {
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (basis_[r] < art0_) continue;
      std::size_t col = n_cols_;
      for (std::size_t k = 0; k < art0_; ++k) {
        if (status_[k] == VarStatus::basic) continue;
        if (std::fabs(tableau_[r][k]) > kPivotTol) {
          col = k;
          break;
        }
      }
      if (col == n_cols_) continue;
      const std::size_t leaving = basis_[r];
      const double entering_value =
          status_[col] == VarStatus::at_lower ? lower_[col] : upper_[col];
      status_[leaving] = VarStatus::at_lower;
      pivot(r, col);
      basis_[r] = col;
      status_[col] = VarStatus::basic;
      basic_value_[r] = entering_value;
    }
  }

  std::size_t max_iterations_;
  std::size_t iterations_ = 0;
  std::size_t n_struct_ = 0, n_cols_ = 0, slack0_ = 0, art0_ = 0;
  std::vector<std::vector<double>> tableau_;
  std::vector<double> rhs_, lower_, upper_, cost_, reduced_;
  std::vector<std::size_t> basis_;
  std::vector<double> basic_value_;
  std::vector<VarStatus> status_;
};

}  // namespace

LpSolution solve_lp(const CollateralInstance& instance,
                    std::size_t max_iterations) {
  const LpProblem problem = lp_problem(instance);
  BoundedSimplex simplex(problem, max_iterations);

  LpSolution solution;
  solution.status = simplex.run();
  solution.iterations = simplex.iterations();

  const std::vector<double> x = simplex.solution();
  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();
  Matrix q(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      q(i, j) = std::clamp(x[i * m + j], 0.0, 1.0);
  solution.allocation = AllocationMatrix(std::move(q));
  for (std::size_t k = 0; k < problem.n_vars; ++k)
    solution.objective += problem.objective[k] * x[k];

  if (solution.status == LpStatus::optimal) {
    // Certify against the scaled system the solver actually worked on.
    const std::vector<double> y = simplex.duals();
    LpProblem scaled = problem;
    for (auto& row : scaled.rows)
      if (row.kind == LpRow::Kind::greater_equal && row.rhs > 0.0) {
        const double s = 1.0 / row.rhs;
        for (auto& [k, coeff] : row.coeffs) coeff *= s;
        row.rhs = 1.0;
      }
    for (std::size_t r = 0; r < scaled.rows.size(); ++r) {
      const LpRow& row = scaled.rows[r];
      double lhs = 0.0;
      for (const auto& [k, coeff] : row.coeffs) lhs += coeff * x[k];
      const double violation = row.kind == LpRow::Kind::less_equal
                                   ? lhs - row.rhs
                                   : row.rhs - lhs;
      solution.max_primal_residual =
          std::max(solution.max_primal_residual, violation);
    }
    std::vector<double> reduced = problem.objective;
    for (std::size_t r = 0; r < scaled.rows.size(); ++r)
      for (const auto& [k, coeff] : scaled.rows[r].coeffs)
        reduced[k] -= y[r] * coeff;
    for (std::size_t k = 0; k < problem.n_vars; ++k) {
      const double d = reduced[k];
      const double xv = x[k];
      const double uv = problem.upper[k];
      switch (simplex.var_status(k)) {
        case VarStatus::basic:
          solution.max_dual_residual =
              std::max(solution.max_dual_residual, std::fabs(d));
          break;
        case VarStatus::at_lower:
          solution.max_dual_residual =
              std::max(solution.max_dual_residual, -d);
          break;
        case VarStatus::at_upper:
          solution.max_dual_residual = std::max(solution.max_dual_residual, d);
          break;
      }
      if (d > kTol)
        solution.complementary_residual =
            std::max(solution.complementary_residual, d * xv);
      else if (d < -kTol)
        solution.complementary_residual = std::max(
            solution.complementary_residual, -d * std::max(0.0, uv - xv));
    }
    // Dual feasibility of the row multipliers: <= rows need y <= 0, >= rows
    // need y >= 0 in the min convention, and inactive rows need y ~ 0; both
    // are equivalent to the slack-variable reduced costs being sign-correct.
    for (std::size_t r = 0; r < scaled.rows.size(); ++r) {
      const std::size_t sk = simplex.slack0() + r;
      if (simplex.var_status(sk) == VarStatus::basic) continue;
      const double sign =
          scaled.rows[r].kind == LpRow::Kind::less_equal ? 1.0 : -1.0;
      const double d = -sign * y[r];  // reduced cost of the slack variable
      if (d < -kTol)
        solution.max_dual_residual = std::max(solution.max_dual_residual, -d);
    }
  }
  return solution;
}

double lp_gap(const LpSolution& lp, const FeasibilityReport& report) {
  if (lp.status != LpStatus::optimal)
    throw std::logic_error("lp_gap: LP solution is not optimal");
  return report.objective - lp.objective;
}

namespace {

std::string mps_number(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

}  // namespace

std::string lp_to_mps(const CollateralInstance& instance) {
  const LpProblem problem = lp_problem(instance);
  const std::size_t m = instance.n_accounts();
  std::ostringstream out;
  out << "NAME          COLLATERAL\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (const auto& row : problem.rows)
    out << (row.kind == LpRow::Kind::less_equal ? " L  " : " G  ") << row.name
        << "\n";

  // Column-major emission in Q_i_j (row-major pair) order.
  out << "COLUMNS\n";
  for (std::size_t k = 0; k < problem.n_vars; ++k) {
    const std::string name =
        "Q_" + std::to_string(k / m) + "_" + std::to_string(k % m);
    if (problem.objective[k] != 0.0)
      out << "    " << name << "  COST  " << mps_number(problem.objective[k])
          << "\n";
    for (const auto& row : problem.rows)
      for (const auto& [var, coeff] : row.coeffs)
        if (var == k)
          out << "    " << name << "  " << row.name << "  " << mps_number(coeff)
              << "\n";
  }
  out << "RHS\n";
  for (const auto& row : problem.rows)
    out << "    RHS  " << row.name << "  " << mps_number(row.rhs) << "\n";
  out << "BOUNDS\n";
  for (std::size_t k = 0; k < problem.n_vars; ++k)
    out << " UP BND  Q_" << k / m << "_" << k % m << "  "
        << mps_number(problem.upper[k]) << "\n";
  out << "ENDATA\n";
  return out.str();
}

}  // namespace collopt
