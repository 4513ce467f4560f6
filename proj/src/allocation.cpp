#include "collopt/allocation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace collopt {

AllocationMatrix::AllocationMatrix(Matrix entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.rows(); ++i)
    for (std::size_t j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(i, j);
      if (std::isnan(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("allocation: entry outside [0, 1]");
    }
}

double FeasibilityReport::max_exposure_shortfall() const {
  double worst = 0.0;
  for (double c : exposure_coverage) worst = std::max(worst, 1.0 - c);
  return worst;
}

Matrix omega_matrix(const CollateralInstance& instance) {
  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();
  Matrix omega(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      omega(i, j) = std::fabs(instance.assets[i].tier -
                              static_cast<double>(instance.accounts[j].duration));
  return omega;
}

FeasibilityReport evaluate_allocation(const AllocationMatrix& q,
                                      const CollateralInstance& instance,
                                      double epsilon) {
  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();
  if (q.rows() != n || q.cols() != m)
    throw std::invalid_argument("evaluate_allocation: allocation shape mismatch");
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("evaluate_allocation: epsilon must be >= 0");

  FeasibilityReport report;
  const Matrix omega = omega_matrix(instance);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      report.objective += omega(i, j) * q(i, j);

  report.consistency_residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += q(i, j);
    report.consistency_residuals[i] = std::max(0.0, row - 1.0);
  }

  report.exposure_coverage.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double required = instance.accounts[j].exposure;
    if (required == 0.0) {
      report.exposure_coverage[j] = 1.0;  // vacuously met
      continue;
    }
    double posted = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      posted += q(i, j) * instance.assets[i].quantity *
                instance.assets[i].unit_value * instance.haircut(i, j);
    report.exposure_coverage[j] = posted / required;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double quantity = instance.assets[i].quantity;
    for (std::size_t j = 0; j < m; ++j) {
      const double bound = instance.limits(i, j);
      if (bound == kUnboundedLimit) continue;
      const double excess = q(i, j) * quantity - bound;
      // Tolerance absorbs float rounding in q * a; decoded grid points never
      // exceed the limit in exact arithmetic.
      if (excess > kConsistencyTol * (1.0 + quantity))
        report.limit_violations.push_back({i, j, excess});
    }
  }

  if (instance.groups) {
    const std::size_t g_count = instance.n_groups();
    for (std::size_t g = 0; g < g_count; ++g)
      for (std::size_t j = 0; j < m; ++j) {
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          used += instance.groups->membership(i, g) * q(i, j) *
                  instance.assets[i].quantity;
        const double excess = used - instance.groups->caps(g, j);
        if (excess > kConsistencyTol * (1.0 + used))
          report.group_violations.push_back({g, j, excess});
      }
  }

  bool ok = report.limit_violations.empty() && report.group_violations.empty();
  for (double r : report.consistency_residuals)
    if (r > kConsistencyTol) ok = false;
  for (double c : report.exposure_coverage)
    if (c < 1.0 - epsilon) ok = false;
  report.feasible_within = ok;
  return report;
}

AllocationMatrix decode_solution(std::span<const std::uint8_t> bits,
                                 const VariableLayout& layout,
                                 const CollateralInstance& instance) {
  if (bits.size() != layout.total)
    throw std::invalid_argument(
        "decode_solution: bitstring length " + std::to_string(bits.size()) +
        " != layout size " + std::to_string(layout.total));

  Matrix q(instance.n_assets(), instance.n_accounts());
  for (const auto& d : layout.decision) {
    if (d.asset >= q.rows() || d.account >= q.cols())
      throw std::invalid_argument("decode_solution: layout does not match instance");
    double value = 0.0;
    for (std::size_t b = 0; b < d.indices.size(); ++b)
      if (bits[d.indices[b]]) value += d.weights[b];
    q(d.asset, d.account) = value;
  }
  return AllocationMatrix(std::move(q));
}

}  // namespace collopt
