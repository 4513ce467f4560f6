#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "collopt/lp.hpp"
#include "collopt/rng.hpp"
#include "oracles.hpp"

using namespace collopt;

namespace {

CollateralInstance random_instance(Rng& rng, std::size_t n, std::size_t m,
                                   bool with_limits) {
  CollateralInstance instance;
  for (std::size_t i = 0; i < n; ++i)
    instance.assets.push_back(
        {rng.uniform(50.0, 300.0), rng.uniform(0.5, 5.0), rng.uniform(0.0, 1.0)});
  for (std::size_t j = 0; j < m; ++j)
    instance.accounts.push_back(
        {rng.uniform(5.0, 80.0), static_cast<int>(rng.uniform_index(2))});
  instance.haircut = Matrix(n, m);
  instance.limits = Matrix(n, m, kUnboundedLimit);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      instance.haircut(i, j) = rng.uniform(0.85, 1.0);
      if (with_limits && rng.uniform01() < 0.3)
        instance.limits(i, j) = rng.uniform(10.0, instance.assets[i].quantity);
    }
  return instance;
}

}  // namespace

TEST_CASE("hand-solvable one-pair LP") {
  const auto instance = oracles::tiny_instance(100.0, 1.0, 0.2, 50.0, 0);
  const LpSolution solution = solve_lp(instance);
  REQUIRE(solution.status == LpStatus::optimal);
  CHECK(solution.allocation(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(solution.objective == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("insufficient inventory is infeasible") {
  const auto instance = oracles::tiny_instance(10.0, 1.0, 0.2, 500.0, 0);
  const LpSolution solution = solve_lp(instance);
  CHECK(solution.status == LpStatus::infeasible);
}

TEST_CASE("zero exposures solve to the zero allocation") {
  CollateralInstance instance;
  instance.assets = {{100.0, 1.0, 0.3}, {50.0, 2.0, 0.7}};
  instance.accounts = {{0.0, 0}, {0.0, 1}};
  instance.haircut = Matrix(2, 2, 0.9);
  instance.limits = Matrix(2, 2, kUnboundedLimit);
  const LpSolution solution = solve_lp(instance);
  REQUIRE(solution.status == LpStatus::optimal);
  CHECK(solution.objective == doctest::Approx(0.0));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(solution.allocation(i, j) == 0.0);
}

TEST_CASE("optimal solutions carry tight certificates") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const auto instance =
        random_instance(rng, 2 + rng.uniform_index(5), 2 + rng.uniform_index(4),
                        trial % 2 == 0);
    const LpSolution solution = solve_lp(instance);
    if (solution.status != LpStatus::optimal) continue;
    CHECK(solution.max_primal_residual <= 1e-7);
    CHECK(solution.max_dual_residual <= 1e-7);
    CHECK(solution.complementary_residual <= 1e-7);
    const FeasibilityReport report =
        evaluate_allocation(solution.allocation, instance, 1e-6);
    CHECK(report.feasible_within);
  }
}

TEST_CASE("LP solutions honor per-pair limits") {
  auto instance = oracles::tiny_instance(100.0, 1.0, 0.2, 30.0, 0);
  instance.limits(0, 0) = 40.0;  // cap at q <= 0.4, still feasible
  const LpSolution solution = solve_lp(instance);
  REQUIRE(solution.status == LpStatus::optimal);
  CHECK(solution.allocation(0, 0) <= 0.4 + 1e-9);

  instance.limits(0, 0) = 20.0;  // cap below the requirement
  CHECK(solve_lp(instance).status == LpStatus::infeasible);
}

TEST_CASE("permuting assets permutes the optimal rows") {
  Rng rng(42);
  const auto instance = random_instance(rng, 4, 3, false);
  const LpSolution base = solve_lp(instance);
  REQUIRE(base.status == LpStatus::optimal);

  // Reverse the asset order.
  CollateralInstance permuted = instance;
  const std::size_t n = instance.n_assets();
  for (std::size_t i = 0; i < n; ++i) {
    permuted.assets[i] = instance.assets[n - 1 - i];
    for (std::size_t j = 0; j < 3; ++j) {
      permuted.haircut(i, j) = instance.haircut(n - 1 - i, j);
      permuted.limits(i, j) = instance.limits(n - 1 - i, j);
    }
  }
  const LpSolution flipped = solve_lp(permuted);
  REQUIRE(flipped.status == LpStatus::optimal);
  CHECK(flipped.objective == doctest::Approx(base.objective).epsilon(1e-9));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(flipped.allocation(i, j) ==
            doctest::Approx(base.allocation(n - 1 - i, j)).epsilon(1e-7));
}

TEST_CASE("binarized optima approach the LP bound from above") {
  // Exposures small against inventory, so rounding the LP point up stays
  // feasible and the classic grid bound applies.
  CollateralInstance instance;
  instance.assets = {{100.0, 1.0, 0.3}};
  instance.accounts = {{20.0, 0}, {10.0, 1}};
  instance.haircut = Matrix(1, 2, 1.0);
  instance.limits = Matrix(1, 2, kUnboundedLimit);

  const LpSolution lp = solve_lp(instance);
  REQUIRE(lp.status == LpStatus::optimal);

  const Matrix omega = omega_matrix(instance);
  double omega_sum = 0.0;
  for (std::size_t j = 0; j < 2; ++j) omega_sum += omega(0, j);

  // Grids for different widths are not nested, so the gap itself can wobble;
  // what shrinks is its envelope sum(Omega)/M.
  for (std::size_t width = 2; width <= 10; ++width) {
    const double m_value = std::exp2(static_cast<double>(width)) - 1.0;
    const auto best = oracles::co_grid_brute_force(
        instance, co_decision_layout(instance, width));
    REQUIRE(best.found);
    const double gap = best.objective - lp.objective;
    CHECK(gap >= -1e-9);
    CHECK(gap <= omega_sum / m_value + 1e-9);
  }
}

TEST_CASE("feasible grid points never beat the LP bound") {
  Rng rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    CollateralInstance instance = random_instance(rng, 2, 2, false);
    for (auto& account : instance.accounts) account.exposure *= 0.3;
    const LpSolution lp = solve_lp(instance);
    REQUIRE(lp.status == LpStatus::optimal);
    const auto best = oracles::co_grid_brute_force(
        instance, co_decision_layout(instance, 3));
    if (!best.found) continue;
    CHECK(best.objective >= lp.objective - 1e-7);
  }
}

TEST_CASE("iteration limit reports partial progress") {
  Rng rng(44);
  const auto instance = random_instance(rng, 5, 4, false);
  const LpSolution solution = solve_lp(instance, 1);
  CHECK(solution.status == LpStatus::iteration_limit);
  CHECK(solution.iterations == 1);
}

TEST_CASE("lp_gap demands an optimal base") {
  const auto instance = oracles::tiny_instance(100.0, 1.0, 0.2, 50.0, 0);
  const LpSolution lp = solve_lp(instance);
  REQUIRE(lp.status == LpStatus::optimal);
  FeasibilityReport report;
  report.objective = lp.objective + 0.25;
  CHECK(lp_gap(lp, report) == doctest::Approx(0.25));
  CHECK(lp_gap(lp, evaluate_allocation(lp.allocation, instance, 0.0)) ==
        doctest::Approx(0.0).epsilon(1e-9));

  LpSolution bad = lp;
  bad.status = LpStatus::iteration_limit;
  CHECK_THROWS_AS(lp_gap(bad, report), std::logic_error);
}

TEST_CASE("MPS export lists rows, columns, bounds") {
  auto instance = oracles::tiny_instance(100.0, 1.0, 0.2, 50.0, 0);
  instance.limits(0, 0) = 60.0;
  const std::string mps = lp_to_mps(instance);
  CHECK(mps.find("ROWS") != std::string::npos);
  CHECK(mps.find(" L  CONS_0") != std::string::npos);
  CHECK(mps.find(" G  EXPO_0") != std::string::npos);
  CHECK(mps.find("Q_0_0") != std::string::npos);
  CHECK(mps.find("BOUNDS") != std::string::npos);
  CHECK(mps.find("ENDATA") != std::string::npos);
  CHECK(mps.find("0.6") != std::string::npos);  // limit-derived upper bound
  CHECK(lp_to_mps(instance) == mps);            // deterministic
}
