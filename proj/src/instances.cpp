#include "collopt/instances.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace collopt {

void KnapsackInstance::validate() const {
  if (weights.empty()) throw std::invalid_argument("knapsack: no items");
  if (weights.size() != values.size())
    throw std::invalid_argument("knapsack: weights/values length mismatch");
  if (capacity < 0) throw std::invalid_argument("knapsack: negative capacity");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0 || values[i] < 0)
      throw std::invalid_argument("knapsack: negative weight or value at item " +
                                  std::to_string(i));
  }
}

void CollateralInstance::validate() const {
  const std::size_t n = n_assets();
  const std::size_t m = n_accounts();
  if (n == 0 || m == 0)
    throw std::invalid_argument("instance: needs at least one asset and account");

  for (std::size_t i = 0; i < n; ++i) {
    const Asset& a = assets[i];
    if (!(a.quantity >= 0.0) || !(a.unit_value >= 0.0))
      throw std::invalid_argument("instance: negative quantity or unit value");
    if (!(a.tier >= 0.0 && a.tier <= 1.0))
      throw std::invalid_argument("instance: tier outside [0, 1]");
  }
  for (std::size_t j = 0; j < m; ++j) {
    const Account& a = accounts[j];
    if (!(a.exposure >= 0.0))
      throw std::invalid_argument("instance: negative exposure");
    if (a.duration != 0 && a.duration != 1)
      throw std::invalid_argument("instance: duration must be 0 or 1");
  }

  if (haircut.rows() != n || haircut.cols() != m)
    throw std::invalid_argument("instance: haircut shape mismatch");
  if (limits.rows() != n || limits.cols() != m)
    throw std::invalid_argument("instance: limits shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double h = haircut(i, j);
      if (!(h > 0.0 && h <= 1.0))
        throw std::invalid_argument("instance: haircut outside (0, 1]");
      const double b = limits(i, j);
      if (std::isnan(b) || b < 0.0)
        throw std::invalid_argument("instance: negative limit");
    }
  }

  if (groups) {
    const std::size_t g = groups->membership.cols();
    if (groups->membership.rows() != n)
      throw std::invalid_argument("instance: group membership shape mismatch");
    if (groups->caps.rows() != g || groups->caps.cols() != m)
      throw std::invalid_argument("instance: group caps shape mismatch");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < g; ++k) {
        const double t = groups->membership(i, k);
        if (t != 0.0 && t != 1.0)
          throw std::invalid_argument("instance: membership must be 0 or 1");
      }
    for (std::size_t k = 0; k < g; ++k)
      for (std::size_t j = 0; j < m; ++j)
        if (!(groups->caps(k, j) >= 0.0))
          throw std::invalid_argument("instance: negative group cap");
  }
}

}  // namespace collopt
