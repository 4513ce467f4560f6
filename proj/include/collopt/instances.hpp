#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "collopt/matrix.hpp"

namespace collopt {

/// Knapsack testbed instance: select items maximizing total value subject to
/// a capacity bound on total weight.
struct KnapsackInstance {
  std::vector<std::int64_t> weights;
  std::vector<std::int64_t> values;
  std::int64_t capacity = 0;

  std::size_t size() const { return weights.size(); }
  void validate() const;
};

/// One inventory asset: a maximum quantity, a market value per unit (USD)
/// and a quality tier in [0, 1].
struct Asset {
  double quantity = 0.0;
  double unit_value = 0.0;
  double tier = 0.0;
};

/// One account to collateralize: required exposure in USD and a duration
/// flag (1 = short term, 0 = long term).
struct Account {
  double exposure = 0.0;
  int duration = 0;
};

constexpr double kUnboundedLimit = std::numeric_limits<double>::infinity();

/// Many-to-one restrictions: membership(i, g) in {0, 1} marks asset i as part
/// of group g, caps(g, j) bounds the total quantity of group g posted to
/// account j.
struct AssetGroups {
  Matrix membership;  // n x G
  Matrix caps;        // G x m
};

/// Full collateral-allocation instance. Haircut and limit matrices are
/// indexed (asset, account); a limit of kUnboundedLimit means no per-pair
/// quantity bound.
struct CollateralInstance {
  std::vector<Asset> assets;
  std::vector<Account> accounts;
  Matrix haircut;  // n x m, entries in (0, 1]
  Matrix limits;   // n x m, nonnegative or unbounded
  std::optional<AssetGroups> groups;

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_accounts() const { return accounts.size(); }
  std::size_t n_groups() const {
    return groups ? groups->membership.cols() : 0;
  }

  void validate() const;
};

}  // namespace collopt
