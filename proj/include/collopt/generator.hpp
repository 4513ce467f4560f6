#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "collopt/instances.hpp"

namespace collopt {

/// Synthetic-instance recipe. Defaults reproduce the experimental scale:
/// ten assets worth ~$8.86M split over three quality tiers, five accounts
/// (two long-term totaling ~$1.49M, three short-term totaling ~$1.09M), and
/// one short-term account roughly a tenth the size of the others' mean.
struct GeneratorSpec {
  std::size_t n_assets = 10;
  /// (tier value, asset count) in layout order; counts must sum to n_assets.
  std::vector<std::pair<double, std::size_t>> tier_counts = {
      {0.2, 4}, {0.5, 2}, {0.8, 4}};
  double total_asset_value = 8.86e6;
  double asset_value_min = 0.3e6;
  double asset_value_max = 1.5e6;

  std::size_t n_long = 2;
  std::size_t n_short = 3;
  double long_exposure_total = 1.49e6;
  double short_exposure_total = 1.09e6;
  /// The last short-term account's exposure as a fraction of the mean of the
  /// remaining accounts.
  double small_account_ratio = 0.1;

  double haircut_min = 0.85;
  double haircut_max = 1.0;

  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic for a fixed spec+seed. Totals are hit exactly by rescaling;
/// per-pair limits are left unbounded and no groups are emitted.
CollateralInstance generate_instance(const GeneratorSpec& spec);

}  // namespace collopt
