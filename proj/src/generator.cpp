#include "collopt/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "collopt/errors.hpp"
#include "collopt/rng.hpp"

namespace collopt {

void GeneratorSpec::validate() const {
  if (n_assets == 0) throw ConfigError("generator: need at least one asset");
  std::size_t tier_total = 0;
  for (const auto& [tier, count] : tier_counts) {
    if (tier < 0.0 || tier > 1.0) throw ConfigError("generator: tier outside [0, 1]");
    tier_total += count;
  }
  if (tier_total != n_assets)
    throw ConfigError("generator: tier counts must sum to the asset count");
  if (!(asset_value_min > 0.0) || !(asset_value_max >= asset_value_min))
    throw ConfigError("generator: bad per-asset value range");
  // The rescaled draws must be able to land inside the per-asset range.
  const double lo = asset_value_min * static_cast<double>(n_assets);
  const double hi = asset_value_max * static_cast<double>(n_assets);
  if (total_asset_value < lo || total_asset_value > hi)
    throw ConfigError("generator: total asset value unreachable from per-asset range");
  if (n_long + n_short == 0) throw ConfigError("generator: need accounts");
  if (n_short == 0 && small_account_ratio > 0.0)
    throw ConfigError("generator: small account requires a short-term account");
  if (!(long_exposure_total >= 0.0) || !(short_exposure_total >= 0.0))
    throw ConfigError("generator: negative exposure totals");
  if (!(haircut_min > 0.0) || !(haircut_max <= 1.0) || haircut_min > haircut_max)
    throw ConfigError("generator: haircut range must sit inside (0, 1]");
}

CollateralInstance generate_instance(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.n_assets;
  const std::size_t m = spec.n_long + spec.n_short;

  CollateralInstance instance;
  instance.assets.resize(n);

  std::size_t a = 0;
  for (const auto& [tier, count] : spec.tier_counts)
    for (std::size_t k = 0; k < count; ++k) instance.assets[a++].tier = tier;

  // Draw per-asset values and rescale to the exact total; redraw if scaling
  // pushes any asset outside its admissible range.
  std::vector<double> value(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double sum = 0.0;
    for (double& v : value) {
      v = rng.uniform(spec.asset_value_min, spec.asset_value_max);
      sum += v;
    }
    const double scale = spec.total_asset_value / sum;
    bool in_range = true;
    for (double& v : value) {
      v *= scale;
      if (v < spec.asset_value_min || v > spec.asset_value_max) in_range = false;
    }
    if (in_range) break;
    if (attempt == 999)
      throw ConfigError("generator: could not fit per-asset values to the total");
  }
  for (std::size_t i = 0; i < n; ++i) {
    instance.assets[i].unit_value = rng.uniform(50.0, 500.0);
    instance.assets[i].quantity = value[i] / instance.assets[i].unit_value;
  }

  // Accounts: long-term block first, then short-term with the small account
  // last. The small exposure solves exactly to ratio * mean(others).
  instance.accounts.resize(m);
  for (std::size_t j = 0; j < spec.n_long; ++j) instance.accounts[j].duration = 0;
  for (std::size_t j = spec.n_long; j < m; ++j) instance.accounts[j].duration = 1;

  if (spec.n_long > 0) {
    std::vector<double> draw(spec.n_long);
    double sum = 0.0;
    for (double& d : draw) {
      d = rng.uniform(0.5, 1.5);
      sum += d;
    }
    for (std::size_t j = 0; j < spec.n_long; ++j)
      instance.accounts[j].exposure = spec.long_exposure_total * draw[j] / sum;
  }
  if (spec.n_short > 0) {
    double small = 0.0;
    if (m > 1 && spec.small_account_ratio > 0.0) {
      const double combined = spec.long_exposure_total + spec.short_exposure_total;
      small = spec.small_account_ratio * combined /
              (static_cast<double>(m - 1) + spec.small_account_ratio);
    }
    const double rest = spec.short_exposure_total - small;
    if (rest < 0.0) throw ConfigError("generator: small account exceeds short total");
    const std::size_t regular = spec.n_short - 1;
    std::vector<double> draw(regular);
    double sum = 0.0;
    for (double& d : draw) {
      d = rng.uniform(0.5, 1.5);
      sum += d;
    }
    for (std::size_t k = 0; k < regular; ++k)
      instance.accounts[spec.n_long + k].exposure = rest * draw[k] / sum;
    instance.accounts[m - 1].exposure = regular == 0 ? spec.short_exposure_total : small;
  }

  instance.haircut = Matrix(n, m);
  instance.limits = Matrix(n, m, kUnboundedLimit);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      instance.haircut(i, j) = rng.uniform(spec.haircut_min, spec.haircut_max);

  instance.validate();
  return instance;
}

}  // namespace collopt
