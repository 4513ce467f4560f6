#include "collopt/encode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace collopt {

void PenaltyWeights::validate() const {
  for (double l : lambda)
    if (!(l >= 0.0)) throw std::invalid_argument("weights: lambdas must be >= 0");
}

std::size_t slack_bit_count(double upper_bound) {
  if (!(upper_bound > 0.0))
    throw std::invalid_argument("slack_bit_count: upper bound must be > 0");
  int k = static_cast<int>(std::ceil(std::log2(upper_bound)));
  // log2 can land a hair off an exact power of two; settle by comparison.
  while (k > 0 && std::exp2(k - 1) >= upper_bound) --k;
  while (std::exp2(k) < upper_bound) ++k;
  return static_cast<std::size_t>(std::max(k, 1));
}

std::vector<double> bit_weights(std::size_t bits, double qmin, double qmax) {
  if (bits == 0) throw std::invalid_argument("bit_weights: need at least one bit");
  if (!(qmax > qmin))
    throw std::invalid_argument("bit_weights: qmax must exceed qmin");
  const double span = qmax - qmin;
  const double m_value = std::exp2(static_cast<double>(bits)) - 1.0;
  std::vector<double> weights(bits);
  for (std::size_t b = 1; b <= bits; ++b)
    weights[b - 1] = std::ldexp(span, static_cast<int>(b) - 1) / m_value;
  return weights;
}

std::size_t truncated_bits(double limit, double quantity, std::size_t m_value,
                           std::size_t bit_width) {
  if (!(quantity > 0.0))
    throw std::invalid_argument("truncated_bits: quantity must be > 0");
  if (limit < 0.0) throw std::invalid_argument("truncated_bits: negative limit");
  if (m_value + 1 != (std::size_t{1} << bit_width))
    throw std::invalid_argument("truncated_bits: M != 2^B - 1");
  const double ratio = limit / quantity;
  if (ratio >= 1.0) return bit_width;
  const double scaled = ratio * static_cast<double>(m_value);
  if (scaled < 1.0) return 0;
  int n = static_cast<int>(std::floor(std::log2(scaled)));
  while (std::exp2(n + 1) <= scaled) ++n;
  while (n > 0 && std::exp2(n) > scaled) --n;
  return std::min<std::size_t>(static_cast<std::size_t>(n), bit_width);
}

std::vector<double> normalize_terms(
    const std::vector<std::vector<double>>& term_coefficient_sets,
    std::vector<std::string>* warnings) {
  std::vector<double> factors;
  factors.reserve(term_coefficient_sets.size());
  for (std::size_t t = 0; t < term_coefficient_sets.size(); ++t) {
    const auto& coeffs = term_coefficient_sets[t];
    if (coeffs.empty())
      throw std::invalid_argument("normalize_terms: empty coefficient set");
    double max_mag = 0.0;
    double min_mag = std::numeric_limits<double>::infinity();
    for (double c : coeffs) {
      const double mag = std::fabs(c);
      if (mag == 0.0) continue;
      max_mag = std::max(max_mag, mag);
      min_mag = std::min(min_mag, mag);
    }
    if (max_mag == 0.0) {
      if (warnings)
        warnings->push_back("normalize_terms: term " + std::to_string(t) +
                            " has only zero coefficients; factor 1");
      factors.push_back(1.0);
      continue;
    }
    // Divide by the largest magnitude, then lift by a decimal power so the
    // smallest magnitude sits in [1, 10).
    const double ratio = min_mag / max_mag;
    const double decade = std::floor(std::log10(ratio) + 1e-12);
    factors.push_back(std::pow(10.0, -decade) / max_mag);
  }
  return factors;
}

void QuboPolynomial::add_linear(std::size_t i, double c) {
  if (i >= dimension) throw std::out_of_range("polynomial: index out of range");
  linear[i] += c;
}

void QuboPolynomial::add_quadratic(std::size_t i, std::size_t j, double c) {
  if (i >= dimension || j >= dimension)
    throw std::out_of_range("polynomial: index out of range");
  if (i == j) {  // x^2 = x on binaries
    linear[i] += c;
    return;
  }
  if (i > j) std::swap(i, j);
  quadratic[{i, j}] += c;
}

void QuboPolynomial::add_affine(
    std::span<const std::pair<std::size_t, double>> terms, double constant,
    double weight) {
  for (const auto& [idx, coeff] : terms) add_linear(idx, weight * coeff);
  offset += weight * constant;
}

void QuboPolynomial::add_squared(
    std::span<const std::pair<std::size_t, double>> terms, double constant,
    double weight) {
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const auto& [ia, ca] = terms[a];
    add_linear(ia, weight * ca * (ca + 2.0 * constant));
    for (std::size_t b = a + 1; b < terms.size(); ++b)
      add_quadratic(ia, terms[b].first, weight * 2.0 * ca * terms[b].second);
  }
  offset += weight * constant * constant;
}

double QuboPolynomial::energy(std::span<const std::uint8_t> bits) const {
  if (bits.size() != dimension)
    throw std::invalid_argument("polynomial energy: bitstring length mismatch");
  double e = offset;
  for (std::size_t i = 0; i < dimension; ++i)
    if (bits[i]) e += linear[i];
  for (const auto& [key, value] : quadratic)
    if (bits[key.first] && bits[key.second]) e += value;
  return e;
}

std::vector<double> QuboPolynomial::coefficient_magnitudes() const {
  std::vector<double> mags;
  for (double v : linear)
    if (v != 0.0) mags.push_back(std::fabs(v));
  for (const auto& [key, value] : quadratic) {
    (void)key;
    if (value != 0.0) mags.push_back(std::fabs(value));
  }
  return mags;
}

const TermComponent* CoQuboBuild::find_term(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

using IndexedCoeff = std::pair<std::size_t, double>;

QuboModel assemble(std::size_t dimension, VariableLayout layout,
                   const std::vector<TermComponent>& terms,
                   std::vector<std::string> warnings) {
  QuboModel model;
  model.dimension = dimension;
  model.linear.assign(dimension, 0.0);
  model.layout = std::move(layout);
  model.warnings = std::move(warnings);
  for (const auto& term : terms) {
    const double factor = term.weight * term.scale;
    if (factor == 0.0) continue;
    for (std::size_t i = 0; i < dimension; ++i)
      model.linear[i] += factor * term.poly.linear[i];
    for (const auto& [key, value] : term.poly.quadratic)
      model.quadratic[key] += factor * value;
    model.offset += factor * term.poly.offset;
  }
  std::erase_if(model.quadratic, [](const auto& kv) { return kv.second == 0.0; });
  model.validate();
  return model;
}

/// Gathers the nonzero magnitudes of a term's defining affine rows; these
/// are the collections normalize_terms works on. Normalizing on the row
/// coefficients (rather than the expanded squared polynomial) keeps the
/// per-violation scales of squared penalties commensurate with the
/// published multipliers.
struct RowCollector {
  std::vector<double> magnitudes;

  void row(std::span<const std::pair<std::size_t, double>> coeffs,
           double constant) {
    for (const auto& [idx, value] : coeffs) {
      (void)idx;
      if (value != 0.0) magnitudes.push_back(std::fabs(value));
    }
    if (constant != 0.0) magnitudes.push_back(std::fabs(constant));
  }
};

/// Applies normalize_terms over the per-term row collections.
void apply_normalization(std::vector<TermComponent>& terms,
                         const std::vector<std::vector<double>>& collections,
                         bool enabled, std::vector<std::string>& warnings) {
  if (!enabled) return;
  std::vector<std::vector<double>> sets = collections;
  for (auto& set : sets)
    if (set.empty()) set.push_back(0.0);  // reported as all-zero below
  const std::vector<double> factors = normalize_terms(sets, &warnings);
  for (std::size_t t = 0; t < terms.size(); ++t) terms[t].scale = factors[t];
}

}  // namespace

QuboModel kp_qubo_log(const KnapsackInstance& instance, double lambda0) {
  instance.validate();
  if (!(lambda0 > 0.0)) throw std::invalid_argument("kp_qubo_log: lambda0 must be > 0");
  const std::size_t n = instance.size();
  const std::size_t n_slack =
      instance.capacity > 0 ? slack_bit_count(static_cast<double>(instance.capacity)) : 0;
  const std::size_t dim = n + n_slack;

  QuboPolynomial poly(dim);
  std::vector<IndexedCoeff> penalty;
  penalty.reserve(dim);
  for (std::size_t i = 0; i < n; ++i) {
    poly.add_linear(i, -static_cast<double>(instance.values[i]));
    penalty.emplace_back(i, static_cast<double>(instance.weights[i]));
  }
  VariableLayout layout;
  layout.total = dim;
  for (std::size_t i = 0; i < n; ++i)
    layout.decision.push_back({i, 0, {i}, {1.0}});
  if (n_slack > 0) {
    SlackBits slack{"kp_slack", {}, {}};
    for (std::size_t k = 0; k < n_slack; ++k) {
      const double w = std::exp2(static_cast<double>(k));
      penalty.emplace_back(n + k, w);
      slack.indices.push_back(n + k);
      slack.weights.push_back(w);
    }
    layout.slack.push_back(std::move(slack));
  }
  poly.add_squared(penalty, -static_cast<double>(instance.capacity), lambda0);

  return assemble(dim, std::move(layout), {{"objective", 1.0, 1.0, std::move(poly)}}, {});
}

QuboModel kp_qubo_onehot(const KnapsackInstance& instance, double lambda0,
                         double lambda1) {
  instance.validate();
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0))
    throw std::invalid_argument("kp_qubo_onehot: lambdas must be > 0");
  if (instance.capacity < 1)
    throw std::invalid_argument("kp_qubo_onehot: capacity must be >= 1");
  const std::size_t n = instance.size();
  const std::size_t n_slack = static_cast<std::size_t>(instance.capacity);
  const std::size_t dim = n + n_slack;

  QuboPolynomial poly(dim);
  std::vector<IndexedCoeff> balance;
  std::vector<IndexedCoeff> onehot;
  for (std::size_t i = 0; i < n; ++i) {
    poly.add_linear(i, -static_cast<double>(instance.values[i]));
    balance.emplace_back(i, static_cast<double>(instance.weights[i]));
  }
  VariableLayout layout;
  layout.total = dim;
  for (std::size_t i = 0; i < n; ++i)
    layout.decision.push_back({i, 0, {i}, {1.0}});
  SlackBits slack{"kp_onehot", {}, {}};
  for (std::size_t k = 1; k <= n_slack; ++k) {
    balance.emplace_back(n + k - 1, -static_cast<double>(k));
    onehot.emplace_back(n + k - 1, -1.0);
    slack.indices.push_back(n + k - 1);
    slack.weights.push_back(static_cast<double>(k));
  }
  layout.slack.push_back(std::move(slack));
  poly.add_squared(balance, 0.0, lambda0);
  poly.add_squared(onehot, 1.0, lambda1);

  return assemble(dim, std::move(layout), {{"objective", 1.0, 1.0, std::move(poly)}}, {});
}

QuboModel kp_qubo_unbalanced(const KnapsackInstance& instance,
                             double lambda_linear, double lambda_quadratic,
                             double lambda_cost) {
  instance.validate();
  if (!(lambda_linear > 0.0) || !(lambda_quadratic > 0.0) || !(lambda_cost > 0.0))
    throw std::invalid_argument("kp_qubo_unbalanced: lambdas must be > 0");
  const std::size_t n = instance.size();

  QuboPolynomial poly(n);
  std::vector<IndexedCoeff> constraint;
  constraint.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    poly.add_linear(i, -lambda_cost * static_cast<double>(instance.values[i]));
    constraint.emplace_back(i, static_cast<double>(instance.weights[i]));
  }
  const double rhs = -static_cast<double>(instance.capacity);
  poly.add_affine(constraint, rhs, lambda_linear);
  poly.add_squared(constraint, rhs, lambda_quadratic);

  VariableLayout layout;
  layout.total = n;
  for (std::size_t i = 0; i < n; ++i)
    layout.decision.push_back({i, 0, {i}, {1.0}});

  return assemble(n, std::move(layout), {{"objective", 1.0, 1.0, std::move(poly)}}, {});
}

VariableLayout co_decision_layout(const CollateralInstance& instance,
                                  std::size_t bit_width) {
  if (bit_width == 0 || bit_width > 30)
    throw std::invalid_argument("co layout: bit width out of range");
  const std::size_t m_value = (std::size_t{1} << bit_width) - 1;
  const std::vector<double> weights = bit_weights(bit_width, 0.0, 1.0);

  VariableLayout layout;
  std::size_t next = 0;
  for (std::size_t i = 0; i < instance.n_assets(); ++i) {
    const double quantity = instance.assets[i].quantity;
    for (std::size_t j = 0; j < instance.n_accounts(); ++j) {
      const double limit = instance.limits(i, j);
      std::size_t bits = bit_width;
      if (limit != kUnboundedLimit && quantity > 0.0)
        bits = truncated_bits(limit, quantity, m_value, bit_width);
      else if (limit == 0.0)
        bits = 0;
      DecisionBits entry{i, j, {}, {}};
      for (std::size_t b = 0; b < bits; ++b) {
        entry.indices.push_back(next++);
        entry.weights.push_back(weights[b]);
      }
      layout.decision.push_back(std::move(entry));
    }
  }
  layout.total = next;
  return layout;
}

namespace {

/// Cost term shared by both collateral formulations.
QuboPolynomial co_cost_poly(const CollateralInstance& instance,
                            const VariableLayout& layout, std::size_t dim,
                            bool quantity_weighted) {
  QuboPolynomial poly(dim);
  for (const auto& d : layout.decision) {
    double omega = std::fabs(instance.assets[d.asset].tier -
                             static_cast<double>(instance.accounts[d.account].duration));
    if (quantity_weighted) omega *= instance.assets[d.asset].quantity;
    for (std::size_t b = 0; b < d.indices.size(); ++b)
      poly.add_linear(d.indices[b], omega * d.weights[b]);
  }
  return poly;
}

/// Exposure rows: per account, coefficient a_i v_i H_ij p_b on each decision
/// bit, constant -c_j.
std::vector<std::vector<IndexedCoeff>> co_exposure_rows(
    const CollateralInstance& instance, const VariableLayout& layout) {
  std::vector<std::vector<IndexedCoeff>> rows(instance.n_accounts());
  for (const auto& d : layout.decision) {
    const double scale = instance.assets[d.asset].quantity *
                         instance.assets[d.asset].unit_value *
                         instance.haircut(d.asset, d.account);
    for (std::size_t b = 0; b < d.indices.size(); ++b)
      rows[d.account].emplace_back(d.indices[b], scale * d.weights[b]);
  }
  return rows;
}

/// Group rows: (g, j) -> coefficients a_i p_b over member-asset bits.
std::vector<std::vector<IndexedCoeff>> co_group_rows(
    const CollateralInstance& instance, const VariableLayout& layout) {
  const std::size_t g_count = instance.n_groups();
  const std::size_t m = instance.n_accounts();
  std::vector<std::vector<IndexedCoeff>> rows(g_count * m);
  if (g_count == 0) return rows;
  for (const auto& d : layout.decision) {
    const double quantity = instance.assets[d.asset].quantity;
    for (std::size_t g = 0; g < g_count; ++g) {
      if (instance.groups->membership(d.asset, g) == 0.0) continue;
      auto& row = rows[g * m + d.account];
      for (std::size_t b = 0; b < d.indices.size(); ++b)
        row.emplace_back(d.indices[b], quantity * d.weights[b]);
    }
  }
  return rows;
}

void append_unreachable_exposure_warnings(
    const CollateralInstance& instance,
    const std::vector<std::vector<IndexedCoeff>>& exposure_rows,
    std::vector<std::string>& warnings) {
  for (std::size_t j = 0; j < instance.n_accounts(); ++j) {
    double reachable = 0.0;
    for (const auto& [idx, coeff] : exposure_rows[j]) {
      (void)idx;
      reachable += coeff;
    }
    if (reachable < instance.accounts[j].exposure)
      warnings.push_back("exposure for account " + std::to_string(j) +
                         " unreachable even at full allocation (truncated grid)");
  }
}

}  // namespace

CoQuboBuild co_qubo_balanced(const CollateralInstance& instance,
                             const CoQuboOptions& options,
                             const PenaltyWeights& weights) {
  instance.validate();
  weights.validate();
  const bool has_groups = instance.n_groups() > 0;
  if (!(weights[0] > 0.0) || !(weights[1] > 0.0) || !(weights[2] > 0.0) ||
      (has_groups && !(weights[3] > 0.0)))
    throw std::invalid_argument("co_qubo_balanced: required lambdas must be > 0");

  const std::size_t bit_width = options.bit_width;
  const double m_value = std::exp2(static_cast<double>(bit_width)) - 1.0;
  VariableLayout layout = co_decision_layout(instance, bit_width);
  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();

  // Consistency slack: one block of ceil(log2 M) bits per asset.
  std::size_t next = layout.total;
  const std::size_t con_bits = slack_bit_count(m_value);
  std::vector<SlackBits> con_slack(n);
  for (std::size_t i = 0; i < n; ++i) {
    con_slack[i].id = "con_" + std::to_string(i);
    for (std::size_t k = 0; k < con_bits; ++k) {
      con_slack[i].indices.push_back(next++);
      con_slack[i].weights.push_back(std::exp2(static_cast<double>(k)));
    }
  }

  // Group slack: grid step min member quantity / M, enough bits to cover the cap.
  const std::size_t g_count = instance.n_groups();
  std::vector<SlackBits> grp_slack;
  std::vector<double> grp_res(g_count * m, 0.0);
  if (has_groups) {
    for (std::size_t g = 0; g < g_count; ++g) {
      double min_quantity = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        if (instance.groups->membership(i, g) == 1.0 &&
            instance.assets[i].quantity > 0.0)
          min_quantity = std::min(min_quantity, instance.assets[i].quantity);
      if (!std::isfinite(min_quantity)) continue;  // no active members
      for (std::size_t j = 0; j < m; ++j) {
        const double cap = instance.groups->caps(g, j);
        const double res = min_quantity / m_value;
        grp_res[g * m + j] = res;
        SlackBits block{"grp_" + std::to_string(g) + "_" + std::to_string(j), {}, {}};
        if (cap > 0.0) {
          const std::size_t bits = slack_bit_count(cap / res + 1.0);
          for (std::size_t k = 0; k < bits; ++k) {
            block.indices.push_back(next++);
            block.weights.push_back(res * std::exp2(static_cast<double>(k)));
          }
        }
        grp_slack.push_back(std::move(block));
      }
    }
  }
  for (auto& s : con_slack) layout.slack.push_back(std::move(s));
  for (auto& s : grp_slack) layout.slack.push_back(std::move(s));
  layout.total = next;
  const std::size_t dim = next;

  std::vector<TermComponent> terms;
  std::vector<std::vector<double>> collections;
  {
    QuboPolynomial cost =
        co_cost_poly(instance, layout, dim, options.cost_quantity_weighted);
    collections.push_back(cost.coefficient_magnitudes());
    terms.push_back({"cost", weights[0], 1.0, std::move(cost)});
  }

  // Consistency, integer-scaled: (sum_jb 2^(b-1) x_ijb - M + S_i)^2 per asset.
  {
    QuboPolynomial poly(dim);
    RowCollector rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<IndexedCoeff> row;
      for (const auto& d : layout.decision) {
        if (d.asset != i) continue;
        for (std::size_t b = 0; b < d.indices.size(); ++b)
          row.emplace_back(d.indices[b], std::exp2(static_cast<double>(b)));
      }
      for (const auto& s : layout.slack) {
        if (s.id != "con_" + std::to_string(i)) continue;
        for (std::size_t k = 0; k < s.indices.size(); ++k)
          row.emplace_back(s.indices[k], s.weights[k]);
      }
      rows.row(row, -m_value);
      poly.add_squared(row, -m_value, 1.0);
    }
    collections.push_back(std::move(rows.magnitudes));
    terms.push_back({"consistency", weights[1], 1.0, std::move(poly)});
  }

  std::vector<std::string> warnings;
  const auto exposure_rows = co_exposure_rows(instance, layout);
  append_unreachable_exposure_warnings(instance, exposure_rows, warnings);
  {
    QuboPolynomial poly(dim);
    RowCollector rows;
    for (std::size_t j = 0; j < m; ++j) {
      rows.row(exposure_rows[j], -instance.accounts[j].exposure);
      poly.add_squared(exposure_rows[j], -instance.accounts[j].exposure, 1.0);
    }
    collections.push_back(std::move(rows.magnitudes));
    terms.push_back({"exposure", weights[2], 1.0, std::move(poly)});
  }

  if (has_groups) {
    QuboPolynomial poly(dim);
    RowCollector rows;
    const auto group_rows = co_group_rows(instance, layout);
    for (std::size_t g = 0; g < g_count; ++g)
      for (std::size_t j = 0; j < m; ++j) {
        if (grp_res[g * m + j] == 0.0) continue;
        std::vector<IndexedCoeff> row = group_rows[g * m + j];
        for (const auto& s : layout.slack) {
          if (s.id != "grp_" + std::to_string(g) + "_" + std::to_string(j)) continue;
          for (std::size_t k = 0; k < s.indices.size(); ++k)
            row.emplace_back(s.indices[k], s.weights[k]);
        }
        rows.row(row, -instance.groups->caps(g, j));
        poly.add_squared(row, -instance.groups->caps(g, j), 1.0);
      }
    collections.push_back(std::move(rows.magnitudes));
    terms.push_back({"group", weights[3], 1.0, std::move(poly)});
  }

  apply_normalization(terms, collections, options.normalize, warnings);
  CoQuboBuild build;
  build.model = assemble(dim, std::move(layout), terms, std::move(warnings));
  build.terms = std::move(terms);
  return build;
}

CoQuboBuild co_qubo_unbalanced(const CollateralInstance& instance,
                               const CoQuboOptions& options,
                               const PenaltyWeights& weights) {
  instance.validate();
  weights.validate();
  const bool has_groups = instance.n_groups() > 0;
  if (!(weights[0] > 0.0))
    throw std::invalid_argument("co_qubo_unbalanced: lambda0 must be > 0");

  VariableLayout layout = co_decision_layout(instance, options.bit_width);
  const std::size_t dim = layout.total;
  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();

  std::vector<TermComponent> terms;
  std::vector<std::vector<double>> collections;
  {
    QuboPolynomial cost =
        co_cost_poly(instance, layout, dim, options.cost_quantity_weighted);
    collections.push_back(cost.coefficient_magnitudes());
    terms.push_back({"cost", weights[0], 1.0, std::move(cost)});
  }

  // Consistency rows: sum_jb p_b x_ijb - 1 <= 0 per asset. The linear and
  // quadratic halves share the row collection but carry their own lambdas.
  std::vector<std::vector<IndexedCoeff>> con_rows(n);
  for (const auto& d : layout.decision)
    for (std::size_t b = 0; b < d.indices.size(); ++b)
      con_rows[d.asset].emplace_back(d.indices[b], d.weights[b]);
  {
    QuboPolynomial lin(dim), quad(dim);
    RowCollector rows;
    for (std::size_t i = 0; i < n; ++i) {
      rows.row(con_rows[i], -1.0);
      lin.add_affine(con_rows[i], -1.0, 1.0);
      quad.add_squared(con_rows[i], -1.0, 1.0);
    }
    collections.push_back(rows.magnitudes);
    collections.push_back(rows.magnitudes);
    terms.push_back({"consistency_linear", weights[1], 1.0, std::move(lin)});
    terms.push_back({"consistency_quadratic", weights[2], 1.0, std::move(quad)});
  }

  std::vector<std::string> warnings;
  const auto exposure_rows = co_exposure_rows(instance, layout);
  append_unreachable_exposure_warnings(instance, exposure_rows, warnings);
  {
    QuboPolynomial lin(dim), quad(dim);
    RowCollector rows;
    for (std::size_t j = 0; j < m; ++j) {
      rows.row(exposure_rows[j], -instance.accounts[j].exposure);
      lin.add_affine(exposure_rows[j], -instance.accounts[j].exposure, 1.0);
      quad.add_squared(exposure_rows[j], -instance.accounts[j].exposure, 1.0);
    }
    collections.push_back(rows.magnitudes);
    collections.push_back(rows.magnitudes);
    // Coverage beyond the requirement lowers the energy: -lambda3 * (posted - c).
    terms.push_back({"exposure_linear", -weights[3], 1.0, std::move(lin)});
    terms.push_back({"exposure_quadratic", weights[4], 1.0, std::move(quad)});
  }

  if (has_groups) {
    QuboPolynomial lin(dim), quad(dim);
    RowCollector rows;
    const auto group_rows = co_group_rows(instance, layout);
    const std::size_t g_count = instance.n_groups();
    for (std::size_t g = 0; g < g_count; ++g)
      for (std::size_t j = 0; j < m; ++j) {
        const auto& row = group_rows[g * m + j];
        if (row.empty()) continue;
        rows.row(row, -instance.groups->caps(g, j));
        lin.add_affine(row, -instance.groups->caps(g, j), 1.0);
        quad.add_squared(row, -instance.groups->caps(g, j), 1.0);
      }
    collections.push_back(rows.magnitudes);
    collections.push_back(rows.magnitudes);
    terms.push_back({"group_linear", weights[5], 1.0, std::move(lin)});
    terms.push_back({"group_quadratic", weights[6], 1.0, std::move(quad)});
  }

  apply_normalization(terms, collections, options.normalize, warnings);
  CoQuboBuild build;
  build.model = assemble(dim, std::move(layout), terms, std::move(warnings));
  build.terms = std::move(terms);
  return build;
}

}  // namespace collopt
