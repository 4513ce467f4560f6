#include "collopt/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace collopt {

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s[i] = '1';
  return s;
}

BitVector bits_from_string(const std::string& s) {
  BitVector bits(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      bits[i] = 1;
    else if (s[i] != '0')
      throw std::invalid_argument("bitstring: expected only '0'/'1'");
  }
  return bits;
}

SpinVector spins_from_bits(std::span<const std::uint8_t> bits) {
  SpinVector spins(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    spins[i] = static_cast<std::int8_t>(1 - 2 * static_cast<int>(bits[i]));
  return spins;
}

std::size_t VariableLayout::decision_bit_count() const {
  std::size_t count = 0;
  for (const auto& d : decision) count += d.indices.size();
  return count;
}

const DecisionBits* VariableLayout::find(std::size_t asset,
                                         std::size_t account) const {
  for (const auto& d : decision)
    if (d.asset == asset && d.account == account) return &d;
  return nullptr;
}

void VariableLayout::validate() const {
  std::vector<std::uint8_t> seen(total, 0);
  auto mark = [&](const std::vector<std::size_t>& indices,
                  const std::vector<double>& weights) {
    if (indices.size() != weights.size())
      throw std::invalid_argument("layout: index/weight length mismatch");
    for (std::size_t idx : indices) {
      if (idx >= total) throw std::invalid_argument("layout: index out of range");
      if (seen[idx]) throw std::invalid_argument("layout: duplicate index");
      seen[idx] = 1;
    }
  };
  for (const auto& d : decision) mark(d.indices, d.weights);
  for (const auto& s : slack) mark(s.indices, s.weights);
  for (std::size_t i = 0; i < total; ++i)
    if (!seen[i]) throw std::invalid_argument("layout: uncovered index");
}

double QuboModel::energy(std::span<const std::uint8_t> bits) const {
  if (bits.size() != dimension)
    throw std::invalid_argument("qubo energy: bitstring length mismatch");
  double e = offset;
  for (std::size_t i = 0; i < dimension; ++i)
    if (bits[i]) e += linear[i];
  for (const auto& [key, value] : quadratic)
    if (bits[key.first] && bits[key.second]) e += value;
  return e;
}

void QuboModel::validate() const {
  if (linear.size() != dimension)
    throw std::invalid_argument("qubo: linear length mismatch");
  for (const auto& [key, value] : quadratic) {
    if (!(key.first < key.second) || key.second >= dimension)
      throw std::invalid_argument("qubo: quadratic key not upper triangular");
    if (!std::isfinite(value))
      throw std::invalid_argument("qubo: non-finite coefficient");
  }
  for (double v : linear)
    if (!std::isfinite(v))
      throw std::invalid_argument("qubo: non-finite coefficient");
  if (!std::isfinite(offset))
    throw std::invalid_argument("qubo: non-finite offset");
  if (layout.total != 0) {
    if (layout.total != dimension)
      throw std::invalid_argument("qubo: layout size mismatch");
    layout.validate();
  }
}

double IsingModel::energy(std::span<const std::int8_t> spins) const {
  if (spins.size() != dimension)
    throw std::invalid_argument("ising energy: spin vector length mismatch");
  double e = epsilon;
  for (std::size_t j = 0; j < dimension; ++j) e -= h[j] * spins[j];
  for (const auto& [key, value] : coupling)
    e -= value * spins[key.first] * spins[key.second];
  return e;
}

IsingModel qubo_to_ising(const QuboModel& q) {
  IsingModel ising;
  ising.dimension = q.dimension;
  ising.h.assign(q.dimension, 0.0);

  // x_i = (1 - s_i)/2:
  //   L_i x_i            -> L_i/2 - (L_i/2) s_i
  //   Q_ij x_i x_j       -> Q_ij/4 (1 - s_i - s_j + s_i s_j)
  // Fields and offset are row sums over many couplings; extended-precision
  // accumulation keeps the round trip inside 1e-12 of the coefficients.
  std::vector<long double> h(q.dimension, 0.0L);
  long double epsilon = q.offset;
  for (std::size_t i = 0; i < q.dimension; ++i) {
    h[i] += static_cast<long double>(q.linear[i]) / 2.0L;
    epsilon += static_cast<long double>(q.linear[i]) / 2.0L;
  }
  for (const auto& [key, value] : q.quadratic) {
    h[key.first] += static_cast<long double>(value) / 4.0L;
    h[key.second] += static_cast<long double>(value) / 4.0L;
    epsilon += static_cast<long double>(value) / 4.0L;
    if (value != 0.0) ising.coupling[key] = -value / 4.0;
  }
  for (std::size_t i = 0; i < q.dimension; ++i)
    ising.h[i] = static_cast<double>(h[i]);
  ising.epsilon = static_cast<double>(epsilon);
  return ising;
}

QuboModel ising_to_qubo(const IsingModel& ising) {
  QuboModel q;
  q.dimension = ising.dimension;
  q.linear.assign(ising.dimension, 0.0);

  // s_i = 1 - 2 x_i:
  //   -h_i s_i           -> -h_i + 2 h_i x_i
  //   -J_ij s_i s_j      -> -J_ij + 2 J_ij (x_i + x_j) - 4 J_ij x_i x_j
  std::vector<long double> linear(ising.dimension, 0.0L);
  long double offset = ising.epsilon;
  for (std::size_t i = 0; i < ising.dimension; ++i) {
    linear[i] += 2.0L * static_cast<long double>(ising.h[i]);
    offset -= static_cast<long double>(ising.h[i]);
  }
  for (const auto& [key, value] : ising.coupling) {
    linear[key.first] += 2.0L * static_cast<long double>(value);
    linear[key.second] += 2.0L * static_cast<long double>(value);
    offset -= static_cast<long double>(value);
    if (value != 0.0) q.quadratic[key] = -4.0 * value;
  }
  for (std::size_t i = 0; i < ising.dimension; ++i)
    q.linear[i] = static_cast<double>(linear[i]);
  q.offset = static_cast<double>(offset);
  return q;
}

QuboEvaluator::QuboEvaluator(const QuboModel& model)
    : linear_(model.linear), offset_(model.offset) {
  const std::size_t n = model.dimension;
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [key, value] : model.quadratic) {
    (void)value;
    ++degree[key.first];
    ++degree[key.second];
  }
  row_begin_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_begin_[i + 1] = row_begin_[i] + degree[i];
  col_.resize(row_begin_[n]);
  val_.resize(row_begin_[n]);
  std::vector<std::size_t> cursor(row_begin_.begin(), row_begin_.end() - 1);
  for (const auto& [key, value] : model.quadratic) {
    col_[cursor[key.first]] = static_cast<std::uint32_t>(key.second);
    val_[cursor[key.first]++] = value;
    col_[cursor[key.second]] = static_cast<std::uint32_t>(key.first);
    val_[cursor[key.second]++] = value;
  }
}

double QuboEvaluator::energy(std::span<const std::uint8_t> bits) const {
  if (bits.size() != linear_.size())
    throw std::invalid_argument("qubo energy: bitstring length mismatch");
  double e = offset_;
  double quad = 0.0;
  for (std::size_t i = 0; i < linear_.size(); ++i) {
    if (!bits[i]) continue;
    e += linear_[i];
    double acc = 0.0;
    for (std::size_t k = row_begin_[i]; k < row_begin_[i + 1]; ++k)
      acc += val_[k] * static_cast<double>(bits[col_[k]]);
    quad += acc;
  }
  return e + 0.5 * quad;  // CSR stores each pair twice
}

double QuboEvaluator::delta(std::span<const std::uint8_t> bits,
                            std::size_t flip) const {
  if (flip >= linear_.size())
    throw std::out_of_range("delta_energy: flip index out of range");
  double acc = linear_[flip];
  for (std::size_t k = row_begin_[flip]; k < row_begin_[flip + 1]; ++k)
    acc += val_[k] * static_cast<double>(bits[col_[k]]);
  return bits[flip] ? -acc : acc;
}

double QuboEvaluator::delta(std::span<const double> state,
                            std::size_t flip) const {
  if (flip >= linear_.size())
    throw std::out_of_range("delta_energy: flip index out of range");
  double acc = linear_[flip];
  const std::size_t end = row_begin_[flip + 1];
  for (std::size_t k = row_begin_[flip]; k < end; ++k)
    acc += val_[k] * state[col_[k]];
  return state[flip] != 0.0 ? -acc : acc;
}

namespace {

void fnv_bytes(std::uint64_t& hash, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
}

void fnv_double(std::uint64_t& hash, double v) {
  std::uint64_t raw;
  std::memcpy(&raw, &v, sizeof raw);
  fnv_bytes(hash, &raw, sizeof raw);
}

}  // namespace

std::string model_hash(const QuboModel& model) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const std::uint64_t n = model.dimension;
  fnv_bytes(hash, &n, sizeof n);
  for (double v : model.linear) fnv_double(hash, v);
  for (const auto& [key, value] : model.quadratic) {
    const std::uint64_t i = key.first, j = key.second;
    fnv_bytes(hash, &i, sizeof i);
    fnv_bytes(hash, &j, sizeof j);
    fnv_double(hash, value);
  }
  fnv_double(hash, model.offset);

  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[k] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

}  // namespace collopt
