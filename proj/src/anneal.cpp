#include "collopt/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "collopt/rng.hpp"

namespace collopt {

void Schedule::validate() const {
  if (!(t_final > 0.0) || !(t_initial >= t_final))
    throw std::invalid_argument("schedule: need t_initial >= t_final > 0");
  if (sweeps < 1 || reads < 1)
    throw std::invalid_argument("schedule: sweeps and reads must be >= 1");
}

double Schedule::temperature(std::size_t sweep) const {
  if (sweeps <= 1) return t_initial;
  const double frac = static_cast<double>(sweep) / static_cast<double>(sweeps - 1);
  if (kind == ScheduleKind::geometric)
    return t_initial * std::pow(t_final / t_initial, frac);
  return t_initial + (t_final - t_initial) * frac;
}

Schedule default_schedule(const QuboModel& model, std::size_t sweeps,
                          std::size_t reads, std::uint64_t seed) {
  double max_delta = 0.0;
  double min_coeff = std::numeric_limits<double>::infinity();
  std::vector<double> reach(model.dimension, 0.0);
  for (std::size_t i = 0; i < model.dimension; ++i) {
    reach[i] = std::fabs(model.linear[i]);
    if (model.linear[i] != 0.0)
      min_coeff = std::min(min_coeff, std::fabs(model.linear[i]));
  }
  for (const auto& [key, value] : model.quadratic) {
    reach[key.first] += std::fabs(value);
    reach[key.second] += std::fabs(value);
    if (value != 0.0) min_coeff = std::min(min_coeff, std::fabs(value));
  }
  for (double r : reach) max_delta = std::max(max_delta, r);

  Schedule schedule;
  schedule.sweeps = sweeps;
  schedule.reads = reads;
  schedule.seed = seed;
  if (max_delta == 0.0) {  // constant model
    schedule.t_initial = 1.0;
    schedule.t_final = 0.01;
  } else {
    schedule.t_initial = max_delta;
    schedule.t_final = std::min(1e-2 * min_coeff, max_delta);
  }
  return schedule;
}

const Sample& SampleSet::best() const {
  if (samples.empty()) throw std::logic_error("sample set is empty");
  return samples.front();
}

namespace {

struct ReadResult {
  BitVector bits;
  double energy = 0.0;
};

ReadResult run_read(const QuboEvaluator& eval, const Schedule& schedule,
                    std::uint64_t read_index, std::vector<double>* trace) {
  const std::size_t n = eval.dimension();
  Rng rng = derive_stream(schedule.seed, read_index);

  std::vector<double> state(n);  // 0.0/1.0; keeps the delta loop branch-free
  BitVector bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    bits[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
    state[i] = static_cast<double>(bits[i]);
  }

  double energy = eval.energy(bits);
  BitVector best_state = bits;
  double best_energy = energy;

  for (std::size_t sweep = 0; sweep < schedule.sweeps; ++sweep) {
    const double inv_t = 1.0 / schedule.temperature(sweep);
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t flip = static_cast<std::size_t>(rng.uniform_index(n));
      const double d = eval.delta(std::span<const double>(state), flip);
      bool accept = d <= 0.0;
      if (!accept) accept = rng.uniform01() < std::exp(-d * inv_t);
      if (!accept) continue;
      state[flip] = 1.0 - state[flip];
      bits[flip] ^= 1;
      energy += d;
      if (energy < best_energy) {  // strict: first encountered wins ties
        best_energy = energy;
        best_state = bits;
      }
    }
    if (trace) trace->push_back(best_energy);
  }
  const double exact = eval.energy(best_state);  // drift-free stored energy
  return {std::move(best_state), exact};
}

}  // namespace

SampleSet anneal(const QuboModel& model, const Schedule& schedule,
                 std::size_t workers,
                 std::vector<std::vector<double>>* best_trace) {
  if (model.dimension == 0)
    throw std::invalid_argument("anneal: model has no variables");
  model.validate();
  schedule.validate();
  if (workers == 0) workers = 1;

  const QuboEvaluator eval(model);
  std::vector<ReadResult> results(schedule.reads);
  if (best_trace) best_trace->assign(schedule.reads, {});

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r)
      results[r] = run_read(eval, schedule, r,
                            best_trace ? &(*best_trace)[r] : nullptr);
  };

  if (workers <= 1 || schedule.reads <= 1) {
    run_range(0, schedule.reads);
  } else {
    workers = std::min(workers, schedule.reads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (schedule.reads + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(schedule.reads, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  // Canonical merge: sort by (energy, bits), fold duplicates. The outcome is
  // independent of how reads were partitioned across workers.
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.bits < b.bits;
  });

  SampleSet set;
  set.schedule = schedule;
  set.model_hash = model_hash(model);
  for (auto& r : results) {
    if (!set.samples.empty() && set.samples.back().bits == r.bits) {
      ++set.samples.back().multiplicity;
      continue;
    }
    set.samples.push_back({std::move(r.bits), r.energy, 1});
  }
  return set;
}

std::int64_t KpSolution::selection_weight(const KnapsackInstance& instance) const {
  std::int64_t weight = 0;
  for (std::size_t i = 0; i < selection.size(); ++i)
    if (selection[i]) weight += instance.weights[i];
  return weight;
}

KpSolution kp_exact_dp(const KnapsackInstance& instance) {
  if (instance.weights.empty()) return {0, {}};
  instance.validate();
  const std::size_t n = instance.size();
  const std::size_t cap = static_cast<std::size_t>(instance.capacity);

  // suffix[i][c]: best value achievable from items i..n-1 within capacity c.
  std::vector<std::vector<std::int64_t>> suffix(
      n + 1, std::vector<std::int64_t>(cap + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    const auto w = static_cast<std::size_t>(instance.weights[i]);
    const std::int64_t v = instance.values[i];
    for (std::size_t c = 0; c <= cap; ++c) {
      std::int64_t best = suffix[i + 1][c];
      if (w <= c) best = std::max(best, v + suffix[i + 1][c - w]);
      suffix[i][c] = best;
    }
  }

  // Walk forward, excluding an item whenever the optimum survives without
  // it; this yields the lexicographically smallest selection bitstring.
  KpSolution solution;
  solution.value = suffix[0][cap];
  solution.selection.assign(n, 0);
  std::size_t c = cap;
  std::int64_t remaining = solution.value;
  for (std::size_t i = 0; i < n; ++i) {
    if (suffix[i + 1][c] == remaining) continue;
    solution.selection[i] = 1;
    c -= static_cast<std::size_t>(instance.weights[i]);
    remaining -= instance.values[i];
  }
  return solution;
}

namespace {

GroundSet enumerate_bits(const QuboEvaluator& eval, std::size_t max_bits) {
  const std::size_t n = eval.dimension();
  if (n > max_bits)
    throw std::invalid_argument("enumerate_exact: dimension exceeds max_bits");

  BitVector state(n, 0);
  double energy = eval.energy(state);
  double best = energy;
  // Keep every state whose running energy is within the drift margin of the
  // running best; exact energies settle the winners afterwards.
  const double margin = 1e-7 * (1.0 + std::fabs(best));
  std::vector<BitVector> candidates{state};

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto flip = static_cast<std::size_t>(__builtin_ctzll(k));
    energy += eval.delta(state, flip);
    state[flip] ^= 1;
    if ((k & 0xffff) == 0) energy = eval.energy(state);  // cap FP drift
    if (energy <= best + margin) {
      if (energy < best) best = energy;
      candidates.push_back(state);
      if (candidates.size() > 65536) {
        std::erase_if(candidates, [&](const BitVector& c) {
          return eval.energy(c) > best + margin;
        });
      }
    }
  }

  GroundSet ground;
  ground.energy = std::numeric_limits<double>::infinity();
  std::vector<double> exact(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    exact[i] = eval.energy(candidates[i]);
    ground.energy = std::min(ground.energy, exact[i]);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (exact[i] == ground.energy) ground.states.push_back(std::move(candidates[i]));
  return ground;
}

}  // namespace

GroundSet enumerate_exact(const QuboModel& model, std::size_t max_bits) {
  model.validate();
  if (model.dimension == 0) return {model.offset, {BitVector{}}};
  return enumerate_bits(QuboEvaluator(model), max_bits);
}

GroundSet enumerate_exact(const IsingModel& model, std::size_t max_bits) {
  // Enumerate through the QUBO image; energies agree state-for-state, and
  // the bit states returned map to spins via spins_from_bits.
  return enumerate_exact(ising_to_qubo(model), max_bits);
}

}  // namespace collopt
