#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collopt/instances.hpp"
#include "collopt/qubo.hpp"

namespace collopt {

enum class ScheduleKind { geometric, linear };

/// Annealing schedule: `reads` independent restarts of `sweeps` full passes,
/// with the temperature interpolated from t_initial down to t_final.
struct Schedule {
  ScheduleKind kind = ScheduleKind::geometric;
  double t_initial = 10.0;
  double t_final = 0.1;
  std::size_t sweeps = 1000;
  std::size_t reads = 100;
  std::uint64_t seed = 0;

  void validate() const;
  double temperature(std::size_t sweep) const;
};

/// Schedule with temperatures derived from the model: t_initial is an upper
/// estimate of |dE| over single flips, t_final is 1e-2 of the smallest
/// nonzero coefficient magnitude.
Schedule default_schedule(const QuboModel& model, std::size_t sweeps = 1000,
                          std::size_t reads = 100, std::uint64_t seed = 0);

struct Sample {
  BitVector bits;
  double energy = 0.0;
  std::size_t multiplicity = 1;
};

/// Annealer output: unique best-of-read states sorted by (energy, bits);
/// identical bitstrings are merged with their multiplicity. Deterministic
/// for a fixed (model, schedule) regardless of worker count.
struct SampleSet {
  std::vector<Sample> samples;
  Schedule schedule;
  std::string model_hash;

  const Sample& best() const;
};

/// Single-bit-flip Metropolis sampler. Each read runs from its own RNG
/// stream (derived from schedule.seed and the read index), proposes
/// `dimension` uniformly random flips per sweep, and retains its best-seen
/// state rather than its final state. Stored energies are recomputed from
/// scratch. If `best_trace` is given it receives, per read, the best energy
/// after each sweep.
SampleSet anneal(const QuboModel& model, const Schedule& schedule,
                 std::size_t workers = 1,
                 std::vector<std::vector<double>>* best_trace = nullptr);

struct KpSolution {
  std::int64_t value = 0;
  BitVector selection;

  std::int64_t selection_weight(const KnapsackInstance& instance) const;
};

/// Exact dynamic program over (items x capacity); ties resolved to the
/// lexicographically smallest selection bitstring.
KpSolution kp_exact_dp(const KnapsackInstance& instance);

struct GroundSet {
  double energy = 0.0;
  std::vector<BitVector> states;  // every argmin, in Gray-walk order
};

/// Exhaustive minimum over all 2^N states (Gray-code walk with incremental
/// deltas, candidates re-evaluated from scratch).
GroundSet enumerate_exact(const QuboModel& model, std::size_t max_bits = 24);
GroundSet enumerate_exact(const IsingModel& model, std::size_t max_bits = 24);

}  // namespace collopt
