#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "collopt/anneal.hpp"
#include "collopt/encode.hpp"
#include "collopt/generator.hpp"
#include "collopt/lp.hpp"

namespace collopt {

enum class EncodingChoice { balanced, unbalanced, both, lp_only };
enum class BackendProfile { sampler, digital };

std::string to_string(EncodingChoice choice);
std::string to_string(BackendProfile profile);
EncodingChoice encoding_from_string(const std::string& s);
BackendProfile profile_from_string(const std::string& s);

/// Published multiplier presets per encoding and solver profile.
PenaltyWeights weight_defaults(EncodingChoice encoding, BackendProfile profile);

struct ExperimentConfig {
  std::optional<std::string> instance_path;
  std::optional<GeneratorSpec> generator;  // used when no instance_path

  std::size_t bit_width = 7;
  EncodingChoice encoding = EncodingChoice::both;
  BackendProfile backend_profile = BackendProfile::sampler;
  std::optional<PenaltyWeights> weights_balanced;
  std::optional<PenaltyWeights> weights_unbalanced;

  std::size_t sweeps = 2000;
  std::size_t reads = 24;
  std::optional<double> t_initial;  // model-derived when absent
  std::optional<double> t_final;
  ScheduleKind schedule_kind = ScheduleKind::geometric;

  double epsilon = 0.05;
  bool normalize = true;
  bool cost_quantity_weighted = false;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out_dir = ".";
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

struct ExperimentRow {
  std::string encoding;
  std::string backend_profile;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double lp_objective = 0.0;
  double gap = 0.0;
  bool feasible = false;
  double max_exposure_shortfall_pct = 0.0;
  std::int64_t runtime_ms = 0;
};

struct EncodingOutcome {
  AllocationMatrix allocation;
  FeasibilityReport report;
  SampleSet samples;
  std::vector<std::string> warnings;
};

struct ExperimentResult {
  CollateralInstance instance;
  LpSolution lp;
  FeasibilityReport lp_report;
  std::vector<ExperimentRow> rows;  // LP row first
  std::map<std::string, EncodingOutcome> outcomes;  // key: encoding name
  std::vector<std::string> files_written;
};

std::string summary_csv(const std::vector<ExperimentRow>& rows);

/// Full pipeline: load or generate the instance, solve the LP baseline,
/// then per requested encoding build the QUBO (normalized terms), anneal,
/// decode the best sample and report feasibility and gap. Writes the report
/// bundle under config.out_dir. Throws InfeasibleError when the LP has no
/// feasible point.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// The ten-item benchmark knapsack (capacity 165, optimum 309).
KnapsackInstance kp_benchmark_instance();

struct KpDemoRow {
  std::string encoding;
  std::string config;
  std::int64_t decoded_value = 0;
  std::int64_t decoded_weight = 0;
  bool reached_optimum = false;
  std::int64_t runtime_ms = 0;
};

struct KpDemoResult {
  std::int64_t exact_value = 0;
  std::int64_t exact_weight = 0;
  std::vector<KpDemoRow> rows;
};

/// Runs the benchmark knapsack through every encoding with default penalty
/// weights and a 1000-sweep x 100-read schedule, plus the exact DP.
KpDemoResult kp_demo(std::uint64_t seed, std::size_t workers = 1);
std::string kp_demo_csv(const KpDemoResult& result);

/// Decoded value/weight of the best sample of a knapsack QUBO (item bits
/// are the first n bits of the layout).
std::pair<std::int64_t, std::int64_t> kp_decode_best(
    const KnapsackInstance& instance, const SampleSet& samples);

}  // namespace collopt
