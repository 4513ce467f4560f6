#include "collopt/experiment.hpp"

#include <chrono>
#include <filesystem>

#include "collopt/errors.hpp"
#include "collopt/io.hpp"

namespace collopt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(EncodingChoice choice) {
  switch (choice) {
    case EncodingChoice::balanced: return "balanced";
    case EncodingChoice::unbalanced: return "unbalanced";
    case EncodingChoice::both: return "both";
    case EncodingChoice::lp_only: return "lp-only";
  }
  return "?";
}

std::string to_string(BackendProfile profile) {
  return profile == BackendProfile::sampler ? "sampler" : "digital";
}

EncodingChoice encoding_from_string(const std::string& s) {
  if (s == "balanced") return EncodingChoice::balanced;
  if (s == "unbalanced") return EncodingChoice::unbalanced;
  if (s == "both") return EncodingChoice::both;
  if (s == "lp-only" || s == "lp_only" || s == "none") return EncodingChoice::lp_only;
  throw ConfigError("unknown encoding: " + s);
}

BackendProfile profile_from_string(const std::string& s) {
  if (s == "sampler") return BackendProfile::sampler;
  if (s == "digital") return BackendProfile::digital;
  throw ConfigError("unknown backend profile: " + s);
}

PenaltyWeights weight_defaults(EncodingChoice encoding, BackendProfile profile) {
  PenaltyWeights weights;
  if (encoding == EncodingChoice::balanced) {
    if (profile == BackendProfile::sampler)
      weights.lambda = {1e3, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
    else
      weights.lambda = {1e5, 1.0, 300.0, 1.0, 0.0, 0.0, 0.0};
  } else if (encoding == EncodingChoice::unbalanced) {
    if (profile == BackendProfile::sampler)
      weights.lambda = {1.5e4, 1.0, 1.0, 1.0, 50.0, 1.0, 50.0};
    else
      weights.lambda = {2e4, 1.0, 1.0, 1.0, 50.0, 1.0, 50.0};
  } else {
    throw ConfigError("weight_defaults: pick balanced or unbalanced");
  }
  return weights;
}

namespace {

GeneratorSpec generator_from_json(const json& doc) {
  GeneratorSpec spec;
  if (doc.contains("n_assets")) spec.n_assets = doc.at("n_assets").get<std::size_t>();
  if (doc.contains("tier_counts")) {
    spec.tier_counts.clear();
    for (const json& entry : doc.at("tier_counts"))
      spec.tier_counts.emplace_back(entry.at(0).get<double>(),
                                    entry.at(1).get<std::size_t>());
  }
  if (doc.contains("total_asset_value"))
    spec.total_asset_value = doc.at("total_asset_value").get<double>();
  if (doc.contains("asset_value_min"))
    spec.asset_value_min = doc.at("asset_value_min").get<double>();
  if (doc.contains("asset_value_max"))
    spec.asset_value_max = doc.at("asset_value_max").get<double>();
  if (doc.contains("n_long")) spec.n_long = doc.at("n_long").get<std::size_t>();
  if (doc.contains("n_short")) spec.n_short = doc.at("n_short").get<std::size_t>();
  if (doc.contains("long_exposure_total"))
    spec.long_exposure_total = doc.at("long_exposure_total").get<double>();
  if (doc.contains("short_exposure_total"))
    spec.short_exposure_total = doc.at("short_exposure_total").get<double>();
  if (doc.contains("small_account_ratio"))
    spec.small_account_ratio = doc.at("small_account_ratio").get<double>();
  if (doc.contains("haircut_min")) spec.haircut_min = doc.at("haircut_min").get<double>();
  if (doc.contains("haircut_max")) spec.haircut_max = doc.at("haircut_max").get<double>();
  if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
  return spec;
}

ordered_json generator_to_json(const GeneratorSpec& spec) {
  ordered_json tiers = ordered_json::array();
  for (const auto& [tier, count] : spec.tier_counts)
    tiers.push_back({tier, count});
  return {{"n_assets", spec.n_assets},
          {"tier_counts", std::move(tiers)},
          {"total_asset_value", spec.total_asset_value},
          {"asset_value_min", spec.asset_value_min},
          {"asset_value_max", spec.asset_value_max},
          {"n_long", spec.n_long},
          {"n_short", spec.n_short},
          {"long_exposure_total", spec.long_exposure_total},
          {"short_exposure_total", spec.short_exposure_total},
          {"small_account_ratio", spec.small_account_ratio},
          {"haircut_min", spec.haircut_min},
          {"haircut_max", spec.haircut_max},
          {"seed", spec.seed}};
}

PenaltyWeights weights_from_json(const json& doc) {
  PenaltyWeights weights;
  if (!doc.is_array() || doc.size() > 7)
    throw ConfigError("weights: expected an array of up to 7 lambdas");
  for (std::size_t k = 0; k < doc.size(); ++k)
    weights.lambda[k] = doc[k].get<double>();
  weights.validate();
  return weights;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig config;
  if (doc.contains("instance"))
    config.instance_path = doc.at("instance").get<std::string>();
  if (doc.contains("generator"))
    config.generator = generator_from_json(doc.at("generator"));
  if (doc.contains("bit_width")) config.bit_width = doc.at("bit_width").get<std::size_t>();
  if (doc.contains("encoding"))
    config.encoding = encoding_from_string(doc.at("encoding").get<std::string>());
  if (doc.contains("backend_profile"))
    config.backend_profile =
        profile_from_string(doc.at("backend_profile").get<std::string>());
  if (doc.contains("weights_balanced"))
    config.weights_balanced = weights_from_json(doc.at("weights_balanced"));
  if (doc.contains("weights_unbalanced"))
    config.weights_unbalanced = weights_from_json(doc.at("weights_unbalanced"));
  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    if (s.contains("kind")) {
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "geometric")
        config.schedule_kind = ScheduleKind::geometric;
      else if (kind == "linear")
        config.schedule_kind = ScheduleKind::linear;
      else
        throw ConfigError("schedule: unknown kind " + kind);
    }
    if (s.contains("sweeps")) config.sweeps = s.at("sweeps").get<std::size_t>();
    if (s.contains("reads")) config.reads = s.at("reads").get<std::size_t>();
    if (s.contains("t_initial")) config.t_initial = s.at("t_initial").get<double>();
    if (s.contains("t_final")) config.t_final = s.at("t_final").get<double>();
  }
  if (doc.contains("epsilon")) config.epsilon = doc.at("epsilon").get<double>();
  if (doc.contains("normalize")) config.normalize = doc.at("normalize").get<bool>();
  if (doc.contains("cost_quantity_weighted"))
    config.cost_quantity_weighted = doc.at("cost_quantity_weighted").get<bool>();
  if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("workers")) config.workers = doc.at("workers").get<std::size_t>();
  if (doc.contains("out_dir")) config.out_dir = doc.at("out_dir").get<std::string>();
  if (config.bit_width == 0) throw ConfigError("config: bit_width must be >= 1");
  return config;
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json doc;
  if (config.instance_path) doc["instance"] = *config.instance_path;
  if (config.generator) doc["generator"] = generator_to_json(*config.generator);
  doc["bit_width"] = config.bit_width;
  doc["encoding"] = to_string(config.encoding);
  doc["backend_profile"] = to_string(config.backend_profile);
  if (config.weights_balanced)
    doc["weights_balanced"] = config.weights_balanced->lambda;
  if (config.weights_unbalanced)
    doc["weights_unbalanced"] = config.weights_unbalanced->lambda;
  ordered_json schedule;
  schedule["kind"] =
      config.schedule_kind == ScheduleKind::geometric ? "geometric" : "linear";
  schedule["sweeps"] = config.sweeps;
  schedule["reads"] = config.reads;
  if (config.t_initial) schedule["t_initial"] = *config.t_initial;
  if (config.t_final) schedule["t_final"] = *config.t_final;
  doc["schedule"] = std::move(schedule);
  doc["epsilon"] = config.epsilon;
  doc["normalize"] = config.normalize;
  doc["cost_quantity_weighted"] = config.cost_quantity_weighted;
  doc["seed"] = config.seed;
  doc["workers"] = config.workers;
  doc["out_dir"] = config.out_dir;
  return doc;
}

std::string summary_csv(const std::vector<ExperimentRow>& rows) {
  std::string out =
      "encoding,backend_profile,seed,objective,lp_objective,gap,feasible,"
      "max_exposure_shortfall_pct,runtime_ms\n";
  for (const auto& row : rows) {
    out += row.encoding + "," + row.backend_profile + "," +
           std::to_string(row.seed) + "," + format_double(row.objective) + "," +
           format_double(row.lp_objective) + "," + format_double(row.gap) + "," +
           (row.feasible ? "true" : "false") + "," +
           format_double(row.max_exposure_shortfall_pct) + "," +
           std::to_string(row.runtime_ms) + "\n";
  }
  return out;
}

namespace {

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

Schedule resolve_schedule(const ExperimentConfig& config, const QuboModel& model) {
  Schedule schedule = default_schedule(model, config.sweeps, config.reads, config.seed);
  schedule.kind = config.schedule_kind;
  if (config.t_initial) schedule.t_initial = *config.t_initial;
  if (config.t_final) schedule.t_final = *config.t_final;
  schedule.validate();
  return schedule;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  ExperimentResult result;

  if (config.instance_path) {
    result.instance = read_instance(*config.instance_path);
  } else {
    GeneratorSpec spec = config.generator.value_or(GeneratorSpec{});
    if (!config.generator || !config.generator->seed) spec.seed = config.seed;
    result.instance = generate_instance(spec);
  }

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + config.out_dir);
  auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(config.out_dir) / name).string();
    write_text_file(path, content);
    result.files_written.push_back(path);
  };

  emit("instance.json", instance_to_json(result.instance).dump(2) + "\n");

  const auto lp_start = std::chrono::steady_clock::now();
  result.lp = solve_lp(result.instance);
  const std::int64_t lp_ms = elapsed_ms(lp_start);
  if (result.lp.status == LpStatus::infeasible)
    throw InfeasibleError("LP baseline is infeasible for this instance");
  result.lp_report =
      evaluate_allocation(result.lp.allocation, result.instance, config.epsilon);

  ExperimentRow lp_row;
  lp_row.encoding = "lp";
  lp_row.backend_profile = "simplex";
  lp_row.seed = config.seed;
  lp_row.objective = result.lp.objective;
  lp_row.lp_objective = result.lp.objective;
  lp_row.gap = 0.0;
  lp_row.feasible = result.lp.status == LpStatus::optimal;
  lp_row.max_exposure_shortfall_pct = 100.0 * result.lp_report.max_exposure_shortfall();
  lp_row.runtime_ms = lp_ms;
  result.rows.push_back(lp_row);
  emit("allocation_lp.csv", allocation_csv(result.lp.allocation));
  emit("exposure_lp.csv", exposure_csv(result.lp.allocation, result.instance));

  std::vector<EncodingChoice> encodings;
  if (config.encoding == EncodingChoice::balanced ||
      config.encoding == EncodingChoice::both)
    encodings.push_back(EncodingChoice::balanced);
  if (config.encoding == EncodingChoice::unbalanced ||
      config.encoding == EncodingChoice::both)
    encodings.push_back(EncodingChoice::unbalanced);

  CoQuboOptions options;
  options.bit_width = config.bit_width;
  options.normalize = config.normalize;
  options.cost_quantity_weighted = config.cost_quantity_weighted;

  for (EncodingChoice encoding : encodings) {
    const std::string name = to_string(encoding);
    const auto start = std::chrono::steady_clock::now();

    PenaltyWeights weights;
    if (encoding == EncodingChoice::balanced)
      weights = config.weights_balanced.value_or(
          weight_defaults(encoding, config.backend_profile));
    else
      weights = config.weights_unbalanced.value_or(
          weight_defaults(encoding, config.backend_profile));

    const CoQuboBuild build =
        encoding == EncodingChoice::balanced
            ? co_qubo_balanced(result.instance, options, weights)
            : co_qubo_unbalanced(result.instance, options, weights);

    const Schedule schedule = resolve_schedule(config, build.model);
    EncodingOutcome outcome;
    outcome.samples = anneal(build.model, schedule, config.workers);
    outcome.allocation = decode_solution(outcome.samples.best().bits,
                                         build.model.layout, result.instance);
    outcome.report =
        evaluate_allocation(outcome.allocation, result.instance, config.epsilon);
    outcome.warnings = build.model.warnings;

    ExperimentRow row;
    row.encoding = name;
    row.backend_profile = to_string(config.backend_profile);
    row.seed = config.seed;
    row.objective = outcome.report.objective;
    row.lp_objective = result.lp.objective;
    row.gap = lp_gap(result.lp, outcome.report);
    row.feasible = outcome.report.feasible_within;
    row.max_exposure_shortfall_pct =
        100.0 * outcome.report.max_exposure_shortfall();
    row.runtime_ms = elapsed_ms(start);
    result.rows.push_back(row);

    emit("allocation_" + name + ".csv", allocation_csv(outcome.allocation));
    emit("exposure_" + name + ".csv",
         exposure_csv(outcome.allocation, result.instance));
    emit("samples_" + name + ".csv", sample_set_csv(outcome.samples));
    emit("samples_" + name + ".meta.json",
         sample_set_metadata(outcome.samples).dump(2) + "\n");
    result.outcomes.emplace(name, std::move(outcome));
  }

  emit("summary.csv", summary_csv(result.rows));
  return result;
}

KnapsackInstance kp_benchmark_instance() {
  KnapsackInstance instance;
  instance.weights = {23, 31, 29, 44, 53, 38, 63, 85, 89, 82};
  instance.values = {92, 57, 49, 68, 60, 43, 67, 84, 87, 72};
  instance.capacity = 165;
  return instance;
}

std::pair<std::int64_t, std::int64_t> kp_decode_best(
    const KnapsackInstance& instance, const SampleSet& samples) {
  const BitVector& bits = samples.best().bits;
  std::int64_t value = 0, weight = 0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    if (i < bits.size() && bits[i]) {
      value += instance.values[i];
      weight += instance.weights[i];
    }
  }
  return {value, weight};
}

KpDemoResult kp_demo(std::uint64_t seed, std::size_t workers) {
  const KnapsackInstance instance = kp_benchmark_instance();
  const KpSolution exact = kp_exact_dp(instance);

  KpDemoResult result;
  result.exact_value = exact.value;
  result.exact_weight = exact.selection_weight(instance);

  struct Config {
    std::string encoding;
    std::string label;
    QuboModel model;
  };
  std::vector<Config> configs;
  configs.push_back({"log", "lambda0=1", kp_qubo_log(instance, 1.0)});
  configs.push_back({"log", "lambda0=1e4", kp_qubo_log(instance, 1e4)});
  configs.push_back({"one-hot", "lambda0=0.1,lambda1=1e3",
                     kp_qubo_onehot(instance, 0.1, 1e3)});
  configs.push_back({"unbalanced", "lambda=(0.9603,0.0371),lambda0=1",
                     kp_qubo_unbalanced(instance, 0.9603, 0.0371, 1.0)});

  for (auto& config : configs) {
    const auto start = std::chrono::steady_clock::now();
    const Schedule schedule = default_schedule(config.model, 1000, 100, seed);
    const SampleSet samples = anneal(config.model, schedule, workers);
    const auto [value, weight] = kp_decode_best(instance, samples);
    KpDemoRow row;
    row.encoding = config.encoding;
    row.config = config.label;
    row.decoded_value = value;
    row.decoded_weight = weight;
    row.reached_optimum = value == result.exact_value;
    row.runtime_ms = elapsed_ms(start);
    result.rows.push_back(row);
  }
  return result;
}

std::string kp_demo_csv(const KpDemoResult& result) {
  std::string out =
      "encoding,config,decoded_value,decoded_weight,exact_value,"
      "reached_optimum,runtime_ms\n";
  for (const auto& row : result.rows) {
    out += row.encoding + "," + row.config + "," +
           std::to_string(row.decoded_value) + "," +
           std::to_string(row.decoded_weight) + "," +
           std::to_string(result.exact_value) + "," +
           (row.reached_optimum ? "true" : "false") + "," +
           std::to_string(row.runtime_ms) + "\n";
  }
  return out;
}

}  // namespace collopt
