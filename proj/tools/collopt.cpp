// Command-line front end: generate instances, solve the LP baseline, build
// QUBO encodings, sample them, and run the full experiment pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "collopt/errors.hpp"
#include "collopt/experiment.hpp"
#include "collopt/io.hpp"

namespace {

using namespace collopt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

ExperimentConfig load_config(const std::optional<std::string>& path) {
  if (!path) return {};
  return config_from_json(
      nlohmann::json::parse(read_text_file(*path), nullptr, true));
}

int cmd_generate(const std::optional<std::string>& config_path,
                 std::uint64_t seed, const std::string& out) {
  ExperimentConfig config = load_config(config_path);
  GeneratorSpec spec = config.generator.value_or(GeneratorSpec{});
  if (seed || !spec.seed) spec.seed = seed;
  const CollateralInstance instance = generate_instance(spec);
  write_instance(out, instance);
  std::cout << "wrote " << out << " (" << instance.n_assets() << " assets, "
            << instance.n_accounts() << " accounts)\n";
  return kExitOk;
}

int cmd_solve_lp(const std::string& instance_path, const std::string& out,
                 const std::optional<std::string>& mps_out) {
  const CollateralInstance instance = read_instance(instance_path);
  if (mps_out) write_text_file(*mps_out, lp_to_mps(instance));
  const LpSolution solution = solve_lp(instance);
  if (solution.status == LpStatus::infeasible) {
    std::cerr << "LP infeasible\n";
    return kExitInfeasible;
  }
  if (!out.empty()) write_text_file(out, allocation_csv(solution.allocation));
  std::cout << "status="
            << (solution.status == LpStatus::optimal ? "optimal" : "iteration-limit")
            << " objective=" << format_double(solution.objective)
            << " iterations=" << solution.iterations << "\n";
  return kExitOk;
}

int cmd_encode(const std::string& instance_path, const std::string& encoding,
               std::size_t bits, const std::string& profile, bool no_normalize,
               const std::string& out) {
  const CollateralInstance instance = read_instance(instance_path);
  CoQuboOptions options;
  options.bit_width = bits;
  options.normalize = !no_normalize;
  const EncodingChoice choice = encoding_from_string(encoding);
  const PenaltyWeights weights =
      weight_defaults(choice, profile_from_string(profile));
  const CoQuboBuild build = choice == EncodingChoice::balanced
                                ? co_qubo_balanced(instance, options, weights)
                                : co_qubo_unbalanced(instance, options, weights);
  write_qubo(out, build.model);
  std::cout << "wrote " << out << " (" << build.model.dimension << " bits, "
            << build.model.quadratic.size() << " couplers)\n";
  for (const auto& warning : build.model.warnings)
    std::cout << "warning: " << warning << "\n";
  return kExitOk;
}

int cmd_anneal(const std::string& qubo_path, std::size_t sweeps,
               std::size_t reads, std::uint64_t seed, std::size_t workers,
               const std::string& out) {
  const QuboModel model = read_qubo(qubo_path);
  const Schedule schedule = default_schedule(model, sweeps, reads, seed);
  const SampleSet samples = anneal(model, schedule, workers);
  write_text_file(out, sample_set_csv(samples));
  const std::string meta = out + ".meta.json";
  write_text_file(meta, sample_set_metadata(samples).dump(2) + "\n");
  std::cout << "best energy " << format_double(samples.best().energy) << " over "
            << schedule.reads << " reads; wrote " << out << "\n";
  return kExitOk;
}

int cmd_run(const std::optional<std::string>& config_path, std::uint64_t seed,
            const std::optional<std::string>& out_dir,
            const std::optional<std::string>& instance_path) {
  ExperimentConfig config = load_config(config_path);
  if (seed) config.seed = seed;
  if (out_dir) config.out_dir = *out_dir;
  if (instance_path) config.instance_path = *instance_path;
  const ExperimentResult result = run_experiment(config);
  std::cout << summary_csv(result.rows);
  return kExitOk;
}

int cmd_kp(std::uint64_t seed, const std::optional<std::string>& out,
           std::size_t workers) {
  const KpDemoResult result = kp_demo(seed, workers);
  const std::string csv = kp_demo_csv(result);
  if (out) write_text_file(*out, csv);
  std::cout << "exact optimum: value " << result.exact_value << " weight "
            << result.exact_weight << "\n"
            << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collateral-allocation QUBO toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::optional<std::string> config_path;
  std::string out;
  std::optional<std::string> out_opt;
  std::optional<std::string> mps_out;
  std::optional<std::string> instance_opt;
  std::string instance_path;
  std::string encoding = "balanced";
  std::string profile = "sampler";
  std::size_t bits = 7;
  std::size_t sweeps = 1000;
  std::size_t reads = 100;
  std::size_t workers = 1;
  bool no_normalize = false;

  auto* generate = app.add_subcommand("generate", "Write a synthetic instance");
  generate->add_option("--seed", seed);
  generate->add_option("--config", config_path);
  generate->add_option("--out", out)->required();

  auto* solve = app.add_subcommand("solve-lp", "Solve the continuous relaxation");
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--out", out);
  solve->add_option("--mps", mps_out);
  solve->add_option("--seed", seed);
  solve->add_option("--config", config_path);

  auto* encode = app.add_subcommand("encode", "Build a QUBO from an instance");
  encode->add_option("--instance", instance_path)->required();
  encode->add_option("--encoding", encoding)
      ->check(CLI::IsMember({"balanced", "unbalanced"}));
  encode->add_option("--bits", bits);
  encode->add_option("--profile", profile)
      ->check(CLI::IsMember({"sampler", "digital"}));
  encode->add_flag("--no-normalize", no_normalize);
  encode->add_option("--out", out)->required();
  encode->add_option("--seed", seed);
  encode->add_option("--config", config_path);

  auto* sample = app.add_subcommand("anneal", "Sample a QUBO file");
  sample->add_option("--qubo", instance_path)->required();
  sample->add_option("--sweeps", sweeps);
  sample->add_option("--reads", reads);
  sample->add_option("--seed", seed);
  sample->add_option("--workers", workers);
  sample->add_option("--out", out)->required();
  sample->add_option("--config", config_path);

  auto* run = app.add_subcommand("run", "Run the full experiment pipeline");
  run->add_option("--config", config_path);
  run->add_option("--seed", seed);
  run->add_option("--out", out_opt);
  run->add_option("--instance", instance_opt);

  auto* kp = app.add_subcommand("kp", "Benchmark knapsack demo");
  kp->add_option("--seed", seed);
  kp->add_option("--out", out_opt);
  kp->add_option("--workers", workers);
  kp->add_option("--config", config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(config_path, seed, out);
    if (solve->parsed()) return cmd_solve_lp(instance_path, out, mps_out);
    if (encode->parsed())
      return cmd_encode(instance_path, encoding, bits, profile, no_normalize, out);
    if (sample->parsed())
      return cmd_anneal(instance_path, sweeps, reads, seed, workers, out);
    if (run->parsed()) return cmd_run(config_path, seed, out_opt, instance_opt);
    if (kp->parsed()) return cmd_kp(seed, out_opt, workers);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
