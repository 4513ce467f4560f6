#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "collopt/errors.hpp"
#include "collopt/experiment.hpp"
#include "collopt/generator.hpp"
#include "collopt/io.hpp"
#include "collopt/lp.hpp"
#include "oracles.hpp"

using namespace collopt;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("collopt_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Parses the allocation CSV back into a matrix (row-major body cells).
Matrix parse_allocation_csv(const std::string& text, std::size_t n,
                            std::size_t m) {
  Matrix q(n, m);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(std::getline(in, line));
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // asset id
    for (std::size_t j = 0; j < m; ++j) {
      REQUIRE(std::getline(row, cell, ','));
      q(i, j) = std::stod(cell);
    }
  }
  return q;
}

std::string mask_runtime_column(const std::string& summary) {
  std::istringstream in(summary);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    REQUIRE(pos != std::string::npos);
    out += line.substr(0, pos) + ",*\n";
  }
  return out;
}

}  // namespace

TEST_CASE("generated default instance matches the documented scale") {
  GeneratorSpec spec;
  spec.seed = 42;
  const CollateralInstance instance = generate_instance(spec);

  REQUIRE(instance.n_assets() == 10);
  REQUIRE(instance.n_accounts() == 5);

  double total_value = 0.0;
  for (const auto& a : instance.assets) total_value += a.quantity * a.unit_value;
  CHECK(total_value == doctest::Approx(8.86e6).epsilon(0.02));

  // Tier layout: assets 1-4 low, 5-6 mid, 7-10 high.
  for (int i = 0; i < 4; ++i) CHECK(instance.assets[i].tier == 0.2);
  for (int i = 4; i < 6; ++i) CHECK(instance.assets[i].tier == 0.5);
  for (int i = 6; i < 10; ++i) CHECK(instance.assets[i].tier == 0.8);
  for (const auto& a : instance.assets) {
    const double value = a.quantity * a.unit_value;
    CHECK(value >= 0.3e6 - 1.0);
    CHECK(value <= 1.5e6 + 1.0);
  }

  double long_total = 0.0, short_total = 0.0;
  for (const auto& acc : instance.accounts)
    (acc.duration == 0 ? long_total : short_total) += acc.exposure;
  CHECK(instance.accounts[0].duration == 0);
  CHECK(instance.accounts[1].duration == 0);
  CHECK(instance.accounts[2].duration == 1);
  CHECK(instance.accounts[4].duration == 1);
  CHECK(long_total == doctest::Approx(1.49e6).epsilon(0.02));
  CHECK(short_total == doctest::Approx(1.09e6).epsilon(0.02));

  // The last short-term account is the small one: a tenth of the others' mean.
  const double small = instance.accounts[4].exposure;
  double others = 0.0;
  for (int j = 0; j < 4; ++j) others += instance.accounts[j].exposure;
  CHECK(small == doctest::Approx(0.1 * others / 4.0).epsilon(1e-9));

  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(instance.haircut(i, j) >= 0.85);
      CHECK(instance.haircut(i, j) <= 1.0);
      CHECK(instance.limits(i, j) == kUnboundedLimit);
    }
  CHECK_FALSE(instance.groups.has_value());
  CHECK_NOTHROW(instance.validate());

  // Generated instances must be solvable by the LP baseline.
  CHECK(solve_lp(instance).status == LpStatus::optimal);
}

TEST_CASE("generation is deterministic per seed") {
  GeneratorSpec spec;
  spec.seed = 7;
  const std::string a = instance_to_json(generate_instance(spec)).dump(2);
  const std::string b = instance_to_json(generate_instance(spec)).dump(2);
  CHECK(a == b);
  spec.seed = 8;
  CHECK(instance_to_json(generate_instance(spec)).dump(2) != a);
}

TEST_CASE("unsatisfiable generator targets fail before sampling") {
  GeneratorSpec spec;
  spec.total_asset_value = 100.0;  // ten assets of >= 0.3e6 cannot sum to this
  CHECK_THROWS_AS(generate_instance(spec), ConfigError);

  GeneratorSpec bad_tiers;
  bad_tiers.tier_counts = {{0.2, 4}};
  CHECK_THROWS_AS(generate_instance(bad_tiers), ConfigError);
}

TEST_CASE("weight defaults per encoding and profile") {
  const auto bs = weight_defaults(EncodingChoice::balanced, BackendProfile::sampler);
  CHECK(bs[0] == 1e3);
  CHECK(bs[1] == 1.0);
  CHECK(bs[2] == 1.0);

  const auto bd = weight_defaults(EncodingChoice::balanced, BackendProfile::digital);
  CHECK(bd[0] == 1e5);
  CHECK(bd[2] == 300.0);

  const auto us = weight_defaults(EncodingChoice::unbalanced, BackendProfile::sampler);
  CHECK(us[0] == 1.5e4);
  CHECK(us[1] == 1.0);
  CHECK(us[2] == 1.0);
  CHECK(us[3] == 1.0);
  CHECK(us[4] == 50.0);

  const auto ud = weight_defaults(EncodingChoice::unbalanced, BackendProfile::digital);
  CHECK(ud[0] == 2e4);
  CHECK(ud[4] == 50.0);

  // The cost weight dominates the constraint weights in every profile.
  for (const auto& weights : {bs, bd, us, ud})
    for (std::size_t k = 1; k < 7; ++k) CHECK(weights[0] > weights[k]);

  CHECK_THROWS_AS(weight_defaults(EncodingChoice::both, BackendProfile::sampler),
                  ConfigError);
}

TEST_CASE("experiment config round-trips through JSON") {
  ExperimentConfig config;
  config.generator = GeneratorSpec{};
  config.generator->seed = 5;
  config.bit_width = 5;
  config.encoding = EncodingChoice::unbalanced;
  config.backend_profile = BackendProfile::digital;
  config.weights_balanced = weight_defaults(EncodingChoice::balanced,
                                            BackendProfile::sampler);
  config.sweeps = 123;
  config.reads = 9;
  config.t_initial = 55.0;
  config.epsilon = 0.02;
  config.seed = 17;
  config.workers = 3;
  config.out_dir = "somewhere";

  const ExperimentConfig back =
      config_from_json(nlohmann::json::parse(config_to_json(config).dump()));
  CHECK(back.generator->seed == 5);
  CHECK(back.bit_width == 5);
  CHECK(back.encoding == EncodingChoice::unbalanced);
  CHECK(back.backend_profile == BackendProfile::digital);
  REQUIRE(back.weights_balanced.has_value());
  CHECK((*back.weights_balanced)[0] == 1e3);
  CHECK(back.sweeps == 123);
  CHECK(back.reads == 9);
  REQUIRE(back.t_initial.has_value());
  CHECK(*back.t_initial == 55.0);
  CHECK_FALSE(back.t_final.has_value());
  CHECK(back.epsilon == 0.02);
  CHECK(back.seed == 17);
  CHECK(back.workers == 3);
  CHECK(back.out_dir == "somewhere");

  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"encoding", "bogus"}}),
                  ConfigError);
}

TEST_CASE("instance JSON round-trips including unbounded limits") {
  GeneratorSpec spec;
  spec.seed = 3;
  CollateralInstance instance = generate_instance(spec);
  instance.limits(2, 1) = 55.5;
  AssetGroups groups;
  groups.membership = Matrix(10, 1);
  groups.membership(0, 0) = 1.0;
  groups.membership(3, 0) = 1.0;
  groups.caps = Matrix(1, 5, 123.0);
  instance.groups = groups;

  const CollateralInstance back =
      instance_from_json(nlohmann::json::parse(instance_to_json(instance).dump()));
  CHECK(back.limits(2, 1) == 55.5);
  CHECK(back.limits(0, 0) == kUnboundedLimit);
  REQUIRE(back.groups.has_value());
  CHECK(back.groups->membership(3, 0) == 1.0);
  CHECK(back.groups->caps(0, 4) == 123.0);
  CHECK(instance_to_json(back).dump() == instance_to_json(instance).dump());
}

TEST_CASE("qubo JSON round-trips") {
  Rng rng(51);
  const auto instance = oracles::tiny_instance(100.0, 1.0, 0.2, 50.0, 0);
  CoQuboOptions options;
  options.bit_width = 3;
  PenaltyWeights weights;
  weights.lambda = {1.0, 2.0, 3.0, 0, 0, 0, 0};
  const QuboModel model = co_qubo_balanced(instance, options, weights).model;
  const QuboModel back =
      qubo_from_json(nlohmann::json::parse(qubo_to_json(model).dump()));
  CHECK(back.dimension == model.dimension);
  CHECK(back.linear == model.linear);
  CHECK(back.quadratic == model.quadratic);
  CHECK(back.offset == model.offset);
  CHECK(back.layout.total == model.layout.total);
  CHECK(back.layout.decision.size() == model.layout.decision.size());
  CHECK(model_hash(back) == model_hash(model));
}

TEST_CASE("run_experiment writes a consistent bundle") {
  const fs::path dir = fresh_dir("bundle");

  ExperimentConfig config;
  GeneratorSpec spec;
  spec.n_assets = 3;
  spec.tier_counts = {{0.2, 1}, {0.5, 1}, {0.8, 1}};
  spec.total_asset_value = 2.4e6;
  spec.n_long = 1;
  spec.n_short = 1;
  spec.long_exposure_total = 3e5;
  spec.short_exposure_total = 2e5;
  config.generator = spec;
  config.bit_width = 3;
  config.sweeps = 200;
  config.reads = 8;
  config.seed = 12;
  config.out_dir = dir.string();

  const ExperimentResult result = run_experiment(config);
  REQUIRE(result.rows.size() == 3);  // lp + balanced + unbalanced
  CHECK(result.rows[0].encoding == "lp");
  CHECK(result.rows[1].encoding == "balanced");
  CHECK(result.rows[2].encoding == "unbalanced");
  for (const auto& name :
       {"instance.json", "summary.csv", "allocation_lp.csv", "exposure_lp.csv",
        "allocation_balanced.csv", "exposure_balanced.csv",
        "samples_balanced.csv", "samples_balanced.meta.json",
        "allocation_unbalanced.csv", "exposure_unbalanced.csv"})
    CHECK(fs::exists(dir / name));

  // Round trip: coverage recomputed from the emitted allocation CSV matches
  // the emitted exposure CSV.
  const CollateralInstance instance = read_instance((dir / "instance.json").string());
  for (const std::string name : {"balanced", "unbalanced"}) {
    const Matrix q = parse_allocation_csv(
        read_text_file((dir / ("allocation_" + name + ".csv")).string()), 3, 2);
    const FeasibilityReport report =
        evaluate_allocation(AllocationMatrix(q), instance, config.epsilon);
    const std::string exposure =
        read_text_file((dir / ("exposure_" + name + ".csv")).string());
    std::istringstream in(exposure);
    std::string line;
    std::getline(in, line);
    CHECK(line == "account_id,required_usd,posted_usd,coverage_pct");
    for (std::size_t j = 0; j < 2; ++j) {
      REQUIRE(std::getline(in, line));
      const auto last_comma = line.rfind(',');
      const double coverage_pct = std::stod(line.substr(last_comma + 1));
      CHECK(coverage_pct ==
            doctest::Approx(100.0 * report.exposure_coverage[j]).epsilon(1e-9));
    }
  }

  // LP-only mode emits exactly the LP row.
  ExperimentConfig lp_only = config;
  lp_only.encoding = EncodingChoice::lp_only;
  lp_only.out_dir = fresh_dir("lponly").string();
  const ExperimentResult lp_result = run_experiment(lp_only);
  REQUIRE(lp_result.rows.size() == 1);
  CHECK(lp_result.rows[0].encoding == "lp");
  for (double coverage : lp_result.lp_report.exposure_coverage)
    CHECK(coverage >= 1.0 - 1e-5);
}

TEST_CASE("experiment bundles are deterministic up to runtimes") {
  ExperimentConfig config;
  GeneratorSpec spec;
  spec.n_assets = 2;
  spec.tier_counts = {{0.2, 1}, {0.8, 1}};
  spec.total_asset_value = 1.6e6;
  spec.n_long = 1;
  spec.n_short = 1;
  spec.long_exposure_total = 2e5;
  spec.short_exposure_total = 1e5;
  config.generator = spec;
  config.bit_width = 3;
  config.sweeps = 150;
  config.reads = 6;
  config.seed = 4;

  std::vector<std::string> bundles;
  for (int run = 0; run < 3; ++run) {
    const fs::path dir = fresh_dir("det" + std::to_string(run));
    config.out_dir = dir.string();
    config.workers = run == 2 ? 4 : 1;
    run_experiment(config);
    std::string combined;
    for (const auto& name :
         {"instance.json", "allocation_balanced.csv", "allocation_unbalanced.csv",
          "samples_balanced.csv", "samples_unbalanced.csv"})
      combined += read_text_file((dir / name).string());
    combined += mask_runtime_column(read_text_file((dir / "summary.csv").string()));
    bundles.push_back(std::move(combined));
  }
  CHECK(bundles[0] == bundles[1]);
  CHECK(bundles[0] == bundles[2]);
}

TEST_CASE("summary and kp csv formats") {
  ExperimentRow row;
  row.encoding = "balanced";
  row.backend_profile = "sampler";
  row.seed = 3;
  row.objective = 0.5;
  row.lp_objective = 0.25;
  row.gap = 0.25;
  row.feasible = true;
  row.max_exposure_shortfall_pct = 1.5;
  row.runtime_ms = 12;
  const std::string csv = summary_csv({row});
  CHECK(csv ==
        "encoding,backend_profile,seed,objective,lp_objective,gap,feasible,"
        "max_exposure_shortfall_pct,runtime_ms\n"
        "balanced,sampler,3,0.5,0.25,0.25,true,1.5,12\n");

  KpDemoResult demo;
  demo.exact_value = 309;
  demo.exact_weight = 165;
  demo.rows.push_back({"log", "lambda0=1", 309, 165, true, 40});
  CHECK(kp_demo_csv(demo).find("log,lambda0=1,309,165,309,true,40") !=
        std::string::npos);
}

TEST_CASE("cli exit codes") {
  const char* cli = std::getenv("COLLOPT_CLI");
  REQUIRE(cli != nullptr);
  const fs::path dir = fresh_dir("cli");
  const std::string base = std::string(cli);

  auto run = [&](const std::string& args) {
    const int raw = std::system((base + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };

  const std::string instance_path = (dir / "instance.json").string();
  CHECK(run("generate --seed 5 --out " + instance_path) == 0);
  CHECK(run("solve-lp --instance " + instance_path) == 0);
  CHECK(run("encode --instance " + instance_path + " --encoding unbalanced --bits 3 --out " +
            (dir / "qubo.json").string()) == 0);
  CHECK(run("anneal --qubo " + (dir / "qubo.json").string() +
            " --sweeps 50 --reads 4 --out " + (dir / "samples.csv").string()) == 0);
  CHECK(fs::exists(dir / "samples.csv.meta.json"));

  // Missing input file -> I/O error.
  CHECK(run("solve-lp --instance " + (dir / "nope.json").string()) == 4);
  // Malformed document -> config error.
  write_text_file((dir / "broken.json").string(), "{not json");
  CHECK(run("solve-lp --instance " + (dir / "broken.json").string()) == 2);
  // Infeasible LP -> exit 3.
  const auto starving = oracles::tiny_instance(10.0, 1.0, 0.2, 1e9, 0);
  write_instance((dir / "starving.json").string(), starving);
  CHECK(run("solve-lp --instance " + (dir / "starving.json").string()) == 3);
  CHECK(run("run --instance " + (dir / "starving.json").string() + " --out " +
            (dir / "out").string()) == 3);
}
