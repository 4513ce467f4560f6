#include "collopt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "collopt/errors.hpp"

namespace collopt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, result.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("invalid JSON in " + origin);
  return doc;
}

double limit_from_json(const json& cell) {
  if (cell.is_null()) return kUnboundedLimit;
  if (!cell.is_number()) throw ConfigError("instance: limit must be number or null");
  return cell.get<double>();
}

Matrix matrix_from_json(const json& rows, std::size_t n, std::size_t m,
                        const char* what) {
  if (!rows.is_array() || rows.size() != n)
    throw ConfigError(std::string("instance: bad ") + what + " row count");
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != m)
      throw ConfigError(std::string("instance: bad ") + what + " column count");
    for (std::size_t j = 0; j < m; ++j) out(i, j) = row[j].get<double>();
  }
  return out;
}

}  // namespace

ordered_json instance_to_json(const CollateralInstance& instance) {
  ordered_json doc;
  doc["assets"] = ordered_json::array();
  for (const auto& a : instance.assets)
    doc["assets"].push_back({{"quantity", a.quantity},
                             {"unit_value", a.unit_value},
                             {"tier", a.tier}});
  doc["accounts"] = ordered_json::array();
  for (const auto& a : instance.accounts)
    doc["accounts"].push_back({{"exposure", a.exposure}, {"duration", a.duration}});

  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();
  doc["haircut"] = ordered_json::array();
  doc["limits"] = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    ordered_json hrow = ordered_json::array();
    ordered_json lrow = ordered_json::array();
    for (std::size_t j = 0; j < m; ++j) {
      hrow.push_back(instance.haircut(i, j));
      if (instance.limits(i, j) == kUnboundedLimit)
        lrow.push_back(nullptr);
      else
        lrow.push_back(instance.limits(i, j));
    }
    doc["haircut"].push_back(std::move(hrow));
    doc["limits"].push_back(std::move(lrow));
  }

  if (instance.groups) {
    const std::size_t g = instance.n_groups();
    ordered_json membership = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      ordered_json row = ordered_json::array();
      for (std::size_t k = 0; k < g; ++k)
        row.push_back(static_cast<int>(instance.groups->membership(i, k)));
      membership.push_back(std::move(row));
    }
    ordered_json caps = ordered_json::array();
    for (std::size_t k = 0; k < g; ++k) {
      ordered_json row = ordered_json::array();
      for (std::size_t j = 0; j < m; ++j)
        row.push_back(instance.groups->caps(k, j));
      caps.push_back(std::move(row));
    }
    doc["groups"] = {{"membership", std::move(membership)},
                     {"caps", std::move(caps)}};
  }
  return doc;
}

CollateralInstance instance_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("assets") || !doc.contains("accounts"))
    throw ConfigError("instance: missing assets/accounts");
  CollateralInstance instance;
  for (const json& a : doc.at("assets"))
    instance.assets.push_back({a.at("quantity").get<double>(),
                               a.at("unit_value").get<double>(),
                               a.at("tier").get<double>()});
  for (const json& a : doc.at("accounts"))
    instance.accounts.push_back(
        {a.at("exposure").get<double>(), a.at("duration").get<int>()});

  const std::size_t n = instance.n_assets();
  const std::size_t m = instance.n_accounts();
  instance.haircut = matrix_from_json(doc.at("haircut"), n, m, "haircut");

  const json& limits = doc.at("limits");
  if (!limits.is_array() || limits.size() != n)
    throw ConfigError("instance: bad limits row count");
  instance.limits = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (!limits[i].is_array() || limits[i].size() != m)
      throw ConfigError("instance: bad limits column count");
    for (std::size_t j = 0; j < m; ++j)
      instance.limits(i, j) = limit_from_json(limits[i][j]);
  }

  if (doc.contains("groups") && !doc.at("groups").is_null()) {
    const json& groups = doc.at("groups");
    AssetGroups g;
    const json& membership = groups.at("membership");
    const std::size_t g_count = membership.empty() ? 0 : membership[0].size();
    g.membership = matrix_from_json(membership, n, g_count, "membership");
    g.caps = matrix_from_json(groups.at("caps"), g_count, m, "caps");
    instance.groups = std::move(g);
  }

  try {
    instance.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return instance;
}

CollateralInstance read_instance(const std::string& path) {
  return instance_from_json(parse_json(read_text_file(path), path));
}

void write_instance(const std::string& path, const CollateralInstance& instance) {
  write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

namespace {

ordered_json layout_to_json(const VariableLayout& layout) {
  ordered_json doc;
  doc["total"] = layout.total;
  doc["decision"] = ordered_json::array();
  for (const auto& d : layout.decision)
    doc["decision"].push_back({{"asset", d.asset},
                               {"account", d.account},
                               {"bits", d.indices},
                               {"weights", d.weights}});
  doc["slack"] = ordered_json::array();
  for (const auto& s : layout.slack)
    doc["slack"].push_back(
        {{"id", s.id}, {"bits", s.indices}, {"weights", s.weights}});
  return doc;
}

VariableLayout layout_from_json(const json& doc) {
  VariableLayout layout;
  layout.total = doc.at("total").get<std::size_t>();
  for (const json& d : doc.at("decision")) {
    DecisionBits bits;
    bits.asset = d.at("asset").get<std::size_t>();
    bits.account = d.at("account").get<std::size_t>();
    bits.indices = d.at("bits").get<std::vector<std::size_t>>();
    bits.weights = d.at("weights").get<std::vector<double>>();
    layout.decision.push_back(std::move(bits));
  }
  for (const json& s : doc.at("slack")) {
    SlackBits bits;
    bits.id = s.at("id").get<std::string>();
    bits.indices = s.at("bits").get<std::vector<std::size_t>>();
    bits.weights = s.at("weights").get<std::vector<double>>();
    layout.slack.push_back(std::move(bits));
  }
  return layout;
}

}  // namespace

ordered_json qubo_to_json(const QuboModel& model) {
  ordered_json doc;
  doc["n"] = model.dimension;
  doc["linear"] = model.linear;
  ordered_json quadratic = ordered_json::array();
  for (const auto& [key, value] : model.quadratic)
    quadratic.push_back({key.first, key.second, value});
  doc["quadratic"] = std::move(quadratic);
  doc["offset"] = model.offset;
  doc["layout"] = layout_to_json(model.layout);
  if (!model.warnings.empty()) doc["warnings"] = model.warnings;
  return doc;
}

QuboModel qubo_from_json(const json& doc) {
  QuboModel model;
  model.dimension = doc.at("n").get<std::size_t>();
  model.linear = doc.at("linear").get<std::vector<double>>();
  for (const json& entry : doc.at("quadratic")) {
    if (!entry.is_array() || entry.size() != 3)
      throw ConfigError("qubo: quadratic entries must be [i, j, value]");
    model.quadratic[{entry[0].get<std::size_t>(), entry[1].get<std::size_t>()}] =
        entry[2].get<double>();
  }
  model.offset = doc.at("offset").get<double>();
  if (doc.contains("layout")) model.layout = layout_from_json(doc.at("layout"));
  if (doc.contains("warnings"))
    model.warnings = doc.at("warnings").get<std::vector<std::string>>();
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return model;
}

QuboModel read_qubo(const std::string& path) {
  return qubo_from_json(parse_json(read_text_file(path), path));
}

void write_qubo(const std::string& path, const QuboModel& model) {
  write_text_file(path, qubo_to_json(model).dump() + "\n");
}

ordered_json schedule_to_json(const Schedule& schedule) {
  return {{"kind", schedule.kind == ScheduleKind::geometric ? "geometric" : "linear"},
          {"t_initial", schedule.t_initial},
          {"t_final", schedule.t_final},
          {"sweeps", schedule.sweeps},
          {"reads", schedule.reads},
          {"seed", schedule.seed}};
}

Schedule schedule_from_json(const json& doc, Schedule defaults) {
  Schedule schedule = defaults;
  if (doc.contains("kind")) {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "geometric")
      schedule.kind = ScheduleKind::geometric;
    else if (kind == "linear")
      schedule.kind = ScheduleKind::linear;
    else
      throw ConfigError("schedule: unknown kind " + kind);
  }
  if (doc.contains("t_initial")) schedule.t_initial = doc.at("t_initial").get<double>();
  if (doc.contains("t_final")) schedule.t_final = doc.at("t_final").get<double>();
  if (doc.contains("sweeps")) schedule.sweeps = doc.at("sweeps").get<std::size_t>();
  if (doc.contains("reads")) schedule.reads = doc.at("reads").get<std::size_t>();
  if (doc.contains("seed")) schedule.seed = doc.at("seed").get<std::uint64_t>();
  return schedule;
}

std::string sample_set_csv(const SampleSet& set) {
  std::string out = "rank,energy,multiplicity,bitstring\n";
  std::size_t rank = 0;
  for (const auto& sample : set.samples) {
    out += std::to_string(rank++) + "," + format_double(sample.energy) + "," +
           std::to_string(sample.multiplicity) + "," +
           bits_to_string(sample.bits) + "\n";
  }
  return out;
}

ordered_json sample_set_metadata(const SampleSet& set) {
  return {{"schedule", schedule_to_json(set.schedule)},
          {"seed", set.schedule.seed},
          {"model_hash", set.model_hash},
          {"samples", set.samples.size()}};
}

std::string allocation_csv(const AllocationMatrix& allocation) {
  std::string out = "asset_id";
  for (std::size_t j = 0; j < allocation.cols(); ++j)
    out += ",account_" + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < allocation.rows(); ++i) {
    out += std::to_string(i);
    for (std::size_t j = 0; j < allocation.cols(); ++j)
      out += "," + format_double(allocation(i, j));
    out += "\n";
  }
  return out;
}

std::string exposure_csv(const AllocationMatrix& allocation,
                         const CollateralInstance& instance) {
  std::string out = "account_id,required_usd,posted_usd,coverage_pct\n";
  for (std::size_t j = 0; j < instance.n_accounts(); ++j) {
    double posted = 0.0;
    for (std::size_t i = 0; i < instance.n_assets(); ++i)
      posted += allocation(i, j) * instance.assets[i].quantity *
                instance.assets[i].unit_value * instance.haircut(i, j);
    const double required = instance.accounts[j].exposure;
    const double coverage = required > 0.0 ? posted / required : 1.0;
    out += std::to_string(j) + "," + format_double(required) + "," +
           format_double(posted) + "," + format_double(100.0 * coverage) + "\n";
  }
  return out;
}

}  // namespace collopt
