#pragma once

#include <string>

#include "json.hpp"

#include "collopt/allocation.hpp"
#include "collopt/anneal.hpp"
#include "collopt/instances.hpp"
#include "collopt/qubo.hpp"

namespace collopt {

/// Shortest round-trip decimal form; locale independent, so emitted files
/// are byte-stable.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Instance document: {assets, accounts, haircut, limits, groups?};
// a null limit entry means unbounded.
nlohmann::ordered_json instance_to_json(const CollateralInstance& instance);
CollateralInstance instance_from_json(const nlohmann::json& doc);
CollateralInstance read_instance(const std::string& path);
void write_instance(const std::string& path, const CollateralInstance& instance);

// QUBO document: {n, linear, quadratic: [[i, j, value]...], offset, layout}
// with fixed key order and row-major quadratic entries.
nlohmann::ordered_json qubo_to_json(const QuboModel& model);
QuboModel qubo_from_json(const nlohmann::json& doc);
QuboModel read_qubo(const std::string& path);
void write_qubo(const std::string& path, const QuboModel& model);

nlohmann::ordered_json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& doc, Schedule defaults = {});

/// CSV rows `rank,energy,multiplicity,bitstring`, best first.
std::string sample_set_csv(const SampleSet& set);
/// Sidecar document: schedule, seed and model hash.
nlohmann::ordered_json sample_set_metadata(const SampleSet& set);

/// Rows = assets, columns = accounts.
std::string allocation_csv(const AllocationMatrix& allocation);
/// CSV rows `account_id,required_usd,posted_usd,coverage_pct`.
std::string exposure_csv(const AllocationMatrix& allocation,
                         const CollateralInstance& instance);

}  // namespace collopt
