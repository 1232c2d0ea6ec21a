#pragma once

#include "seqrar/core.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace seqrar {

// Thrown on malformed scenario/interim files; message names the bad field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

// A scenario file is either a single scenario object or a batch:
//   {"scenario_id": ..., "base": {...}, "rows": [{section overrides}, ...]}
// Row objects replace whole top-level sections of the base scenario.
struct ScenarioBatch {
    std::string id;
    std::vector<Scenario> rows;
};

ScenarioBatch load_scenario_file(const std::string& path);
ScenarioBatch scenario_batch_from_json(const nlohmann::json& j);

// One CSV row per configuration; deterministic body, no timestamps.
struct RowResult {
    Scenario scenario;
    AggregateReport report;
};

std::string report_csv(const std::vector<RowResult>& rows);
nlohmann::json report_to_json(const RowResult& row);

// Report name for the spending column: explicit label, else the kind name.
std::string spending_name(const SpendingFunction& fn);

bool operator==(const ArmParams& a, const ArmParams& b);
bool operator==(const Scenario& a, const Scenario& b);

} // namespace seqrar
