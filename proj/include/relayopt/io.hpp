#pragma once

#include <string>

#include <json.hpp>

#include "relayopt/flow.hpp"
#include "relayopt/placement.hpp"
#include "relayopt/scenario.hpp"

namespace relayopt {

/// Reads and validates a scenario file. Schema problems raise InvalidScenario
/// naming the offending field; coincident nodes raise DegenerateGeometry.
Scenario load_scenario(const std::string& path);

/// Same, from an already-parsed document.
Scenario scenario_from_json(const nlohmann::json& doc);

/// Canonical scenario document: sorted destinations, model descriptor, the
/// fixed relay when present.
nlohmann::json scenario_to_json(const Scenario& scenario);

/// FNV-1a 64 digest of the canonical scenario document, as 16 hex chars.
std::string scenario_hash(const Scenario& scenario);

nlohmann::json flow_to_json(const FlowSolution& solution);
nlohmann::json placement_to_json(const PlacementResult& result);

/// Flattens a result document into a two-line CSV (dotted keys, then values).
/// Numbers are printed with 17 significant digits so the two exports agree.
std::string result_to_csv(const nlohmann::json& result);

}  // namespace relayopt
