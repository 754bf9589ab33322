#pragma once

#include <string>

#include <json.hpp>

namespace relayopt {

/// Renders a result document (the CLI's JSON export) as a standalone SVG:
/// node hull, source and destination markers, the relay marker, and the
/// source/relay coverage circles when the record carries their reaches.
std::string render_result_svg(const nlohmann::json& result);

}  // namespace relayopt
