#include "relayopt/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "relayopt/errors.hpp"
#include "relayopt/hypergraph.hpp"

namespace relayopt {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::invalid_scenario, "scenario field '" + path + "': " + why);
}

double need_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "expected a number");
  return j.get<double>();
}

geom::Point need_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad_field(path, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

RateModel model_from_json(const json& j) {
  if (!j.is_object()) bad_field("model", "expected an object");
  if (!j.contains("type") || !j["type"].is_string()) bad_field("model.type", "expected a string");
  std::string type = j["type"].get<std::string>();
  if (type == "low_snr") {
    if (!j.contains("n0")) bad_field("model.n0", "missing");
    if (!j.contains("alpha")) bad_field("model.alpha", "missing");
    return RateModel::low_snr(need_number(j["n0"], "model.n0"),
                              need_number(j["alpha"], "model.alpha"));
  }
  if (type == "power_law") {
    if (!j.contains("g_exp")) bad_field("model.g_exp", "missing");
    if (!j.contains("h_exp")) bad_field("model.h_exp", "missing");
    double scale = j.contains("h_scale") ? need_number(j["h_scale"], "model.h_scale") : 1.0;
    return RateModel::power_law(need_number(j["g_exp"], "model.g_exp"),
                                need_number(j["h_exp"], "model.h_exp"), scale);
  }
  bad_field("model.type", "unknown type '" + type + "'");
}

json model_to_json(const RateModel& m) {
  json j;
  switch (m.kind()) {
    case ModelKind::low_snr:
      j["type"] = "low_snr";
      j["n0"] = m.parameters()[0];
      j["alpha"] = m.parameters()[1];
      break;
    case ModelKind::power_law:
      j["type"] = "power_law";
      j["g_exp"] = m.parameters()[0];
      j["h_exp"] = m.parameters()[1];
      j["h_scale"] = m.parameters()[2];
      break;
    case ModelKind::custom:
      j["type"] = "custom";
      j["name"] = m.descriptor();
      break;
  }
  return j;
}

json point_to_json(geom::Point p) { return json::array({p.x, p.y}); }

json arc_to_json(const Hyperarc& arc) {
  json ends = json::array();
  for (const NodeId& id : arc.end_nodes) ends.push_back(node_name(id));
  return json{{"transmitter", node_name(arc.transmitter)},
              {"end_nodes", ends},
              {"reach", arc.reach},
              {"lambda", arc.lambda}};
}

void flatten(const json& j, const std::string& prefix, std::vector<std::string>& keys,
             std::vector<std::string>& vals) {
  auto join = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), join(it.key()), keys, vals);
  } else if (j.is_array()) {
    int i = 0;
    for (const auto& el : j) flatten(el, join(std::to_string(i++)), keys, vals);
  } else {
    keys.push_back(prefix);
    if (j.is_number_float()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      vals.emplace_back(buf);
    } else if (j.is_string()) {
      std::string s = j.get<std::string>();
      for (char& c : s)
        if (c == ',' || c == '\n') c = ' ';
      vals.push_back(s);
    } else {
      vals.push_back(j.dump());
    }
  }
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) bad_field("", "scenario document must be an object");
  if (!doc.contains("version") || !doc["version"].is_number_integer())
    bad_field("version", "expected an integer");
  if (doc["version"].get<int>() != 1) bad_field("version", "only version 1 is supported");
  if (!doc.contains("source")) bad_field("source", "missing");
  geom::Point source = need_point(doc["source"], "source");
  if (!doc.contains("destinations") || !doc["destinations"].is_array() ||
      doc["destinations"].empty())
    bad_field("destinations", "expected a non-empty array of [x, y]");
  std::vector<geom::Point> dests;
  for (size_t i = 0; i < doc["destinations"].size(); ++i)
    dests.push_back(need_point(doc["destinations"][i], "destinations." + std::to_string(i)));
  if (!doc.contains("mu")) bad_field("mu", "missing");
  double mu = need_number(doc["mu"], "mu");
  if (!(mu > 0.0)) bad_field("mu", "must be positive");
  if (!doc.contains("nu")) bad_field("nu", "missing");
  double nu = need_number(doc["nu"], "nu");
  if (!(nu > 0.0)) bad_field("nu", "must be positive");
  if (!doc.contains("model")) bad_field("model", "missing");
  RateModel model = model_from_json(doc["model"]);
  std::optional<geom::Point> relay;
  if (doc.contains("fixed_relay") && !doc["fixed_relay"].is_null())
    relay = need_point(doc["fixed_relay"], "fixed_relay");
  return Scenario::make(source, std::move(dests), mu, nu, std::move(model), relay);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_scenario, "cannot open scenario file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_scenario, std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["version"] = 1;
  j["source"] = point_to_json(sc.source());
  json dests = json::array();
  for (const geom::Point& t : sc.destinations()) dests.push_back(point_to_json(t));
  j["destinations"] = dests;
  j["mu"] = sc.mu();
  j["nu"] = sc.nu();
  j["model"] = model_to_json(sc.model());
  if (sc.relay()) j["fixed_relay"] = point_to_json(*sc.relay());
  return j;
}

std::string scenario_hash(const Scenario& sc) {
  std::string canon = scenario_to_json(sc).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json flow_to_json(const FlowSolution& sol) {
  json allocs = json::array();
  for (const PathAllocation& a : sol.allocations) {
    json p;
    p["source_arc"] = arc_to_json(a.path.source_arc);
    p["relay_arc"] = a.path.two_hop() ? arc_to_json(*a.path.relay_arc) : json();
    allocs.push_back(json{{"path", p},
                          {"flow", a.flow},
                          {"source_power", a.source_power},
                          {"relay_power", a.relay_power}});
  }
  return json{{"total_flow", sol.total_flow},
              {"allocations", allocs},
              {"residual_mu", sol.residual_mu},
              {"residual_nu", sol.residual_nu},
              {"total_power", sol.total_power()}};
}

json placement_to_json(const PlacementResult& res) {
  json j;
  j["relay"] = point_to_json(res.relay);
  j["objective"] = res.objective;
  j["branch"] = branch_name(res.branch);
  j["ring_index"] = res.ring_index;
  j["pi_s"] = res.pi_s;
  j["pi_r"] = res.pi_r;
  j["source_power"] = res.source_power;
  j["relay_power"] = res.relay_power;
  j["heuristic_flag"] = res.heuristic_flag;
  j["diagnostics"] = res.diagnostics;
  j["flow"] = flow_to_json(res.flow);
  return j;
}

std::string result_to_csv(const json& result) {
  std::vector<std::string> keys, vals;
  flatten(result, "", keys, vals);
  std::ostringstream out;
  for (size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
  out << "\n";
  for (size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
  out << "\n";
  return out.str();
}

}  // namespace relayopt
