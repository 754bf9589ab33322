#include "relayopt/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relayopt/errors.hpp"
#include "relayopt/io.hpp"
#include "relayopt/oracle.hpp"
#include "relayopt/placement.hpp"
#include "relayopt/svg.hpp"

namespace relayopt {

namespace {

using nlohmann::json;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::target_infeasible:
    case ErrorCode::rate_infeasible:
      return 3;
    case ErrorCode::internal_consistency:
      return 4;
    default:
      return 2;
  }
}

json point_json(geom::Point p) { return json::array({p.x, p.y}); }

void print_placement(const PlacementResult& res) {
  std::printf("relay: (%.10g, %.10g)\n", res.relay.x, res.relay.y);
  std::printf("objective: %.10g\n", res.objective);
  std::printf("branch: %s\n", branch_name(res.branch));
  if (res.heuristic_flag) std::printf("note: heuristic result, see diagnostics\n");
  for (const std::string& d : res.diagnostics) std::printf("diagnostic: %s\n", d.c_str());
}

json scenario_envelope(const char* command, const Scenario& sc) {
  json r;
  r["command"] = command;
  r["scenario_hash"] = scenario_hash(sc);
  r["scenario"] = scenario_to_json(sc);
  r["input_order"] = sc.input_order();
  return r;
}

json generate_scenario(std::uint64_t seed, int n, double alpha, bool with_relay) {
  if (n < 1 || n > 63) throw Error(ErrorCode::invalid_scenario, "gen: n must be in [1, 63]");
  if (!(alpha >= 2.0)) throw Error(ErrorCode::invalid_scenario, "gen: alpha must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto far_enough = [](geom::Point p, const std::vector<geom::Point>& prev, double margin) {
    for (const geom::Point& q : prev)
      if (geom::distance(p, q) < margin) return false;
    return true;
  };
  std::vector<geom::Point> pts;
  while (static_cast<int>(pts.size()) < n + 1) {
    geom::Point p{unit(rng), unit(rng)};
    if (far_enough(p, pts, 0.05)) pts.push_back(p);
  }
  geom::Point source = pts.front();
  std::vector<geom::Point> dests(pts.begin() + 1, pts.end());

  json doc;
  doc["version"] = 1;
  doc["source"] = point_json(source);
  json darr = json::array();
  for (const geom::Point& d : dests) darr.push_back(point_json(d));
  doc["destinations"] = darr;
  doc["mu"] = 0.1 + 9.9 * unit(rng);
  doc["nu"] = 0.1 + 9.9 * unit(rng);
  doc["model"] = json{{"type", "low_snr"}, {"n0", 1.0}, {"alpha", alpha}};
  if (with_relay) {
    geom::ConvexPolygon hull = geom::convex_hull(pts);
    // cramped hulls may not admit a point 0.05 away from every node, so the
    // margin halves after each batch of misses
    double margin = 0.05;
    for (int attempt = 1;; ++attempt) {
      // random convex combination of hull vertices
      std::vector<double> w(hull.vertices().size());
      double tot = 0.0;
      for (double& x : w) tot += (x = -std::log(std::max(unit(rng), 1e-12)));
      geom::Point r{0.0, 0.0};
      for (size_t i = 0; i < w.size(); ++i) r = r + (w[i] / tot) * hull.vertices()[i];
      if (far_enough(r, pts, margin)) {
        doc["fixed_relay"] = point_json(r);
        break;
      }
      if (attempt % 64 == 0) margin = std::max(margin * 0.5, 1e-6);
    }
  }
  return doc;
}

struct OutputSinks {
  std::string out_path;
  std::string csv_path;
  bool no_timing = false;
};

void emit(const json& result, const OutputSinks& sinks) {
  if (!sinks.out_path.empty()) {
    std::ofstream f(sinks.out_path);
    if (!f) throw Error(ErrorCode::invalid_scenario, "cannot write " + sinks.out_path);
    f << result.dump(2) << "\n";
  }
  if (!sinks.csv_path.empty()) {
    std::ofstream f(sinks.csv_path);
    if (!f) throw Error(ErrorCode::invalid_scenario, "cannot write " + sinks.csv_path);
    f << result_to_csv(result);
  }
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"relay placement and multicast flow toolkit"};
  app.require_subcommand(1);

  OutputSinks sinks;
  std::uint64_t seed = 1;
  app.add_option("--out", sinks.out_path, "write the result JSON to this file");
  app.add_option("--csv", sinks.csv_path, "write a flattened CSV to this file");
  app.add_flag("--no-timing", sinks.no_timing, "omit timing from the result");
  app.add_option("--seed", seed, "seed for `gen`");

  std::string scenario_path, result_path, svg_path, objective = "maxflow";
  double flow = 0.0, gen_alpha = 2.0;
  int samples = 100, resolution = 300, levels = 0, gen_n = 3;
  bool with_relay = false;

  app.fallthrough();  // let global flags follow the subcommand name

  CLI::App* c_maxflow = app.add_subcommand("maxflow", "best relay position for maximum flow");
  c_maxflow->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* c_mincost = app.add_subcommand("mincost", "cheapest relay position for a target flow");
  c_mincost->add_option("scenario", scenario_path, "scenario JSON file")->required();
  c_mincost->add_option("--flow", flow, "target multicast flow")->required();

  CLI::App* c_flowat = app.add_subcommand("flow-at", "flow solution at the scenario's fixed relay");
  c_flowat->add_option("scenario", scenario_path, "scenario JSON file")->required();
  c_flowat->add_option("--flow", flow, "also price this target flow at the fixed relay");

  CLI::App* c_trace = app.add_subcommand("trace-rhat", "trace the constrained-center locus");
  c_trace->add_option("scenario", scenario_path, "scenario JSON file")->required();
  c_trace->add_option("--samples", samples, "number of coverage radii to sample");

  CLI::App* c_duality = app.add_subcommand("duality", "match min-cost positions to budget ratios");
  c_duality->add_option("scenario", scenario_path, "scenario JSON file")->required();
  std::vector<double> flows;
  c_duality->add_option("--flows", flows, "target flows")->required()->delimiter(',');

  CLI::App* c_oracle = app.add_subcommand("oracle", "brute-force verification sweeps");
  c_oracle->add_option("scenario", scenario_path, "scenario JSON file")->required();
  c_oracle->add_option("--objective", objective, "maxflow, mincost or paths")
      ->check(CLI::IsMember({"maxflow", "mincost", "paths"}));
  c_oracle->add_option("--resolution", resolution, "grid points per axis");
  c_oracle->add_option("--flow", flow, "target flow for the mincost objective");
  c_oracle->add_option("--levels", levels, "power quantization levels for paths (0 = auto)");

  CLI::App* c_render = app.add_subcommand("render", "draw a result JSON as SVG");
  c_render->add_option("result", result_path, "result JSON file")->required();
  c_render->add_option("-o,--output", svg_path, "output SVG file")->required();

  CLI::App* c_gen = app.add_subcommand("gen", "generate a random scenario");
  c_gen->add_option("--n", gen_n, "number of destinations");
  c_gen->add_option("--alpha", gen_alpha, "path loss exponent");
  c_gen->add_flag("--with-relay", with_relay, "include a random fixed relay in the hull");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto t0 = std::chrono::steady_clock::now();
    json result;

    if (c_gen->parsed()) {
      json doc = generate_scenario(seed, gen_n, gen_alpha, with_relay);
      if (!sinks.out_path.empty()) {
        std::ofstream f(sinks.out_path);
        if (!f) throw Error(ErrorCode::invalid_scenario, "cannot write " + sinks.out_path);
        f << doc.dump(2) << "\n";
        std::printf("wrote %s\n", sinks.out_path.c_str());
      } else {
        std::printf("%s\n", doc.dump(2).c_str());
      }
      return 0;
    }

    if (c_render->parsed()) {
      std::ifstream in(result_path);
      if (!in) throw Error(ErrorCode::invalid_scenario, "cannot open result file: " + result_path);
      json doc;
      try {
        in >> doc;
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::invalid_scenario, std::string("result is not valid JSON: ") + e.what());
      }
      std::ofstream out(svg_path);
      if (!out) throw Error(ErrorCode::invalid_scenario, "cannot write " + svg_path);
      out << render_result_svg(doc);
      std::printf("wrote %s\n", svg_path.c_str());
      return 0;
    }

    Scenario sc = load_scenario(scenario_path);

    if (c_maxflow->parsed()) {
      PlacementResult res = max_flow_place(sc);
      result = placement_to_json(res);
      json env = scenario_envelope("maxflow", sc);
      result.update(env);
      print_placement(res);
    } else if (c_mincost->parsed()) {
      PlacementResult res;
      try {
        res = min_cost_place(sc, flow);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::target_infeasible) {
          double best = max_flow_place(sc).objective;
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "target flow %.10g is not sustainable; the maximum is %.10g", flow, best);
          throw Error(ErrorCode::target_infeasible, std::string(buf) + " (" + e.what() + ")");
        }
        throw;
      }
      result = placement_to_json(res);
      json env = scenario_envelope("mincost", sc);
      result.update(env);
      result["target_flow"] = flow;
      print_placement(res);
    } else if (c_flowat->parsed()) {
      if (!sc.relay())
        throw Error(ErrorCode::invalid_scenario, "flow-at needs a fixed_relay in the scenario");
      FlowSolution sol = max_flow_at(sc);
      result = scenario_envelope("flow-at", sc);
      result["relay"] = point_json(*sc.relay());
      result["objective"] = sol.total_flow;
      result["flow"] = flow_to_json(sol);
      if (c_flowat->count("--flow") > 0) {
        result["target_flow"] = flow;
        result["min_cost"] = flow_to_json(min_cost_at(sc, flow));
      }
      std::printf("max flow: %.10g\n", sol.total_flow);
      std::printf("paths carrying flow: %zu\n", sol.allocations.size());
    } else if (c_trace->parsed()) {
      RHatCurve curve = trace_r_hat(sc, samples);
      result = scenario_envelope("trace-rhat", sc);
      result["samples"] = curve.samples;
      json segs = json::array();
      for (const RHatSegment& s : curve.segments)
        segs.push_back(json{{"pi_lo", s.pi_lo},
                            {"pi_hi", s.pi_hi},
                            {"start", point_json(s.start)},
                            {"end", point_json(s.end)},
                            {"bisector_pair", json::array({s.bisector_pair.first,
                                                           s.bisector_pair.second})},
                            {"sample_count", s.sample_count}});
      result["segments"] = segs;
      std::printf("segments: %zu across %d samples\n", curve.segments.size(), curve.samples);
    } else if (c_duality->parsed()) {
      DualityReport rep = duality_check(sc, flows);
      result = scenario_envelope("duality", sc);
      result["gamma"] = rep.gamma;
      result["gamma_bar"] = rep.gamma_bar;
      result["gamma_bar_bracketed"] = rep.gamma_bar_bracketed;
      json entries = json::array();
      int matched = 0;
      for (const DualityEntry& e : rep.entries) {
        entries.push_back(json{{"target_flow", e.target_flow},
                               {"min_cost_relay", point_json(e.min_cost_relay)},
                               {"gamma_hat", e.gamma_hat},
                               {"max_flow_relay", point_json(e.max_flow_relay)},
                               {"position_gap", e.position_gap},
                               {"matched", e.matched}});
        matched += e.matched ? 1 : 0;
      }
      result["entries"] = entries;
      std::printf("matched %d of %zu flows\n", matched, rep.entries.size());
    } else if (c_oracle->parsed()) {
      result = scenario_envelope("oracle", sc);
      result["objective"] = objective;
      if (objective == "paths") {
        PathFlowEnumeration e = enumerate_path_flows(sc, levels);
        result["best_flow"] = e.best_flow;
        result["refined_flow"] = e.refined_flow;
        result["support_size"] = e.support_size;
        result["slack"] = e.slack;
        result["levels"] = e.levels;
        std::printf("best flow: %.10g (refined %.10g), support %d\n", e.best_flow,
                    e.refined_flow, e.support_size);
      } else {
        GridSpec grid;
        grid.resolution = resolution;
        GridSearchResult g = objective == "mincost" ? grid_best_position(sc, flow, grid)
                                                    : grid_best_position(sc, grid);
        result["point"] = point_json(g.point);
        result["value"] = g.value;
        result["slack"] = g.slack;
        result["lipschitz"] = g.lipschitz;
        result["resolution"] = resolution;
        if (objective == "mincost") result["target_flow"] = flow;
        std::printf("best point: (%.10g, %.10g)\n", g.point.x, g.point.y);
        std::printf("value: %.10g (slack %.3g)\n", g.value, g.slack);
      }
    }

    if (!sinks.no_timing) {
      auto t1 = std::chrono::steady_clock::now();
      result["timing_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    emit(result, sinks);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", error_code_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int cli_dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("relayopt");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace relayopt
