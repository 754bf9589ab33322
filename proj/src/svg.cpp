#include "relayopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "relayopt/errors.hpp"
#include "relayopt/geometry.hpp"

namespace relayopt {

namespace {

using geom::Point;
using nlohmann::json;

Point read_point(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorCode::invalid_scenario, "result document: malformed point");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string render_result_svg(const json& result) {
  if (!result.is_object() || !result.contains("scenario"))
    throw Error(ErrorCode::invalid_scenario, "result document: missing scenario");
  const json& sc = result["scenario"];
  Point source = read_point(sc.at("source"));
  std::vector<Point> dests;
  for (const auto& d : sc.at("destinations")) dests.push_back(read_point(d));
  if (dests.empty()) throw Error(ErrorCode::invalid_scenario, "result document: no destinations");

  std::vector<Point> relays;
  if (result.contains("relay"))
    relays.push_back(read_point(result["relay"]));
  else if (sc.contains("fixed_relay") && !sc["fixed_relay"].is_null())
    relays.push_back(read_point(sc["fixed_relay"]));

  double pi_s = result.value("pi_s", 0.0);
  double pi_r = result.value("pi_r", 0.0);
  if (pi_s == 0.0 && result.contains("flow") && result["flow"].contains("allocations")) {
    for (const auto& a : result["flow"]["allocations"]) {
      pi_s = std::max(pi_s, a["path"]["source_arc"]["reach"].get<double>());
      if (!a["path"]["relay_arc"].is_null())
        pi_r = std::max(pi_r, a["path"]["relay_arc"]["reach"].get<double>());
    }
  }

  std::vector<Point> nodes{source};
  nodes.insert(nodes.end(), dests.begin(), dests.end());
  geom::ConvexPolygon hull = geom::convex_hull(nodes);
  for (const Point& r : relays) nodes.push_back(r);

  double min_x = source.x - pi_s, max_x = source.x + pi_s;
  double min_y = source.y - pi_s, max_y = source.y + pi_s;
  for (const Point& p : nodes) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  if (!relays.empty() && pi_r > 0.0) {
    min_x = std::min(min_x, relays[0].x - pi_r);
    max_x = std::max(max_x, relays[0].x + pi_r);
    min_y = std::min(min_y, relays[0].y - pi_r);
    max_y = std::max(max_y, relays[0].y + pi_r);
  }
  double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
  double margin = 0.08 * span;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;

  const double width = 640.0;
  double scale = width / (max_x - min_x);
  double height = (max_y - min_y) * scale;
  auto X = [&](double x) { return (x - min_x) * scale; };
  auto Y = [&](double y) { return height - (y - min_y) * scale; };  // flip: svg y points down
  double mark = std::max(3.5, 0.012 * width);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  if (!hull.degenerate()) {
    out << "  <polygon points=\"";
    for (size_t i = 0; i < hull.vertices().size(); ++i) {
      const Point& v = hull.vertices()[i];
      out << (i ? " " : "") << fmt(X(v.x)) << "," << fmt(Y(v.y));
    }
    out << "\" fill=\"#f3f6fa\" stroke=\"#8ea0b5\" stroke-width=\"1\"/>\n";
  } else {
    const auto& v = hull.vertices();
    out << "  <line x1=\"" << fmt(X(v.front().x)) << "\" y1=\"" << fmt(Y(v.front().y))
        << "\" x2=\"" << fmt(X(v.back().x)) << "\" y2=\"" << fmt(Y(v.back().y))
        << "\" stroke=\"#8ea0b5\" stroke-width=\"1\"/>\n";
  }

  if (pi_s > 0.0)
    out << "  <circle cx=\"" << fmt(X(source.x)) << "\" cy=\"" << fmt(Y(source.y)) << "\" r=\""
        << fmt(pi_s * scale)
        << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-dasharray=\"6 4\" stroke-width=\"1.4\"/>\n";
  if (!relays.empty() && pi_r > 0.0)
    out << "  <circle cx=\"" << fmt(X(relays[0].x)) << "\" cy=\"" << fmt(Y(relays[0].y))
        << "\" r=\"" << fmt(pi_r * scale)
        << "\" fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"3 3\" stroke-width=\"1.4\"/>\n";

  out << "  <rect x=\"" << fmt(X(source.x) - mark) << "\" y=\"" << fmt(Y(source.y) - mark)
      << "\" width=\"" << fmt(2 * mark) << "\" height=\"" << fmt(2 * mark)
      << "\" fill=\"#1f77b4\"/>\n";
  out << "  <text x=\"" << fmt(X(source.x) + 1.6 * mark) << "\" y=\"" << fmt(Y(source.y) - 1.0 * mark)
      << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#1f77b4\">s</text>\n";

  for (size_t i = 0; i < dests.size(); ++i) {
    out << "  <circle cx=\"" << fmt(X(dests[i].x)) << "\" cy=\"" << fmt(Y(dests[i].y)) << "\" r=\""
        << fmt(mark) << "\" fill=\"#2ca02c\"/>\n";
    out << "  <text x=\"" << fmt(X(dests[i].x) + 1.6 * mark) << "\" y=\""
        << fmt(Y(dests[i].y) - 1.0 * mark)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#2ca02c\">t" << (i + 1)
        << "</text>\n";
  }

  for (const Point& r : relays) {
    double m = 1.3 * mark;
    out << "  <polygon points=\"" << fmt(X(r.x)) << "," << fmt(Y(r.y) - m) << " "
        << fmt(X(r.x) + m) << "," << fmt(Y(r.y)) << " " << fmt(X(r.x)) << "," << fmt(Y(r.y) + m)
        << " " << fmt(X(r.x) - m) << "," << fmt(Y(r.y)) << "\" fill=\"#d62728\"/>\n";
    out << "  <text x=\"" << fmt(X(r.x) + 1.6 * mark) << "\" y=\"" << fmt(Y(r.y) + 2.2 * mark)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#d62728\">r</text>\n";
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace relayopt
