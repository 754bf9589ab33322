#include "relayopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relayopt/errors.hpp"
#include "relayopt/tolerance.hpp"

namespace relayopt {

namespace {

geom::ConvexPolygon build_hull(geom::Point source, const std::vector<geom::Point>& dests) {
  std::vector<geom::Point> pts;
  pts.reserve(dests.size() + 1);
  pts.push_back(source);
  pts.insert(pts.end(), dests.begin(), dests.end());
  return geom::convex_hull(pts);
}

void check_finite(geom::Point p, const char* what) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw Error(ErrorCode::invalid_scenario, std::string(what) + " has a non-finite coordinate");
}

}  // namespace

Scenario::Scenario(geom::Point source, std::vector<geom::Point> destinations,
                   std::vector<int> order, double mu, double nu, RateModel model,
                   std::optional<geom::Point> relay)
    : source_(source),
      destinations_(std::move(destinations)),
      input_order_(std::move(order)),
      mu_(mu),
      nu_(nu),
      model_(std::move(model)),
      relay_(relay),
      hull_(build_hull(source, destinations_)) {}

Scenario Scenario::make(geom::Point source, std::vector<geom::Point> destinations,
                        double source_power, double relay_power, RateModel model,
                        std::optional<geom::Point> relay) {
  if (destinations.empty())
    throw Error(ErrorCode::invalid_scenario, "scenario needs at least one destination");
  if (!(source_power > 0.0))
    throw Error(ErrorCode::invalid_scenario, "source power budget must be positive");
  if (!(relay_power >= 0.0) || !std::isfinite(relay_power))
    throw Error(ErrorCode::invalid_scenario, "relay power budget must be non-negative");
  check_finite(source, "source");
  for (const geom::Point& d : destinations) check_finite(d, "destination");
  if (relay) check_finite(*relay, "relay");

  std::vector<int> order(destinations.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return geom::distance(source, destinations[static_cast<size_t>(a)]) <
           geom::distance(source, destinations[static_cast<size_t>(b)]);
  });
  std::vector<geom::Point> sorted;
  sorted.reserve(destinations.size());
  for (int i : order) sorted.push_back(destinations[static_cast<size_t>(i)]);

  for (const geom::Point& d : sorted)
    if (geom::points_coincide(source, d, kEpsGeo))
      throw Error(ErrorCode::degenerate_geometry, "destination coincides with the source");
  for (size_t i = 0; i + 1 < sorted.size(); ++i)
    for (size_t j = i + 1; j < sorted.size(); ++j)
      if (geom::points_coincide(sorted[i], sorted[j], kEpsGeo))
        throw Error(ErrorCode::degenerate_geometry, "two destinations coincide");
  if (relay) {
    if (geom::points_coincide(source, *relay, kEpsGeo))
      throw Error(ErrorCode::degenerate_geometry, "relay coincides with the source");
    for (const geom::Point& d : sorted)
      if (geom::points_coincide(d, *relay, kEpsGeo))
        throw Error(ErrorCode::degenerate_geometry, "relay coincides with a destination");
  }

  return Scenario(source, std::move(sorted), std::move(order), source_power, relay_power,
                  std::move(model), relay);
}

Scenario Scenario::with_relay(geom::Point relay) const {
  check_finite(relay, "relay");
  if (geom::points_coincide(source_, relay, kEpsGeo))
    throw Error(ErrorCode::degenerate_geometry, "relay coincides with the source");
  for (const geom::Point& d : destinations_)
    if (geom::points_coincide(d, relay, kEpsGeo))
      throw Error(ErrorCode::degenerate_geometry, "relay coincides with a destination");
  Scenario s(*this);
  s.relay_ = relay;
  return s;
}

Scenario Scenario::with_powers(double source_power, double relay_power) const {
  if (!(source_power > 0.0))
    throw Error(ErrorCode::invalid_scenario, "source power budget must be positive");
  if (!(relay_power >= 0.0) || !std::isfinite(relay_power))
    throw Error(ErrorCode::invalid_scenario, "relay power budget must be non-negative");
  Scenario s(*this);
  s.mu_ = source_power;
  s.nu_ = relay_power;
  return s;
}

double Scenario::source_dist(int dest_index) const {
  return geom::distance(source_, destinations_.at(static_cast<size_t>(dest_index)));
}

}  // namespace relayopt
