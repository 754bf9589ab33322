#pragma once

#include <optional>
#include <vector>

#include "relayopt/geometry.hpp"
#include "relayopt/rate_model.hpp"

namespace relayopt {

/// One problem instance: a source, optional fixed relay, destination set and
/// power budgets. Destinations are stored sorted by distance from the source
/// (ties broken by original input order), which every downstream module
/// relies on.
class Scenario {
 public:
  static Scenario make(geom::Point source, std::vector<geom::Point> destinations, double source_power,
                       double relay_power, RateModel model,
                       std::optional<geom::Point> relay = std::nullopt);

  Scenario with_relay(geom::Point relay) const;
  Scenario with_powers(double source_power, double relay_power) const;

  geom::Point source() const { return source_; }
  const std::vector<geom::Point>& destinations() const { return destinations_; }
  /// Original input index of sorted destination i.
  const std::vector<int>& input_order() const { return input_order_; }
  double mu() const { return mu_; }
  double nu() const { return nu_; }
  const RateModel& model() const { return model_; }
  const std::optional<geom::Point>& relay() const { return relay_; }

  double source_dist(int dest_index) const;
  geom::Point farthest_destination() const { return destinations_.back(); }

  /// Convex hull of source and destinations (the admissible relay region).
  const geom::ConvexPolygon& node_hull() const { return hull_; }

 private:
  Scenario(geom::Point source, std::vector<geom::Point> destinations, std::vector<int> order,
           double mu, double nu, RateModel model, std::optional<geom::Point> relay);

  geom::Point source_;
  std::vector<geom::Point> destinations_;
  std::vector<int> input_order_;
  double mu_;
  double nu_;
  RateModel model_;
  std::optional<geom::Point> relay_;
  geom::ConvexPolygon hull_;
};

}  // namespace relayopt
