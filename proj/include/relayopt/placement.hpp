#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relayopt/flow.hpp"
#include "relayopt/scenario.hpp"

namespace relayopt {

enum class Branch {
  p_star,            // balanced minimax point is optimal as-is
  p_star_filtered,   // minimax point after dropping source-covered targets
  bisector_segment,  // winner came from the bisector-chain candidate sweep
  boundary_hat,      // winner is the constrained center of the far targets
  min_cost_center,   // cheapest position is the two-ring center
  min_cost_ring,     // cheapest position snaps a target onto the source ring
};

const char* branch_name(Branch b);

struct PlacementResult {
  geom::Point relay;
  double objective = 0.0;  // flow for max_flow_place, total power for min_cost_place
  Branch branch = Branch::p_star;
  int ring_index = -1;
  double pi_s = 0.0;  // source hyperarc reach backing the objective
  double pi_r = 0.0;  // relay hyperarc reach (0 when the relay is unused)
  double source_power = 0.0;
  double relay_power = 0.0;
  FlowSolution flow;
  bool heuristic_flag = false;
  std::vector<std::string> diagnostics;
};

/// Balanced minimax relay position: equalizes the relay-limited service rate
/// against the source-limited reach rate over the node hull. The value is the
/// minimax objective at the point.
geom::MinimaxResult compute_p_star(const Scenario& scenario);

/// Best relay position for maximum multicast flow.
PlacementResult max_flow_place(const Scenario& scenario);

/// Cheapest relay position sustaining `target_flow` within the budgets.
PlacementResult min_cost_place(const Scenario& scenario, double target_flow);

/// One straight run of the constrained-center locus as the coverage radius
/// grows. `bisector_pair` holds the sorted destination indices whose
/// equidistance carries the run; indices are -1 when fewer than two targets
/// pin the center.
struct RHatSegment {
  double pi_lo = 0.0;
  double pi_hi = 0.0;
  geom::Point start;
  geom::Point end;
  std::pair<int, int> bisector_pair{-1, -1};
  int sample_count = 0;
};

struct RHatCurve {
  std::vector<RHatSegment> segments;
  int samples = 0;
};

/// Samples the locus of constrained far-target centers for coverage radii
/// between 0 and the farthest target distance, grouped into straight runs.
RHatCurve trace_r_hat(const Scenario& scenario, int samples);

/// Constrained far-target center for one coverage radius.
geom::Point r_hat_point(const Scenario& scenario, double pi);

struct DualityEntry {
  double target_flow = 0.0;
  geom::Point min_cost_relay;
  double gamma_hat = 0.0;
  geom::Point max_flow_relay;
  double position_gap = 0.0;
  bool matched = false;
};

struct DualityReport {
  double gamma = 0.0;      // scenario's relay/source budget ratio
  double gamma_bar = 0.0;  // ratio whose max-flow position meets the zero-flow cost center
  bool gamma_bar_bracketed = false;
  std::vector<DualityEntry> entries;
};

/// For each target flow, finds the budget ratio whose max-flow position
/// reproduces the min-cost position.
DualityReport duality_check(const Scenario& scenario, std::span<const double> flows);

}  // namespace relayopt
