#pragma once

#include "relayopt/flow.hpp"
#include "relayopt/scenario.hpp"

namespace relayopt {

struct GridSpec {
  int resolution = 300;  // grid points per axis, at least 8
  int refinement = 2;    // local golden-section passes around the winner
};

struct GridSearchResult {
  geom::Point point;
  double value = 0.0;
  double slack = 0.0;      // published optimality tolerance for this grid
  double lipschitz = 0.0;  // sampled finite-difference rate backing the slack
};

/// Brute-force relay sweep over the node hull, maximizing the fixed-position
/// multicast flow. Ties keep the lowest grid index.
GridSearchResult grid_best_position(const Scenario& scenario, GridSpec grid = {});

/// Same sweep, minimizing the total power that sustains `target_flow`.
/// Positions that cannot carry the flow are skipped.
GridSearchResult grid_best_position(const Scenario& scenario, double target_flow,
                                    GridSpec grid = {});

struct PathFlowEnumeration {
  double best_flow = 0.0;     // best flow over the quantized power splits
  double refined_flow = 0.0;  // after continuous re-optimization of the winner
  int support_size = 0;       // paths still carrying flow after pruning
  double slack = 0.0;         // quantization bound: 2 * max path min-cut / levels
  int levels = 0;             // quantization actually used
};

/// Exhaustive power-split enumeration across every spanning path. Needs a
/// fixed relay; refuses more than 6 paths. `levels` 0 picks the finest grid
/// that stays tractable.
PathFlowEnumeration enumerate_path_flows(const Scenario& scenario, int levels = 0);

}  // namespace relayopt
