#pragma once

#include <functional>
#include <span>
#include <vector>

#include "relayopt/hypergraph.hpp"
#include "relayopt/scenario.hpp"

namespace relayopt {

struct PathAllocation {
  Path path;
  double flow = 0.0;
  double source_power = 0.0;
  double relay_power = 0.0;
};

struct FlowSolution {
  double total_flow = 0.0;
  std::vector<PathAllocation> allocations;
  double residual_mu = 0.0;
  double residual_nu = 0.0;

  double total_power() const;
};

/// Largest multicast flow achievable at the scenario's relay position under
/// its power budgets. Also works without a relay (direct transmission only).
FlowSolution max_flow_at(const Scenario& scenario);

/// Cheapest power assignment delivering `target_flow`, treating the
/// scenario's budgets as hard caps. Throws TargetInfeasible when the target
/// exceeds the maximum achievable flow.
FlowSolution min_cost_at(const Scenario& scenario, double target_flow);

/// Brute-force lower bound on the maximum flow: splits both budgets into
/// `levels` quanta across every spanning path and keeps the best total.
/// levels = 0 picks 64 for up to three paths and 16 beyond.
double oracle_max_flow(const Scenario& scenario, int levels = 0);

/// Visits every way to distribute `levels` indivisible quanta across `bins`
/// slots. Drives the enumeration oracle.
void for_each_split(int levels, int bins, const std::function<void(std::span<const int>)>& fn);

}  // namespace relayopt
