#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relayopt/scenario.hpp"

namespace relayopt {

enum class NodeKind { source, relay, destination };

struct NodeId {
  NodeKind kind;
  int index = -1;  // destination index in sorted order, -1 otherwise

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

std::string node_name(NodeId id);

/// One broadcast hyperarc: a transmitter reaching a distance-ordered prefix of
/// its audience. `lambda` = 1/h(reach) converts transmit power to rate.
struct Hyperarc {
  NodeId transmitter;
  std::vector<NodeId> end_nodes;  // sorted by distance from the transmitter
  double reach = 0.0;             // distance to the farthest end node
  double lambda = 0.0;
  std::uint64_t dest_mask = 0;    // bit i set when sorted destination i is covered
  bool includes_relay = false;
};

/// All prefix hyperarcs of a scenario with a placed relay. Source arcs come
/// first (shortest reach first), then relay arcs.
struct Hypergraph {
  std::vector<Hyperarc> source_arcs;
  std::vector<Hyperarc> relay_arcs;
  std::uint64_t full_mask = 0;
};

Hypergraph build_hypergraph(const Scenario& scenario);

/// A path is one source arc, optionally followed by one relay arc. Together
/// the arcs must cover every destination; two-hop paths must put the relay in
/// the source arc.
struct Path {
  Hyperarc source_arc;
  std::optional<Hyperarc> relay_arc;

  bool two_hop() const { return relay_arc.has_value(); }
};

/// Spanning path set: every two-hop path built from a minimal relay
/// complement, plus the all-direct path. The all-direct path is last; two-hop
/// paths are ordered by increasing source reach. Size is at most n + 1.
std::vector<Path> spanning_paths(const Scenario& scenario);

/// Min-cut value of a path under the scenario's power budgets.
double path_mincut(const Scenario& scenario, const Path& path);

struct BestPathResult {
  Path path;
  double mincut = 0.0;
};

/// Two-hop path with the largest min-cut. Ties go to the path with the
/// smaller source reach, then the smaller relay reach.
BestPathResult best_relay_path(const Scenario& scenario);

}  // namespace relayopt
