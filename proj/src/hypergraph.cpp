#include "relayopt/hypergraph.hpp"

#include <algorithm>
#include <cmath>

#include "relayopt/errors.hpp"
#include "relayopt/tolerance.hpp"

namespace relayopt {

namespace {

struct Audience {
  NodeId id;
  double dist;
};

std::vector<Hyperarc> prefix_arcs(const Scenario& sc, NodeId transmitter, geom::Point origin,
                                  bool include_relay) {
  std::vector<Audience> audience;
  const auto& dests = sc.destinations();
  audience.reserve(dests.size() + 1);
  for (size_t i = 0; i < dests.size(); ++i)
    audience.push_back({NodeId{NodeKind::destination, static_cast<int>(i)},
                        geom::distance(origin, dests[i])});
  if (include_relay && sc.relay())
    audience.push_back({NodeId{NodeKind::relay, -1}, geom::distance(origin, *sc.relay())});
  std::stable_sort(audience.begin(), audience.end(), [](const Audience& a, const Audience& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.id.kind != b.id.kind) return a.id.kind == NodeKind::relay;
    return a.id.index < b.id.index;
  });

  std::vector<Hyperarc> arcs;
  arcs.reserve(audience.size());
  Hyperarc cur;
  cur.transmitter = transmitter;
  for (const Audience& a : audience) {
    cur.end_nodes.push_back(a.id);
    cur.reach = std::max(a.dist, kEpsGeo);
    if (a.id.kind == NodeKind::relay)
      cur.includes_relay = true;
    else
      cur.dest_mask |= (std::uint64_t{1} << a.id.index);
    cur.lambda = 1.0 / sc.model().h(cur.reach);
    arcs.push_back(cur);
  }
  return arcs;
}

}  // namespace

std::string node_name(NodeId id) {
  switch (id.kind) {
    case NodeKind::source:
      return "s";
    case NodeKind::relay:
      return "r";
    case NodeKind::destination:
      return "t" + std::to_string(id.index + 1);
  }
  return "?";
}

Hypergraph build_hypergraph(const Scenario& sc) {
  if (sc.destinations().size() > 63)
    throw Error(ErrorCode::invalid_scenario, "destination sets beyond 63 are not supported");
  Hypergraph g;
  g.source_arcs = prefix_arcs(sc, NodeId{NodeKind::source, -1}, sc.source(), true);
  if (sc.relay())
    g.relay_arcs = prefix_arcs(sc, NodeId{NodeKind::relay, -1}, *sc.relay(), false);
  g.full_mask = (sc.destinations().size() == 63)
                    ? ~std::uint64_t{0} >> 1
                    : (std::uint64_t{1} << sc.destinations().size()) - 1;
  return g;
}

std::vector<Path> spanning_paths(const Scenario& sc) {
  Hypergraph g = build_hypergraph(sc);

  const Hyperarc* direct = nullptr;
  for (const Hyperarc& a : g.source_arcs)
    if ((a.dest_mask & g.full_mask) == g.full_mask) {
      direct = &a;
      break;
    }
  if (!direct) throw Error(ErrorCode::internal_consistency, "no covering source arc");

  std::vector<Path> paths;
  if (sc.relay()) {
    // For each source prefix that contains the relay, pair it with the
    // shortest relay prefix covering the leftover destinations. Prefixes with
    // an empty leftover are skipped; if every prefix is skipped (relay beyond
    // all destinations), the smallest relay arc is attached to the first
    // relay-bearing prefix so a two-hop option always exists.
    for (const Hyperarc& sa : g.source_arcs) {
      if (!sa.includes_relay) continue;
      std::uint64_t missing = g.full_mask & ~sa.dest_mask;
      if (missing == 0) continue;
      for (const Hyperarc& ra : g.relay_arcs) {
        if ((ra.dest_mask & missing) == missing) {
          paths.push_back(Path{sa, ra});
          break;
        }
      }
    }
    if (paths.empty() && !g.relay_arcs.empty()) {
      for (const Hyperarc& sa : g.source_arcs) {
        if (!sa.includes_relay) continue;
        paths.push_back(Path{sa, g.relay_arcs.front()});
        break;
      }
    }
  }
  std::stable_sort(paths.begin(), paths.end(),
                   [](const Path& a, const Path& b) { return a.source_arc.reach < b.source_arc.reach; });
  paths.push_back(Path{*direct, std::nullopt});
  return paths;
}

double path_mincut(const Scenario& sc, const Path& path) {
  double src_rate = path.source_arc.lambda * sc.model().g(sc.mu());
  if (!path.two_hop()) return src_rate;
  double relay_rate = path.relay_arc->lambda * sc.model().g(sc.nu());
  return std::min(src_rate, relay_rate);
}

BestPathResult best_relay_path(const Scenario& sc) {
  if (!sc.relay()) throw Error(ErrorCode::invalid_scenario, "best_relay_path needs a placed relay");
  std::vector<Path> paths = spanning_paths(sc);
  const Path* best = nullptr;
  double best_cut = 0.0;
  for (const Path& p : paths) {
    if (!p.two_hop()) continue;
    double cut = path_mincut(sc, p);
    if (!best) {
      best = &p;
      best_cut = cut;
      continue;
    }
    bool tie = std::abs(cut - best_cut) <= 1e-12 * std::max({1.0, std::abs(cut), std::abs(best_cut)});
    if (tie) {
      if (p.source_arc.reach < best->source_arc.reach - kEpsGeo) {
        best = &p;
      } else if (std::abs(p.source_arc.reach - best->source_arc.reach) <= kEpsGeo &&
                 p.relay_arc->reach < best->relay_arc->reach - kEpsGeo) {
        best = &p;
      }
      best_cut = std::max(best_cut, cut);
    } else if (cut > best_cut) {
      best = &p;
      best_cut = cut;
    }
  }
  if (!best) throw Error(ErrorCode::internal_consistency, "no two-hop path available");
  return BestPathResult{*best, best_cut};
}

}  // namespace relayopt
