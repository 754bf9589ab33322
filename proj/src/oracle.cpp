#include "relayopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "relayopt/errors.hpp"
#include "relayopt/hypergraph.hpp"
#include "relayopt/tolerance.hpp"

namespace relayopt {

namespace {

using geom::Point;

// Shared sweep core. eval returns nothing when the point is unusable
// (outside the hull, or infeasible for the min-cost objective).
GridSearchResult sweep_grid(const Scenario& sc, GridSpec grid, bool maximize,
                            const std::function<std::optional<double>(Point)>& eval) {
  if (grid.resolution < 8)
    throw Error(ErrorCode::invalid_scenario, "grid resolution must be at least 8");
  const geom::ConvexPolygon& hull = sc.node_hull();
  const double diameter = hull.diameter();
  const double sign = maximize ? 1.0 : -1.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int res = grid.resolution;

  std::optional<Point> best_p;
  double best_v = -std::numeric_limits<double>::infinity();
  double lipschitz = 0.0;
  double pitch = std::max(diameter / res, 1e-12);

  if (hull.degenerate()) {
    // collapsed hull: walk the segment with the full point budget
    const auto& v = hull.vertices();
    Point a = v.front(), b = v.back();
    int count = res * res;
    std::vector<double> vals(static_cast<size_t>(count), nan);
    for (int k = 0; k < count; ++k) {
      double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
      Point p = a + t * (b - a);
      auto val = eval(p);
      if (!val) continue;
      vals[static_cast<size_t>(k)] = *val;
      if (sign * *val > best_v) {
        best_v = sign * *val;
        best_p = p;
      }
    }
    double step = count > 1 ? geom::distance(a, b) / (count - 1) : 1.0;
    if (step > 1e-15)
      for (int k = 0; k + 1 < count; ++k) {
        double u = vals[static_cast<size_t>(k)], w = vals[static_cast<size_t>(k) + 1];
        if (std::isfinite(u) && std::isfinite(w))
          lipschitz = std::max(lipschitz, std::abs(u - w) / step);
      }
    pitch = std::max(step, 1e-12);
  } else {
    auto [lo, hi] = hull.bounding_box();
    double dx = (hi.x - lo.x) / (res - 1);
    double dy = (hi.y - lo.y) / (res - 1);
    std::vector<double> vals(static_cast<size_t>(res) * res, nan);
    for (int iy = 0; iy < res; ++iy) {
      for (int ix = 0; ix < res; ++ix) {
        Point p{lo.x + dx * ix, lo.y + dy * iy};
        if (!hull.contains(p, 1e-9 * std::max(1.0, diameter))) continue;
        auto val = eval(p);
        if (!val) continue;
        vals[static_cast<size_t>(iy) * res + ix] = *val;
        if (sign * *val > best_v) {
          best_v = sign * *val;
          best_p = p;
        }
      }
    }
    for (int iy = 0; iy < res; ++iy)
      for (int ix = 0; ix < res; ++ix) {
        double v0 = vals[static_cast<size_t>(iy) * res + ix];
        if (!std::isfinite(v0)) continue;
        if (ix + 1 < res && dx > 1e-15) {
          double v1 = vals[static_cast<size_t>(iy) * res + ix + 1];
          if (std::isfinite(v1)) lipschitz = std::max(lipschitz, std::abs(v1 - v0) / dx);
        }
        if (iy + 1 < res && dy > 1e-15) {
          double v1 = vals[(static_cast<size_t>(iy) + 1) * res + ix];
          if (std::isfinite(v1)) lipschitz = std::max(lipschitz, std::abs(v1 - v0) / dy);
        }
      }
    pitch = std::max({dx, dy, 1e-12});
  }

  if (!best_p)
    throw Error(ErrorCode::target_infeasible, "no grid point admits the objective");

  // local refinement: golden-section passes along each axis around the winner
  Point cur = *best_p;
  double cur_v = best_v;
  const double worst = -std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < grid.refinement; ++pass) {
    for (int axis = 0; axis < 2; ++axis) {
      Point dir = axis == 0 ? Point{1.0, 0.0} : Point{0.0, 1.0};
      auto line_val = [&](double t) {
        auto val = eval(cur + t * dir);
        return val ? sign * *val : worst;
      };
      geom::ScalarOptResult r = geom::maximize_on_segment(line_val, -pitch, pitch, false, 65);
      if (r.value > cur_v) {
        cur_v = r.value;
        cur = cur + r.x * dir;
      }
    }
    pitch *= 0.25;
  }

  GridSearchResult out;
  out.point = cur;
  out.value = sign * cur_v;
  out.lipschitz = lipschitz;
  out.slack = lipschitz * diameter / grid.resolution;
  return out;
}

}  // namespace

GridSearchResult grid_best_position(const Scenario& sc, GridSpec grid) {
  auto eval = [&sc](Point p) -> std::optional<double> {
    try {
      return max_flow_at(sc.with_relay(p)).total_flow;
    } catch (const Error&) {
      return std::nullopt;  // point collides with a node
    }
  };
  return sweep_grid(sc, grid, true, eval);
}

GridSearchResult grid_best_position(const Scenario& sc, double target_flow, GridSpec grid) {
  auto eval = [&sc, target_flow](Point p) -> std::optional<double> {
    try {
      return min_cost_at(sc.with_relay(p), target_flow).total_power();
    } catch (const Error&) {
      return std::nullopt;  // infeasible here, or point collides with a node
    }
  };
  return sweep_grid(sc, grid, false, eval);
}

PathFlowEnumeration enumerate_path_flows(const Scenario& sc, int levels) {
  if (!sc.relay())
    throw Error(ErrorCode::invalid_scenario, "path enumeration needs a fixed relay");
  const RateModel& m = sc.model();
  std::vector<Path> paths = spanning_paths(sc);
  const int np = static_cast<int>(paths.size());
  if (np > 6)
    throw Error(ErrorCode::oracle_too_large, "too many spanning paths to enumerate");

  std::vector<int> relay_slot(static_cast<size_t>(np), -1);
  int nr = 0;
  for (int i = 0; i < np; ++i)
    if (paths[static_cast<size_t>(i)].two_hop()) relay_slot[static_cast<size_t>(i)] = nr++;

  if (levels <= 0) {
    // finest grid whose composition count stays tractable
    auto combos = [](int l, int bins) {
      double c = 1.0;
      for (int k = 1; k < bins; ++k) c *= static_cast<double>(l + k) / k;
      return c;
    };
    for (int cand : {64, 48, 32, 24, 16, 12, 8}) {
      levels = cand;
      if (combos(cand, np) * combos(cand, std::max(nr, 1)) <= 5e7) break;
    }
  }

  std::vector<double> g_mu(static_cast<size_t>(levels) + 1), g_nu(g_mu.size());
  for (int q = 0; q <= levels; ++q) {
    g_mu[static_cast<size_t>(q)] = m.g(sc.mu() * q / levels);
    g_nu[static_cast<size_t>(q)] = m.g(sc.nu() * q / levels);
  }

  double max_cut = 0.0;
  for (const Path& p : paths) max_cut = std::max(max_cut, path_mincut(sc, p));

  // quantized sweep: source bins across all paths, relay bins across two-hop
  double best = 0.0;
  std::vector<int> best_src(static_cast<size_t>(np), 0), best_rel(static_cast<size_t>(nr), 0);
  std::vector<double> src_cap(static_cast<size_t>(np));
  for_each_split(levels, np, [&](std::span<const int> sq) {
    double direct_part = 0.0;
    for (int i = 0; i < np; ++i) {
      const Path& p = paths[static_cast<size_t>(i)];
      double r = p.source_arc.lambda * g_mu[static_cast<size_t>(sq[static_cast<size_t>(i)])];
      if (p.two_hop())
        src_cap[static_cast<size_t>(relay_slot[static_cast<size_t>(i)])] = r;
      else
        direct_part += r;
    }
    if (nr == 0) {
      if (direct_part > best) {
        best = direct_part;
        std::copy(sq.begin(), sq.end(), best_src.begin());
      }
      return;
    }
    std::vector<double> lam2(static_cast<size_t>(nr));
    {
      int slot = 0;
      for (int i = 0; i < np; ++i)
        if (paths[static_cast<size_t>(i)].two_hop())
          lam2[static_cast<size_t>(slot++)] = paths[static_cast<size_t>(i)].relay_arc->lambda;
    }
    for_each_split(levels, nr, [&](std::span<const int> rq) {
      double total = direct_part;
      for (int j = 0; j < nr; ++j)
        total += std::min(src_cap[static_cast<size_t>(j)],
                          lam2[static_cast<size_t>(j)] *
                              g_nu[static_cast<size_t>(rq[static_cast<size_t>(j)])]);
      if (total > best) {
        best = total;
        std::copy(sq.begin(), sq.end(), best_src.begin());
        std::copy(rq.begin(), rq.end(), best_rel.begin());
      }
    });
  });

  // continuous polishing: pairwise power transfers between bins
  std::vector<double> xs(static_cast<size_t>(np)), ys(static_cast<size_t>(std::max(nr, 1)), 0.0);
  for (int i = 0; i < np; ++i)
    xs[static_cast<size_t>(i)] = sc.mu() * best_src[static_cast<size_t>(i)] / levels;
  for (int j = 0; j < nr; ++j)
    ys[static_cast<size_t>(j)] = sc.nu() * best_rel[static_cast<size_t>(j)] / levels;

  auto total_of = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double total = 0.0;
    for (int i = 0; i < np; ++i) {
      const Path& p = paths[static_cast<size_t>(i)];
      double r = p.source_arc.lambda * m.g(x[static_cast<size_t>(i)]);
      if (p.two_hop()) {
        double r2 = p.relay_arc->lambda *
                    m.g(y[static_cast<size_t>(relay_slot[static_cast<size_t>(i)])]);
        total += std::min(r, r2);
      } else {
        total += r;
      }
    }
    return total;
  };

  auto polish = [&](std::vector<double>& x, std::vector<double>& y, int sweeps) {
    double cur = total_of(x, y);
    for (int s = 0; s < sweeps; ++s) {
      double before = cur;
      auto transfer = [&](std::vector<double>& v, int a, int b) {
        double lo = -v[static_cast<size_t>(b)], hi = v[static_cast<size_t>(a)];
        if (hi - lo < 1e-15) return;
        auto f = [&](double d) {
          double sa = v[static_cast<size_t>(a)], sb = v[static_cast<size_t>(b)];
          v[static_cast<size_t>(a)] = sa - d;
          v[static_cast<size_t>(b)] = sb + d;
          double t = total_of(x, y);
          v[static_cast<size_t>(a)] = sa;
          v[static_cast<size_t>(b)] = sb;
          return t;
        };
        geom::ScalarOptResult r = geom::maximize_on_segment(f, lo, hi, false, 65);
        if (r.value > cur + 1e-15) {
          v[static_cast<size_t>(a)] -= r.x;
          v[static_cast<size_t>(b)] += r.x;
          cur = r.value;
        }
      };
      for (int a = 0; a < np; ++a)
        for (int b = 0; b < np; ++b)
          if (a != b) transfer(x, a, b);
      for (int a = 0; a < nr; ++a)
        for (int b = 0; b < nr; ++b)
          if (a != b) transfer(y, a, b);
      if (cur - before < 1e-13) break;
    }
    return cur;
  };

  double refined = polish(xs, ys, 40);

  // drop paths whose removal costs nothing measurable
  auto path_flow = [&](int i) {
    const Path& p = paths[static_cast<size_t>(i)];
    double r = p.source_arc.lambda * m.g(xs[static_cast<size_t>(i)]);
    if (!p.two_hop()) return r;
    return std::min(r, p.relay_arc->lambda *
                           m.g(ys[static_cast<size_t>(relay_slot[static_cast<size_t>(i)])]));
  };
  for (int i = 0; i < np; ++i) {
    if (path_flow(i) <= 1e-9) continue;
    double keep_x = xs[static_cast<size_t>(i)];
    int slot = relay_slot[static_cast<size_t>(i)];
    double keep_y = slot >= 0 ? ys[static_cast<size_t>(slot)] : 0.0;
    double best_drop = -1.0;
    std::vector<double> bx, by;
    for (int k = 0; k < np; ++k) {
      if (k == i) continue;
      std::vector<double> tx = xs, ty = ys;
      tx[static_cast<size_t>(i)] = 0.0;
      tx[static_cast<size_t>(k)] += keep_x;
      if (slot >= 0) {
        ty[static_cast<size_t>(slot)] = 0.0;
        int ks = relay_slot[static_cast<size_t>(k)];
        ty[static_cast<size_t>(ks >= 0 ? ks : (slot == 0 && nr > 1 ? 1 : 0))] += keep_y;
      }
      double v = polish(tx, ty, 6);
      if (v > best_drop) {
        best_drop = v;
        bx = std::move(tx);
        by = std::move(ty);
      }
    }
    if (best_drop >= refined - 1e-9 && !bx.empty()) {
      xs = std::move(bx);
      ys = std::move(by);
      refined = std::max(refined, best_drop);
    }
  }

  PathFlowEnumeration out;
  out.best_flow = best;
  out.refined_flow = std::max(best, refined);
  out.levels = levels;
  out.slack = 2.0 * max_cut / levels;
  int support = 0;
  for (int i = 0; i < np; ++i)
    if (path_flow(i) > 1e-9) ++support;
  out.support_size = support;
  return out;
}

}  // namespace relayopt
