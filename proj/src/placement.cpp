#include "relayopt/placement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>

#include "relayopt/errors.hpp"
#include "relayopt/tolerance.hpp"

namespace relayopt {

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::p_star: return "PStar";
    case Branch::p_star_filtered: return "PStarFiltered";
    case Branch::bisector_segment: return "BisectorSegment";
    case Branch::boundary_hat: return "BoundaryHat";
    case Branch::min_cost_center: return "MinCostCenter";
    case Branch::min_cost_ring: return "MinCostRing";
  }
  return "unknown";
}

namespace {

using geom::Point;

double scene_scale(const Scenario& sc) {
  return std::max(1.0, sc.node_hull().diameter());
}

// A candidate relay sitting exactly on a node would be rejected by scenario
// validation, so such points get nudged off the node before evaluation.
Point desingularize(const Scenario& sc, Point p) {
  auto clashes = [&](Point q) {
    if (geom::points_coincide(q, sc.source(), kEpsGeo)) return true;
    for (const Point& t : sc.destinations())
      if (geom::points_coincide(q, t, kEpsGeo)) return true;
    return false;
  };
  if (!clashes(p)) return p;
  Point dir = sc.source() - p;
  double nrm = geom::norm(dir);
  dir = nrm < kEpsGeo ? Point{1.0, 0.0} : (1.0 / nrm) * dir;
  for (double step = 4.0 * kEpsGeo; step < 1.0; step *= 4.0) {
    Point q = p + step * dir;
    if (!clashes(q)) return q;
  }
  return p;
}

// Weighted minimax of (source, g(nu)) against (active targets, g(mu)) under
// the model's h, restricted to the node hull.
geom::MinimaxResult balance_point(const Scenario& sc, const std::vector<int>& active) {
  const RateModel& m = sc.model();
  std::vector<std::pair<Point, double>> anchors;
  anchors.reserve(active.size() + 1);
  anchors.emplace_back(sc.source(), m.g(sc.nu()));
  for (int i : active) anchors.emplace_back(sc.destinations()[i], m.g(sc.mu()));
  geom::PolygonDomain dom(sc.node_hull());
  auto h = [&m](double d) { return m.h(std::max(d, kEpsGeo)); };
  return geom::weighted_minimax_point(anchors, h, dom);
}

double farthest_active_h(const Scenario& sc, Point p, const std::vector<int>& active) {
  double worst = 0.0;
  for (int i : active)
    worst = std::max(worst, sc.model().h(std::max(geom::distance(p, sc.destinations()[i]), kEpsGeo)));
  return worst;
}

// Cleanup pass after a multi-start search: golden sweeps along both axes,
// any caller-supplied valley tangents, and the combined move of the pass,
// with a shrinking window. A tie between farthest destinations creases the
// cost surface along their perpendicular bisector, and axis descent stalls
// on such a crease unless it can slide along the tangent.
using CreaseDirs = std::function<void(Point, std::vector<Point>&)>;

Point polish_min_2d(const std::function<double(Point)>& f, const geom::ConvexDomain& dom,
                    Point p0, double pitch, const CreaseDirs& crease_dirs = {}) {
  Point p = dom.project(p0);
  double best = f(p);
  auto sweep = [&](Point dir) {
    double len = std::hypot(dir.x, dir.y);
    if (!(len > 0.0)) return;
    dir = (1.0 / len) * dir;
    auto slice = [&](double t) { return -f(dom.project(p + t * dir)); };
    geom::ScalarOptResult r = geom::maximize_on_segment(slice, -pitch, pitch, false, 257);
    Point q = dom.project(p + r.x * dir);
    double v = f(q);
    if (v < best) {
      best = v;
      p = q;
    }
  };
  std::vector<Point> dirs;
  for (int pass = 0; pass < 8; ++pass) {
    Point before = p;
    sweep({1.0, 0.0});
    sweep({0.0, 1.0});
    if (crease_dirs) {
      dirs.clear();
      crease_dirs(p, dirs);
      for (Point d : dirs) sweep(d);
    }
    sweep(p - before);
    pitch *= 0.5;
  }
  return p;
}

// perpendicular bisector tangents for every near-tie among the farthest
// destinations as seen from p
void farthest_tie_tangents(const Scenario& sc, Point p, std::vector<Point>& out) {
  const auto& dests = sc.destinations();
  double dmax = 0.0;
  for (const Point& t : dests) dmax = std::max(dmax, geom::distance(p, t));
  std::vector<int> top;
  for (size_t i = 0; i < dests.size(); ++i)
    if (geom::distance(p, dests[i]) >= dmax * (1.0 - 1e-2) - 1e-12)
      top.push_back(static_cast<int>(i));
  for (size_t k = 1; k < top.size(); ++k) {
    Point d = dests[top[k]] - dests[top[k - 1]];
    out.push_back({-d.y, d.x});
  }
}

struct Interval {
  double lo, hi;
  bool empty() const { return !(lo <= hi); }
};

// Clip {u : alpha*u + beta >= 0} into iv.
Interval clip_halfplane(Interval iv, double alpha, double beta, double tol) {
  if (std::abs(alpha) < tol) {
    if (beta < -tol) iv = {1.0, 0.0};
    return iv;
  }
  double r = -beta / alpha;
  if (alpha > 0.0)
    iv.lo = std::max(iv.lo, r);
  else
    iv.hi = std::min(iv.hi, r);
  return iv;
}

// Clip the line base + u*dir (dir unit) to a disk, then to the hull edges.
Interval clip_line(Point base, Point dir, Point center, double radius,
                   const geom::ConvexPolygon& hull, double big) {
  Interval iv{-big, big};
  Point w = base - center;
  double b2 = geom::dot(w, dir);
  double c = geom::dot(w, w) - radius * radius;
  double disc = b2 * b2 - c;
  if (disc < 0.0) return Interval{1.0, 0.0};
  double sq = std::sqrt(disc);
  iv.lo = std::max(iv.lo, -b2 - sq);
  iv.hi = std::min(iv.hi, -b2 + sq);
  if (!hull.degenerate()) {
    const auto& v = hull.vertices();
    double tol = 1e-13 * std::max(1.0, radius);
    for (size_t i = 0; i < v.size(); ++i) {
      Point a = v[i], b = v[(i + 1) % v.size()];
      Point e = b - a;
      // inside test: cross(e, p - a) >= 0 for ccw hulls
      double alpha = e.x * dir.y - e.y * dir.x;
      double beta = e.x * (base.y - a.y) - e.y * (base.x - a.x);
      iv = clip_halfplane(iv, alpha, beta, tol);
      if (iv.empty()) break;
    }
  }
  return iv;
}

struct FlowEval {
  Point p;
  double value;
};

}  // namespace

geom::MinimaxResult compute_p_star(const Scenario& sc) {
  std::vector<int> all(sc.destinations().size());
  std::iota(all.begin(), all.end(), 0);
  return balance_point(sc, all);
}

PlacementResult max_flow_place(const Scenario& sc) {
  const RateModel& m = sc.model();
  const auto& dests = sc.destinations();
  const size_t n = dests.size();
  const Point s = sc.source();
  const double g_mu = m.g(sc.mu());
  const double g_nu = m.g(sc.nu());
  const double scale = scene_scale(sc);

  PlacementResult res;

  std::vector<int> all_idx(n);
  std::iota(all_idx.begin(), all_idx.end(), 0);

  geom::MinimaxResult star = compute_p_star(sc);
  Point p_star = desingularize(sc, star.point);
  FlowSolution sol_star = max_flow_at(sc.with_relay(p_star));

  auto fill_from_flow = [&](PlacementResult& out) {
    out.pi_s = 0.0;
    out.pi_r = 0.0;
    out.source_power = 0.0;
    out.relay_power = 0.0;
    for (const auto& a : out.flow.allocations) {
      out.source_power += a.source_power;
      out.relay_power += a.relay_power;
      if (a.path.two_hop()) {
        out.pi_s = std::max(out.pi_s, a.path.source_arc.reach);
        out.pi_r = std::max(out.pi_r, a.path.relay_arc->reach);
      } else if (out.pi_s == 0.0) {
        out.pi_s = a.path.source_arc.reach;
      }
    }
  };

  // step 1: the balanced center qualifies when the certificate holds, but it
  // only labels the answer if no sweep candidate beats its flow. Splitting
  // source power between the relay path and the direct arc can beat the
  // balanced point from a closer-in relay, so the certificate alone does not
  // settle optimality.
  bool star_declared = false;
  {
    double lhs = g_nu * m.h(std::max(geom::distance(s, p_star), kEpsGeo));
    double rhs = g_mu * farthest_active_h(sc, p_star, all_idx);
    double rhs_last = g_mu * m.h(std::max(geom::distance(p_star, dests.back()), kEpsGeo));
    bool balanced = approx_eq(lhs, rhs);
    if (balanced != approx_eq(lhs, rhs_last))
      res.diagnostics.push_back(
          "balance certificate differs between the farthest target and the last-indexed target");
    star_declared = balanced && sol_star.residual_mu <= 1e-7 * std::max(1.0, sc.mu());
  }

  // step 2: drop the targets the source reaches more cheaply and re-balance
  std::vector<int> filtered, active;
  for (size_t i = 0; i < n; ++i) {
    if (geom::distance(s, dests[i]) < geom::distance(p_star, dests[i]))
      filtered.push_back(static_cast<int>(i));
    else
      active.push_back(static_cast<int>(i));
  }

  double far_filtered = 0.0;
  for (int i : filtered) far_filtered = std::max(far_filtered, geom::distance(s, dests[i]));

  std::optional<Point> p_two;
  std::optional<FlowSolution> sol_two;
  bool two_declared = false;
  if (!filtered.empty() && !active.empty()) {
    geom::MinimaxResult red = balance_point(sc, active);
    Point q = desingularize(sc, red.point);
    p_two = q;
    double d_sq = geom::distance(s, q);
    double tol = kEpsGeo * std::max(1.0, d_sq);
    bool spanned = far_filtered <= d_sq + tol;
    bool spanned_each = true;
    for (int i : filtered)
      spanned_each = spanned_each && geom::distance(s, dests[i]) <= d_sq + tol;
    if (spanned != spanned_each)
      res.diagnostics.push_back("span test disagrees between max form and per-target form");
    if (spanned) {
      sol_two = max_flow_at(sc.with_relay(q));
      double lhs = g_nu * m.h(std::max(d_sq, kEpsGeo));
      double rhs = g_mu * farthest_active_h(sc, q, active);
      two_declared =
          approx_eq(lhs, rhs) && sol_two->residual_mu <= 1e-7 * std::max(1.0, sc.mu());
      if (!two_declared)
        res.diagnostics.push_back(
            "filtered center passed the span test but not the balance certificate");
    }
  }

  // step 3: sweep bisector segments, radial segments and the boundary center
  double rho1;
  if (!filtered.empty() && !active.empty()) {
    rho1 = far_filtered;
  } else {
    active = all_idx;
    rho1 = geom::distance(s, dests.back());
  }

  Point best_p = p_star;
  double best_v = sol_star.total_flow;
  bool best_is_hat = false;
  auto try_candidate = [&](Point raw) {
    Point q = desingularize(sc, raw);
    double v = max_flow_at(sc.with_relay(q)).total_flow;
    if (v > best_v) {
      best_v = v;
      best_p = q;
      best_is_hat = false;
      return true;
    }
    return false;
  };

  if (p_two) try_candidate(*p_two);

  const geom::ConvexPolygon& hull = sc.node_hull();
  auto flow_along = [&](Point base, Point dir) {
    return [&, base, dir](double u) {
      Point q = desingularize(sc, base + u * dir);
      return max_flow_at(sc.with_relay(q)).total_flow;
    };
  };

  if (active.size() >= 2 && !hull.degenerate()) {
    int far_i = active.back();  // targets are stored in distance order
    const Point tf = dests[far_i];
    for (int bi : active) {
      if (bi == far_i) continue;
      const Point tb = dests[bi];
      Point mid = 0.5 * (tb + tf);
      Point dir{-(tf.y - tb.y), tf.x - tb.x};
      double dn = geom::norm(dir);
      if (dn < kEpsGeo) continue;
      dir = (1.0 / dn) * dir;
      Interval iv = clip_line(mid, dir, s, rho1, hull, rho1 + scale + 1.0);
      if (iv.empty()) continue;

      // keep only the parts where this pair is the farthest active pair
      auto pair_leads = [&](double u) {
        Point q = mid + u * dir;
        double db = geom::distance(q, tb);
        double lim = db + 1e-9 * std::max(1.0, db);
        for (int k : active) {
          if (k == bi || k == far_i) continue;
          if (geom::distance(q, dests[k]) > lim) return false;
        }
        return true;
      };

      const int kSamples = 65;
      std::vector<double> us(kSamples);
      std::vector<char> ok(kSamples);
      for (int k = 0; k < kSamples; ++k) {
        us[k] = iv.lo + (iv.hi - iv.lo) * k / (kSamples - 1);
        ok[k] = pair_leads(us[k]) ? 1 : 0;
      }
      auto refine = [&](double in, double out) {
        for (int it = 0; it < 40; ++it) {
          double m2 = 0.5 * (in + out);
          (pair_leads(m2) ? in : out) = m2;
        }
        return in;
      };
      int k = 0;
      while (k < kSamples) {
        if (!ok[k]) {
          ++k;
          continue;
        }
        int j = k;
        while (j + 1 < kSamples && ok[j + 1]) ++j;
        double lo = us[k], hi = us[j];
        if (k > 0) lo = refine(us[k], us[k - 1]);
        if (j + 1 < kSamples) hi = refine(us[j], us[j + 1]);
        if (hi - lo > 1e-12 * scale) {
          geom::ScalarOptResult r =
              geom::maximize_on_segment(flow_along(mid, dir), lo, hi, false, 257);
          try_candidate(mid + r.x * dir);
        } else {
          try_candidate(mid + 0.5 * (lo + hi) * dir);
        }
        k = j + 1;
      }
    }
  }

  // radial probes catch optima that sit between the source and one target
  for (int i : active) {
    Point d = dests[i] - s;
    double dn = geom::norm(d);
    if (dn < kEpsGeo) continue;
    Point dir = (1.0 / dn) * d;
    double hi = std::min(rho1, dn);
    if (hi <= kEpsGeo) continue;
    geom::ScalarOptResult r = geom::maximize_on_segment(flow_along(s, dir), 0.0, hi, false, 257);
    try_candidate(s + r.x * dir);
  }

  // sweep over the source radius: at a fixed radius the hyperarc split is
  // fixed too and only the relay hop varies, so the best relay on each circle
  // is the point minimizing the farthest uncovered target. Scanning that
  // family covers every position the full objective can prefer, including
  // ones outside the region-1 disk.
  if (!hull.degenerate()) {
    double r_top = geom::distance(s, dests.back());
    auto circle_best = [&](double pi) -> Point {
      std::vector<Point> uncov;
      for (const Point& t : dests)
        if (geom::distance(s, t) > pi) uncov.push_back(t);
      if (uncov.empty()) uncov.push_back(dests.back());
      double tol = 1e-9 * std::max(1.0, pi);
      auto arc_cost = [&](double th) {
        Point q{s.x + pi * std::cos(th), s.y + pi * std::sin(th)};
        if (!hull.contains(q, tol)) return std::numeric_limits<double>::infinity();
        double w = 0.0;
        for (const Point& t : uncov) w = std::max(w, geom::distance(q, t));
        return w;
      };
      const int kArc = 512;
      const double tau = 2.0 * std::numbers::pi;
      double best_th = 0.0, best_w = std::numeric_limits<double>::infinity();
      for (int k = 0; k < kArc; ++k) {
        double th = tau * k / kArc;
        double w = arc_cost(th);
        if (w < best_w) {
          best_w = w;
          best_th = th;
        }
      }
      if (std::isinf(best_w)) {
        Point d = dests.back() - s;
        best_th = std::atan2(d.y, d.x);
      } else {
        double step = tau / kArc;
        geom::ScalarOptResult r = geom::maximize_on_segment(
            [&](double th) { return -arc_cost(th); }, best_th - step, best_th + step, false, 65);
        if (std::isfinite(r.value)) best_th = r.x;
      }
      return Point{s.x + pi * std::cos(best_th), s.y + pi * std::sin(best_th)};
    };
    auto flow_at_radius = [&](double pi) {
      Point q = desingularize(sc, circle_best(pi));
      return max_flow_at(sc.with_relay(q)).total_flow;
    };
    geom::ScalarOptResult r =
        geom::maximize_on_segment(flow_at_radius, 1e-6 * r_top, r_top, false, 257);
    try_candidate(circle_best(r.x));
  }

  // boundary center: unweighted minimax of the active targets inside the ring
  {
    std::vector<std::pair<Point, double>> anchors;
    for (int i : active) anchors.emplace_back(dests[i], 1.0);
    geom::PolygonDomain hull_dom(hull);
    geom::DiskDomain disk_dom(geom::Circle{s, rho1});
    std::vector<const geom::ConvexDomain*> parts{&hull_dom, &disk_dom};
    geom::IntersectionDomain dom(parts);
    auto ident = [](double d) { return d; };
    geom::MinimaxResult hat = geom::weighted_minimax_point(anchors, ident, dom);
    if (try_candidate(hat.point)) best_is_hat = true;
  }

  // coordinate-descent cleanup of the sweep winner; ties between the hyperarc
  // reaches crease the flow surface, so the polish also slides along the
  // farthest-pair bisectors and the circle through the current point
  {
    geom::PolygonDomain hull_dom(hull);
    auto neg_flow = [&](Point p) {
      Point q = desingularize(sc, p);
      return -max_flow_at(sc.with_relay(q)).total_flow;
    };
    auto tangents = [&](Point p, std::vector<Point>& out) {
      farthest_tie_tangents(sc, p, out);
      Point d = p - s;
      if (geom::norm(d) > kEpsGeo) {
        out.push_back(d);
        out.push_back({-d.y, d.x});
      }
    };
    Point refined = polish_min_2d(neg_flow, hull_dom, best_p, 0.02 * scale, tangents);
    try_candidate(refined);
  }

  // a declared center only takes the branch label when nothing beats it
  double tie = 1e-9 * std::max(1.0, best_v);
  if (star_declared && sol_star.total_flow >= best_v - tie) {
    res.relay = p_star;
    res.objective = sol_star.total_flow;
    res.branch = Branch::p_star;
    res.flow = std::move(sol_star);
    fill_from_flow(res);
    return res;
  }
  if (two_declared && sol_two->total_flow >= best_v - tie) {
    res.relay = *p_two;
    res.objective = sol_two->total_flow;
    res.branch = Branch::p_star_filtered;
    res.flow = std::move(*sol_two);
    fill_from_flow(res);
    return res;
  }

  res.relay = best_p;
  res.objective = best_v;
  res.branch = best_is_hat ? Branch::boundary_hat : Branch::bisector_segment;
  res.flow = max_flow_at(sc.with_relay(best_p));
  fill_from_flow(res);
  return res;
}

geom::Point r_hat_point(const Scenario& sc, double pi) {
  if (!(pi > 0.0) || !std::isfinite(pi))
    throw Error(ErrorCode::invalid_scenario, "source reach must be positive and finite");
  const auto& dests = sc.destinations();
  const Point s = sc.source();
  std::vector<std::pair<Point, double>> anchors;
  for (const Point& t : dests)
    if (geom::distance(s, t) > pi) anchors.emplace_back(t, 1.0);
  if (anchors.empty()) anchors.emplace_back(dests.back(), 1.0);
  geom::PolygonDomain hull_dom(sc.node_hull());
  geom::DiskDomain disk_dom(geom::Circle{s, pi});
  std::vector<const geom::ConvexDomain*> parts{&hull_dom, &disk_dom};
  geom::IntersectionDomain dom(parts);
  auto ident = [](double d) { return d; };
  return geom::weighted_minimax_point(anchors, ident, dom).point;
}

RHatCurve trace_r_hat(const Scenario& sc, int samples) {
  if (samples < 2) throw Error(ErrorCode::invalid_scenario, "need at least 2 trace samples");
  const auto& dests = sc.destinations();
  const Point s = sc.source();
  const double d_max = geom::distance(s, dests.back());
  const double scale = scene_scale(sc);

  struct Sample {
    double pi;
    Point p;
    std::vector<int> pin;  // targets pinning the center, ascending
  };
  std::vector<Sample> pts;
  pts.reserve(samples);
  for (int k = 1; k <= samples; ++k) {
    Sample smp;
    smp.pi = d_max * k / (samples + 1);
    smp.p = r_hat_point(sc, smp.pi);
    double worst = 0.0;
    std::vector<int> beyond;
    for (size_t i = 0; i < dests.size(); ++i) {
      if (geom::distance(s, dests[i]) > smp.pi) {
        beyond.push_back(static_cast<int>(i));
        worst = std::max(worst, geom::distance(smp.p, dests[i]));
      }
    }
    if (beyond.empty()) beyond.push_back(static_cast<int>(dests.size()) - 1);
    for (int i : beyond)
      if (geom::distance(smp.p, dests[i]) >= worst - 1e-6 * std::max(1.0, worst))
        smp.pin.push_back(i);
    pts.push_back(std::move(smp));
  }

  RHatCurve curve;
  curve.samples = samples;
  size_t i = 0;
  while (i < pts.size()) {
    size_t j = i;
    while (j + 1 < pts.size() && pts[j + 1].pin == pts[i].pin) {
      // extend only while the run stays collinear
      Point a = pts[i].p, b = pts[j + 1].p;
      bool straight = true;
      for (size_t k = i + 1; k <= j; ++k) {
        Point d1 = b - a, d2 = pts[k].p - a;
        if (std::abs(d1.x * d2.y - d1.y * d2.x) > 1e-7 * scale * scale) {
          straight = false;
          break;
        }
      }
      if (!straight) break;
      ++j;
    }
    RHatSegment seg;
    seg.pi_lo = pts[i].pi;
    seg.pi_hi = pts[j].pi;
    seg.start = pts[i].p;
    seg.end = pts[j].p;
    seg.sample_count = static_cast<int>(j - i + 1);
    const auto& pin = pts[i].pin;
    seg.bisector_pair = {pin.size() >= 1 ? pin[0] : -1, pin.size() >= 2 ? pin[1] : -1};
    curve.segments.push_back(seg);
    i = j + 1;
  }
  return curve;
}

PlacementResult min_cost_place(const Scenario& sc, double target_flow) {
  if (!(target_flow > 0.0) || !std::isfinite(target_flow))
    throw Error(ErrorCode::invalid_scenario, "target flow must be positive and finite");
  const RateModel& m = sc.model();
  const auto& dests = sc.destinations();
  const size_t n = dests.size();
  const Point s = sc.source();
  const Point tn = dests.back();
  const double g_mu = m.g(sc.mu());
  const double g_nu = m.g(sc.nu());

  const double r_mu = m.h_inv(g_mu / target_flow);
  const double r_nu = m.h_inv(g_nu / target_flow);

  geom::LensRegion lens =
      geom::circle_intersection_region(geom::Circle{s, r_mu}, geom::Circle{tn, r_nu});
  if (lens.empty()) {
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "flow %.17g needs source reach %.17g plus relay reach %.17g, but the far "
                  "target is %.17g away",
                  target_flow, r_mu, r_nu, geom::distance(s, tn));
    throw Error(ErrorCode::target_infeasible, buf);
  }

  geom::PolygonDomain hull_dom(sc.node_hull());
  std::vector<const geom::ConvexDomain*> parts{&lens, &hull_dom};
  geom::IntersectionDomain domain(parts);

  auto h_at = [&m](double d) { return m.h(std::max(d, kEpsGeo)); };

  // step 1: unconstrained-cost center, then again without the near targets
  auto unit_cost_over = [&](const std::vector<int>& over) {
    return [&, over](Point p) {
      double worst = 0.0;
      for (int i : over) worst = std::max(worst, h_at(geom::distance(p, dests[i])));
      return h_at(geom::distance(s, p)) + worst;
    };
  };

  std::vector<int> all_idx(n);
  std::iota(all_idx.begin(), all_idx.end(), 0);

  std::vector<Point> starts{domain.project(0.5 * (s + tn)), domain.project(s),
                            domain.project(tn)};
  for (const Point& c : lens.corners()) starts.push_back(domain.project(c));

  Point p_hat0 = geom::minimize_convex_2d(unit_cost_over(all_idx), domain, starts).point;

  double d_hat0 = geom::distance(s, p_hat0);
  std::vector<int> near, rest;
  for (size_t i = 0; i < n; ++i) {
    if (geom::distance(s, dests[i]) <= d_hat0 + 1e-9 * std::max(1.0, d_hat0))
      near.push_back(static_cast<int>(i));
    else
      rest.push_back(static_cast<int>(i));
  }

  Point p_hat = p_hat0;
  if (!near.empty() && !rest.empty()) {
    std::vector<Point> st2 = starts;
    st2.push_back(p_hat0);
    p_hat = geom::minimize_convex_2d(unit_cost_over(rest), domain, st2).point;
  }

  struct CostCand {
    Point p;
    double pi_s = 0.0, pi_r = 0.0;
    double ps = 0.0, pr = 0.0, total = 0.0;
    int ring = -1;
    bool feasible = false;
  };

  auto assess = [&](Point raw, double floor_rho, int ring) {
    CostCand c;
    c.ring = ring;
    c.p = desingularize(sc, raw);
    double d_sp = geom::distance(s, c.p);
    c.pi_s = std::max(d_sp, floor_rho);
    double cover = c.pi_s * (1.0 + 1e-12) + 1e-15;
    c.pi_r = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (geom::distance(s, dests[i]) > cover)
        c.pi_r = std::max(c.pi_r, geom::distance(c.p, dests[i]));
    double hs = h_at(c.pi_s);
    double hr = c.pi_r > 0.0 ? h_at(c.pi_r) : 0.0;
    if (hs * target_flow > g_mu * (1.0 + 1e-9) + 1e-15) return c;
    if (hr * target_flow > g_nu * (1.0 + 1e-9) + 1e-15) return c;
    c.ps = m.g_inv(hs * target_flow);
    c.pr = hr > 0.0 ? m.g_inv(hr * target_flow) : 0.0;
    c.total = c.ps + c.pr;
    c.feasible = true;
    return c;
  };

  // candidates get a coordinate-descent cleanup before entering the ranking,
  // so ties between them are decided on converged values
  auto tangents = [&sc](Point p, std::vector<Point>& out) {
    farthest_tie_tangents(sc, p, out);
  };
  auto assess_polished = [&](Point raw, double floor_rho, int ring) {
    auto total_at = [&](Point p) {
      CostCand c = assess(p, floor_rho, ring);
      return c.feasible ? c.total : std::numeric_limits<double>::infinity();
    };
    Point refined = polish_min_2d(total_at, domain, raw, 0.02 * scene_scale(sc), tangents);
    CostCand a = assess(raw, floor_rho, ring);
    CostCand b = assess(refined, floor_rho, ring);
    if (!a.feasible) return b;
    if (!b.feasible) return a;
    return b.total < a.total ? b : a;
  };

  std::optional<CostCand> best;
  auto consider = [&](const CostCand& c) {
    if (!c.feasible) return;
    if (!best || c.total < best->total) best = c;
  };

  consider(assess_polished(p_hat, 0.0, -1));
  consider(assess_polished(p_hat0, 0.0, -1));

  // step 2: ring sweep, one candidate per admissible source reach floor
  double d_shat = geom::distance(s, p_hat);
  std::vector<int> ring_targets;
  for (size_t i = 0; i + 1 < n; ++i) {
    double d = geom::distance(s, dests[i]);
    bool is_near = std::find(near.begin(), near.end(), static_cast<int>(i)) != near.end();
    if (!is_near && d > d_shat && d <= r_mu * (1.0 + 1e-12))
      ring_targets.push_back(static_cast<int>(i));
  }

  for (size_t j = 0; j < ring_targets.size(); ++j) {
    double floor_rho = geom::distance(s, dests[ring_targets[j]]);
    double cover = floor_rho * (1.0 + 1e-12) + 1e-15;
    auto ring_cost = [&](Point p) {
      double worst = 0.0;
      for (size_t i = 0; i < n; ++i)
        if (geom::distance(s, dests[i]) > cover)
          worst = std::max(worst, h_at(geom::distance(p, dests[i])));
      return std::max(h_at(geom::distance(s, p)), h_at(floor_rho)) + worst;
    };
    std::vector<Point> st = starts;
    st.push_back(p_hat);
    Point pj = geom::minimize_convex_2d(ring_cost, domain, st).point;
    consider(assess_polished(pj, floor_rho, static_cast<int>(j) + 1));
  }

  consider(assess_polished(domain.project(tn), 0.0, -1));

  PlacementResult res;
  if (!best) {
    PlacementResult mf = max_flow_place(sc);
    CostCand c = assess_polished(mf.relay, 0.0, -1);
    if (c.feasible) {
      best = c;
      res.diagnostics.push_back("fell back to the max-flow position");
    } else {
      throw Error(ErrorCode::target_infeasible,
                  "no single relay path sustains the target flow; it needs a split "
                  "across paths");
    }
  }

  Scenario placed = sc.with_relay(best->p);
  FlowSolution cap = max_flow_at(placed);
  if (target_flow > cap.total_flow * (1.0 + 1e-9) + 1e-15)
    throw Error(ErrorCode::internal_consistency,
                "selected relay position cannot carry the requested flow");

  FlowSolution split = min_cost_at(placed, target_flow);
  res.heuristic_flag =
      split.total_power() < best->total - 1e-7 * std::max(1.0, std::abs(best->total));
  if (res.heuristic_flag)
    res.diagnostics.push_back("a split allocation at the chosen point beats the single-path cost");

  res.relay = best->p;
  res.objective = best->total;
  res.branch = best->ring < 0 ? Branch::min_cost_center : Branch::min_cost_ring;
  res.ring_index = best->ring;
  res.pi_s = best->pi_s;
  res.pi_r = best->pi_r;
  res.source_power = best->ps;
  res.relay_power = best->pr;
  res.flow = std::move(split);
  return res;
}

DualityReport duality_check(const Scenario& sc, std::span<const double> target_flows) {
  if (!(sc.nu() > 0.0))
    throw Error(ErrorCode::invalid_scenario, "duality sweep needs a positive relay budget");
  const RateModel& m = sc.model();
  const Point s = sc.source();
  const double mu = sc.mu();

  DualityReport rep;
  rep.gamma = sc.nu() / mu;

  auto relay_for_ratio = [&](double ratio) {
    return max_flow_place(sc.with_powers(mu, ratio * mu)).relay;
  };

  // unit-cost center over the whole hull, no feasibility lens
  geom::PolygonDomain hull_dom(sc.node_hull());
  auto h_at = [&m](double d) { return m.h(std::max(d, kEpsGeo)); };
  auto unit = [&](Point p) {
    double worst = 0.0;
    for (const Point& t : sc.destinations())
      worst = std::max(worst, h_at(geom::distance(p, t)));
    return h_at(geom::distance(s, p)) + worst;
  };
  std::vector<Point> starts{s, sc.destinations().back(),
                            0.5 * (s + sc.destinations().back())};
  Point z_bar = geom::minimize_convex_2d(unit, hull_dom, starts).point;
  z_bar = polish_min_2d(unit, hull_dom, z_bar, 0.02 * scene_scale(sc),
                        [&sc](Point p, std::vector<Point>& out) {
                          farthest_tie_tangents(sc, p, out);
                        });
  double d_bar = geom::distance(s, z_bar);

  // the balanced-center distance shrinks as the relay budget grows, so a
  // log-scale bisection recovers the ratio that lands on z_bar
  double lo = rep.gamma * 1e-6, hi = rep.gamma * 1e6;
  double tol = 1e-9 * scene_scale(sc);
  double m_lo = geom::distance(s, relay_for_ratio(lo)) - d_bar;
  double m_hi = geom::distance(s, relay_for_ratio(hi)) - d_bar;
  if (m_lo >= -tol && m_hi <= tol) {
    for (int it = 0; it < 60; ++it) {
      double mid = std::sqrt(lo * hi);
      if (geom::distance(s, relay_for_ratio(mid)) - d_bar > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    rep.gamma_bar = std::sqrt(lo * hi);
    rep.gamma_bar_bracketed = true;
  } else {
    rep.gamma_bar = rep.gamma;
    rep.gamma_bar_bracketed = false;
  }

  for (double f : target_flows) {
    DualityEntry e;
    e.target_flow = f;
    Point z_f = f > 0.0 ? min_cost_place(sc, f).relay : z_bar;
    e.min_cost_relay = z_f;
    double d_f = geom::distance(s, z_f);

    double glo = std::min(rep.gamma_bar, rep.gamma);
    double ghi = std::max(rep.gamma_bar, rep.gamma);
    if (ghi / glo < 1.0 + 1e-12) {
      e.gamma_hat = rep.gamma;
    } else {
      for (int it = 0; it < 48; ++it) {
        double mid = std::sqrt(glo * ghi);
        if (geom::distance(s, relay_for_ratio(mid)) > d_f)
          glo = mid;
        else
          ghi = mid;
      }
      e.gamma_hat = std::sqrt(glo * ghi);
    }
    e.max_flow_relay = relay_for_ratio(e.gamma_hat);
    e.position_gap = geom::distance(e.max_flow_relay, z_f);
    e.matched = e.position_gap <= 1e-3;
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace relayopt
