#include "relayopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relayopt/errors.hpp"
#include "relayopt/tolerance.hpp"

namespace relayopt::geom {

double norm(Point p) { return std::hypot(p.x, p.y); }

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool points_coincide(Point a, Point b, double tol) { return distance(a, b) <= tol; }

double Segment::length() const { return distance(a, b); }

Point Segment::point_at(double t) const { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

bool Circle::contains(Point p, double tol) const { return distance(center, p) <= radius + tol; }

Point closest_point_on_segment(Point p, Point a, Point b) {
  Point ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + t * ab;
}

Line perpendicular_bisector(Point a, Point b) {
  if (points_coincide(a, b, kEpsGeo))
    throw Error(ErrorCode::degenerate_geometry, "perpendicular bisector of coincident points");
  Point mid = 0.5 * (a + b);
  Point d = b - a;
  return Line{mid, Point{-d.y, d.x}};
}

ConvexPolygon::ConvexPolygon(std::vector<Point> ccw_vertices) : verts_(std::move(ccw_vertices)) {
  if (verts_.empty()) throw Error(ErrorCode::invalid_scenario, "polygon needs at least one vertex");
}

bool ConvexPolygon::contains(Point p, double tol) const {
  if (verts_.size() == 1) return distance(p, verts_[0]) <= tol;
  if (verts_.size() == 2)
    return distance(p, closest_point_on_segment(p, verts_[0], verts_[1])) <= tol;
  for (size_t i = 0; i < verts_.size(); ++i) {
    Point a = verts_[i];
    Point b = verts_[(i + 1) % verts_.size()];
    Point e = b - a;
    double len = norm(e);
    if (cross(e, p - a) < -tol * len) return false;
  }
  return true;
}

Point ConvexPolygon::project(Point p) const {
  if (verts_.size() == 1) return verts_[0];
  if (verts_.size() == 2) return closest_point_on_segment(p, verts_[0], verts_[1]);
  if (contains(p, 0.0)) return p;
  Point best = verts_[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < verts_.size(); ++i) {
    Point q = closest_point_on_segment(p, verts_[i], verts_[(i + 1) % verts_.size()]);
    double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

double ConvexPolygon::diameter() const {
  double best = 0.0;
  for (size_t i = 0; i < verts_.size(); ++i)
    for (size_t j = i + 1; j < verts_.size(); ++j)
      best = std::max(best, distance(verts_[i], verts_[j]));
  return best;
}

std::pair<Point, Point> ConvexPolygon::bounding_box() const {
  Point lo = verts_[0], hi = verts_[0];
  for (const Point& v : verts_) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
  return {lo, hi};
}

ConvexPolygon convex_hull(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::invalid_scenario, "convex hull of empty point set");
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Point a, Point b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() == 1) return ConvexPolygon({pts[0]});

  // Monotone chain; the <= pop drops collinear interior points so the result
  // is strictly convex.
  auto build = [&](auto begin, auto end) {
    std::vector<Point> chain;
    for (auto it = begin; it != end; ++it) {
      while (chain.size() >= 2 &&
             cross(chain.back() - chain[chain.size() - 2], *it - chain[chain.size() - 2]) <= 0.0)
        chain.pop_back();
      chain.push_back(*it);
    }
    return chain;
  };
  std::vector<Point> lower = build(pts.begin(), pts.end());
  std::vector<Point> upper = build(pts.rbegin(), pts.rend());
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  if (lower.size() < 2) {
    // All input points collinear: keep the two extremes.
    return ConvexPolygon({pts.front(), pts.back()});
  }
  return ConvexPolygon(std::move(lower));
}

Point DiskDomain::project(Point p) const {
  Point d = p - circle_.center;
  double n = norm(d);
  if (n <= circle_.radius) return p;
  double s = circle_.radius / n;
  return circle_.center + s * d;
}

bool IntersectionDomain::contains(Point p, double tol) const {
  for (const ConvexDomain* d : parts_)
    if (!d->contains(p, tol)) return false;
  return true;
}

Point IntersectionDomain::project(Point p) const {
  if (contains(p, 0.0)) return p;
  // Dykstra's alternating projections onto the member sets.
  Point x = p;
  std::vector<Point> corr(parts_.size(), Point{0.0, 0.0});
  for (int iter = 0; iter < 120; ++iter) {
    Point prev = x;
    for (size_t i = 0; i < parts_.size(); ++i) {
      Point y = x + corr[i];
      Point z = parts_[i]->project(y);
      corr[i] = y - z;
      x = z;
    }
    if (distance(prev, x) < 1e-14) break;
  }
  return x;
}

LensRegion::LensRegion(Circle a, Circle b) : a_(a), b_(b) {
  double d = distance(a.center, b.center);
  if (d > a.radius + b.radius) {
    empty_ = true;
    return;
  }
  if (d + std::min(a.radius, b.radius) <= std::max(a.radius, b.radius) || d == 0.0)
    return;  // one disk inside the other: no boundary crossings
  double alpha = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
  double h2 = a.radius * a.radius - alpha * alpha;
  if (h2 <= 0.0) {
    if (h2 > -kEpsGeo) {
      Point u = (1.0 / d) * (b.center - a.center);
      corners_.push_back(a.center + alpha * u);
    }
    return;
  }
  double h = std::sqrt(h2);
  Point u = (1.0 / d) * (b.center - a.center);
  Point nvec{-u.y, u.x};
  Point base = a.center + alpha * u;
  corners_.push_back(base + h * nvec);
  corners_.push_back(base - h * nvec);
}

bool LensRegion::contains(Point p, double tol) const {
  if (empty_) return false;
  return a_.contains(p, tol) && b_.contains(p, tol);
}

Point LensRegion::project(Point p) const {
  if (empty_) throw Error(ErrorCode::internal_consistency, "projection onto empty region");
  if (contains(p, 0.0)) return p;
  DiskDomain da(a_), db(b_);
  Point pa = da.project(p);
  if (b_.contains(pa, kEpsGeo)) return pa;
  Point pb = db.project(p);
  if (a_.contains(pb, kEpsGeo)) return pb;
  Point best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (const Point& c : corners_) {
    double d = distance(p, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (corners_.empty()) return pa;  // numerical fringe: disks nearly tangent
  return best;
}

LensRegion circle_intersection_region(Circle a, Circle b) { return LensRegion(a, b); }

namespace {

double eval_minimax(std::span<const std::pair<Point, double>> anchors,
                    const std::function<double(double)>& h, Point p, int* argmax = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (size_t i = 0; i < anchors.size(); ++i) {
    double v = anchors[i].second * h(distance(p, anchors[i].first));
    if (v > best) {
      best = v;
      arg = static_cast<int>(i);
    }
  }
  if (argmax) *argmax = arg;
  return best;
}

double numeric_h_derivative(const std::function<double(double)>& h, double d) {
  double e = std::max(1e-7 * std::max(1.0, d), 1e-10);
  double lo = std::max(d - e, 0.0);
  return (h(d + e) - h(lo)) / (d + e - lo);
}

double anchor_scale(std::span<const std::pair<Point, double>> anchors) {
  double s = 1.0;
  for (size_t i = 0; i < anchors.size(); ++i)
    for (size_t j = i + 1; j < anchors.size(); ++j)
      s = std::max(s, distance(anchors[i].first, anchors[j].first));
  return s;
}

/// Compass search with shrinking steps; keeps iterates inside the domain.
void compass_polish(const std::function<double(Point)>& f, const ConvexDomain& domain, Point& p,
                    double& fp, double start_step, double min_step) {
  static const double dirs[16][2] = {
      {1, 0},          {-1, 0},         {0, 1},          {0, -1},
      {0.7071, 0.7071}, {0.7071, -0.7071}, {-0.7071, 0.7071}, {-0.7071, -0.7071},
      {0.9239, 0.3827}, {0.3827, 0.9239}, {-0.3827, 0.9239}, {-0.9239, 0.3827},
      {-0.9239, -0.3827}, {-0.3827, -0.9239}, {0.3827, -0.9239}, {0.9239, -0.3827}};
  double step = start_step;
  while (step > min_step) {
    bool improved = false;
    for (const auto& d : dirs) {
      Point q = domain.project(Point{p.x + step * d[0], p.y + step * d[1]});
      double fq = f(q);
      if (fq < fp - 1e-18) {
        p = q;
        fp = fq;
        improved = true;
      }
    }
    if (!improved) step *= 0.55;
  }
}

}  // namespace

MinimaxResult weighted_minimax_point(std::span<const std::pair<Point, double>> anchors,
                                     const std::function<double(double)>& h,
                                     const ConvexDomain& domain) {
  if (anchors.empty()) throw Error(ErrorCode::invalid_scenario, "minimax over empty anchor set");
  auto objective = [&](Point p) { return eval_minimax(anchors, h, p); };

  if (anchors.size() == 1) {
    Point p = domain.project(anchors[0].first);
    return {p, objective(p)};
  }

  double scale = anchor_scale(anchors);

  Point p{0.0, 0.0};
  for (const auto& a : anchors) p = p + a.first;
  p = (1.0 / static_cast<double>(anchors.size())) * p;
  p = domain.project(p);
  double fp = objective(p);
  Point best_p = p;
  double best_f = fp;

  // Subgradient phase with a Polyak-style step built from a shrinking target.
  double target_gap = 0.25 * std::max(best_f, 1e-12);
  for (int k = 0; k < 1200; ++k) {
    int arg = 0;
    double f = eval_minimax(anchors, h, p, &arg);
    if (f < best_f) {
      best_f = f;
      best_p = p;
    }
    const auto& [ap, w] = anchors[arg];
    double d = distance(p, ap);
    if (d < 1e-15) break;
    double hp = numeric_h_derivative(h, d);
    Point g = (w * hp / d) * (p - ap);
    double gn2 = dot(g, g);
    if (gn2 < 1e-30) break;
    double step = (f - (best_f - target_gap)) / gn2;
    p = domain.project(p - step * g);
    if (k % 60 == 59) target_gap *= 0.5;
  }
  p = best_p;
  fp = best_f;

  // Exact equalization over the near-active anchor set (pairs and triples).
  std::vector<int> active;
  for (size_t i = 0; i < anchors.size(); ++i) {
    double v = anchors[i].second * h(distance(p, anchors[i].first));
    if (v >= best_f * (1.0 - 1e-5) - 1e-12) active.push_back(static_cast<int>(i));
  }
  auto consider = [&](Point cand) {
    Point q = domain.project(cand);
    double fq = objective(q);
    if (fq < best_f) {
      best_f = fq;
      best_p = q;
    }
  };
  for (int i : active) consider(anchors[i].first);
  for (size_t ii = 0; ii < active.size(); ++ii) {
    for (size_t jj = ii + 1; jj < active.size(); ++jj) {
      const auto& [ai, wi] = anchors[active[ii]];
      const auto& [aj, wj] = anchors[active[jj]];
      double dij = distance(ai, aj);
      if (dij < 1e-15) continue;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 120; ++it) {
        double mid = 0.5 * (lo + hi);
        double fi = wi * h(mid * dij);
        double fj = wj * h((1.0 - mid) * dij);
        if (fi < fj)
          lo = mid;
        else
          hi = mid;
      }
      double t = 0.5 * (lo + hi);
      consider(ai + t * (aj - ai));
    }
  }
  if (active.size() >= 3) {
    for (size_t ii = 0; ii < active.size(); ++ii)
      for (size_t jj = ii + 1; jj < active.size(); ++jj)
        for (size_t kk = jj + 1; kk < active.size(); ++kk) {
          const auto& [ai, wi] = anchors[active[ii]];
          const auto& [aj, wj] = anchors[active[jj]];
          const auto& [ak, wk] = anchors[active[kk]];
          Point q = best_p;
          bool ok = true;
          for (int it = 0; it < 80; ++it) {
            auto val = [&](Point z, const Point& a, double w) { return w * h(distance(z, a)); };
            double f1 = val(q, ai, wi) - val(q, aj, wj);
            double f2 = val(q, ai, wi) - val(q, ak, wk);
            double e = 1e-7 * std::max(1.0, scale);
            Point qx{q.x + e, q.y}, qy{q.x, q.y + e};
            double j11 = (val(qx, ai, wi) - val(qx, aj, wj) - f1) / e;
            double j12 = (val(qy, ai, wi) - val(qy, aj, wj) - f1) / e;
            double j21 = (val(qx, ai, wi) - val(qx, ak, wk) - f2) / e;
            double j22 = (val(qy, ai, wi) - val(qy, ak, wk) - f2) / e;
            double det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-18) {
              ok = false;
              break;
            }
            double dx = (-f1 * j22 + f2 * j12) / det;
            double dy = (-j11 * f2 + j21 * f1) / det;
            q = Point{q.x + dx, q.y + dy};
            if (std::abs(dx) + std::abs(dy) < 1e-15 * std::max(1.0, scale)) break;
            if (!(std::isfinite(q.x) && std::isfinite(q.y))) {
              ok = false;
              break;
            }
          }
          if (ok) consider(q);
        }
  }

  compass_polish(objective, domain, best_p, best_f, 0.25 * scale, 1e-13 * scale);
  return {best_p, best_f};
}

MinimaxResult weighted_minimax_point(std::span<const std::pair<Point, double>> anchors,
                                     const std::function<double(double)>& h) {
  UnboundedDomain dom;
  return weighted_minimax_point(anchors, h, dom);
}

ScalarOptResult maximize_on_segment(const std::function<double(double)>& f, double lo, double hi,
                                    bool unimodal, int dense_samples) {
  if (hi < lo) std::swap(lo, hi);
  const double inv_phi = 0.6180339887498949;
  auto golden = [&](double a, double b) {
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-10) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = f(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = f(x1);
      }
    }
    double m = 0.5 * (a + b);
    return ScalarOptResult{m, f(m)};
  };

  ScalarOptResult best{lo, f(lo)};
  double fhi = f(hi);
  if (fhi > best.value) best = {hi, fhi};
  if (hi - lo < 1e-15) return best;

  if (unimodal) {
    ScalarOptResult g = golden(lo, hi);
    if (g.value > best.value) best = g;
    return best;
  }

  int n = std::max(dense_samples, 3);
  int best_i = 0;
  std::vector<double> vals(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    vals[static_cast<size_t>(i)] = f(x);
    if (vals[static_cast<size_t>(i)] > vals[static_cast<size_t>(best_i)]) best_i = i;
  }
  double a = lo + (hi - lo) * static_cast<double>(std::max(best_i - 1, 0)) / (n - 1);
  double b = lo + (hi - lo) * static_cast<double>(std::min(best_i + 1, n - 1)) / (n - 1);
  ScalarOptResult g = golden(a, b);
  if (vals[static_cast<size_t>(best_i)] > g.value)
    g = {lo + (hi - lo) * static_cast<double>(best_i) / (n - 1), vals[static_cast<size_t>(best_i)]};
  if (g.value > best.value) best = g;
  return best;
}

MinimaxResult minimize_convex_2d(const std::function<double(Point)>& f, const ConvexDomain& domain,
                                 std::span<const Point> starts) {
  if (starts.empty()) throw Error(ErrorCode::invalid_scenario, "minimize_convex_2d needs a start");
  double scale = 1.0;
  for (size_t i = 0; i < starts.size(); ++i)
    for (size_t j = i + 1; j < starts.size(); ++j)
      scale = std::max(scale, distance(starts[i], starts[j]));

  Point best_p = domain.project(starts[0]);
  double best_f = f(best_p);
  for (const Point& s : starts) {
    Point p = domain.project(s);
    double fp = f(p);
    compass_polish(f, domain, p, fp, 0.5 * scale, 1e-12 * scale);
    if (fp < best_f) {
      best_f = fp;
      best_p = p;
    }
  }
  compass_polish(f, domain, best_p, best_f, 1e-4 * scale, 1e-13 * scale);
  return {best_p, best_f};
}

}  // namespace relayopt::geom
