#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace relayopt::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point p);
double distance(Point a, Point b);
bool points_coincide(Point a, Point b, double tol);

struct Segment {
  Point a;
  Point b;
  double length() const;
  Point point_at(double t) const;  // t in [0,1]
};

/// Infinite line through `point` with direction `dir` (not normalized).
struct Line {
  Point point;
  Point dir;
};

struct Circle {
  Point center;
  double radius = 0.0;
  bool contains(Point p, double tol) const;
};

Point closest_point_on_segment(Point p, Point a, Point b);

/// Locus of points equidistant from a and b. Throws DegenerateGeometry when
/// the two points coincide within kEpsGeo.
Line perpendicular_bisector(Point a, Point b);

/// Convex polygon stored as a counterclockwise, strictly convex vertex list.
/// Degenerate instances with one (point) or two (segment) vertices are valid.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point> ccw_vertices);
  const std::vector<Point>& vertices() const { return verts_; }
  bool degenerate() const { return verts_.size() < 3; }
  bool contains(Point p, double tol) const;
  Point project(Point p) const;
  double diameter() const;
  std::pair<Point, Point> bounding_box() const;

 private:
  std::vector<Point> verts_;
};

/// Minimal convex polygon containing every input point. Collinear inputs give
/// a two-vertex polygon, identical inputs a single vertex. Throws
/// InvalidScenario on an empty input.
ConvexPolygon convex_hull(std::span<const Point> points);

/// Closed convex feasible region: membership plus (approximate) nearest-point
/// projection, the two operations the optimization kernels need.
class ConvexDomain {
 public:
  virtual ~ConvexDomain() = default;
  virtual bool contains(Point p, double tol) const = 0;
  virtual Point project(Point p) const = 0;
};

class UnboundedDomain final : public ConvexDomain {
 public:
  bool contains(Point, double) const override { return true; }
  Point project(Point p) const override { return p; }
};

class DiskDomain final : public ConvexDomain {
 public:
  explicit DiskDomain(Circle c) : circle_(c) {}
  bool contains(Point p, double tol) const override { return circle_.contains(p, tol); }
  Point project(Point p) const override;
  const Circle& circle() const { return circle_; }

 private:
  Circle circle_;
};

class PolygonDomain final : public ConvexDomain {
 public:
  explicit PolygonDomain(ConvexPolygon poly) : poly_(std::move(poly)) {}
  bool contains(Point p, double tol) const override { return poly_.contains(p, tol); }
  Point project(Point p) const override { return poly_.project(p); }
  const ConvexPolygon& polygon() const { return poly_; }

 private:
  ConvexPolygon poly_;
};

/// Intersection of several convex domains; projection runs Dykstra's
/// alternating scheme, so it is approximate but deterministic.
class IntersectionDomain final : public ConvexDomain {
 public:
  explicit IntersectionDomain(std::vector<const ConvexDomain*> parts) : parts_(std::move(parts)) {}
  bool contains(Point p, double tol) const override;
  Point project(Point p) const override;

 private:
  std::vector<const ConvexDomain*> parts_;
};

/// Intersection of two closed disks. `empty()` means the disks are disjoint;
/// `corners()` holds the circle-circle crossing points when they exist.
class LensRegion final : public ConvexDomain {
 public:
  LensRegion(Circle a, Circle b);
  bool empty() const { return empty_; }
  const std::vector<Point>& corners() const { return corners_; }
  bool contains(Point p, double tol) const override;
  Point project(Point p) const override;
  const Circle& first() const { return a_; }
  const Circle& second() const { return b_; }

 private:
  Circle a_;
  Circle b_;
  bool empty_ = false;
  std::vector<Point> corners_;
};

LensRegion circle_intersection_region(Circle a, Circle b);

struct MinimaxResult {
  Point point;
  double value = 0.0;
};

/// Minimize max_i w_i * h(|p - a_i|) over the domain. `h` must be increasing
/// with h(0) >= 0. Deterministic: subgradient descent with a Polyak-style
/// step, exact equalization of the active anchor set, then a compass polish.
/// Anchor ties are broken toward the lowest index.
MinimaxResult weighted_minimax_point(std::span<const std::pair<Point, double>> anchors,
                                     const std::function<double(double)>& h,
                                     const ConvexDomain& domain);

MinimaxResult weighted_minimax_point(std::span<const std::pair<Point, double>> anchors,
                                     const std::function<double(double)>& h);

struct ScalarOptResult {
  double x = 0.0;
  double value = 0.0;
};

/// Maximize f on [lo, hi]. Unimodal objectives use golden-section directly
/// (interval shrunk below 1e-10); otherwise a dense pre-scan brackets the best
/// sample and golden-section refines around it. Endpoints are always probed.
ScalarOptResult maximize_on_segment(const std::function<double(double)>& f, double lo, double hi,
                                    bool unimodal, int dense_samples = 4096);

/// Minimize a (quasi)convex objective over a convex domain by multi-start
/// compass search. `starts` seeds the search; the domain projection keeps all
/// iterates feasible.
MinimaxResult minimize_convex_2d(const std::function<double(Point)>& f, const ConvexDomain& domain,
                                 std::span<const Point> starts);

}  // namespace relayopt::geom
