#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "relayopt/errors.hpp"
#include "relayopt/geometry.hpp"
#include "relayopt/tolerance.hpp"
#include "support/sec_oracle.hpp"

using namespace relayopt;
using geom::Point;

namespace {

// O(n^3) hull oracle: an edge (i,j) is on the hull iff every other point lies
// left of it. Returns the vertex set.
std::set<std::pair<double, double>> brute_hull_vertices(const std::vector<Point>& pts) {
  std::set<std::pair<double, double>> verts;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      Point e = pts[j] - pts[i];
      bool all_left = true;
      bool strict = false;
      for (size_t k = 0; k < pts.size(); ++k) {
        if (k == i || k == j) continue;
        double c = geom::cross(e, pts[k] - pts[i]);
        if (c < -1e-12) {
          all_left = false;
          break;
        }
        if (c > 1e-12) strict = true;
      }
      if (all_left && strict) {
        verts.insert({pts[i].x, pts[i].y});
        verts.insert({pts[j].x, pts[j].y});
      }
    }
  return verts;
}

}  // namespace

TEST_CASE("convex hull of a single point") {
  geom::ConvexPolygon h = geom::convex_hull(std::vector<Point>{{0.0, 0.0}});
  CHECK(h.vertices().size() == 1);
  CHECK(h.degenerate());
  CHECK(h.contains({0.0, 0.0}, 1e-9));
}

TEST_CASE("convex hull drops interior points") {
  std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}};
  geom::ConvexPolygon h = geom::convex_hull(pts);
  CHECK(h.vertices().size() == 3);
  for (const Point& p : pts) CHECK(h.contains(p, 1e-9));
}

TEST_CASE("convex hull of collinear points is a segment") {
  std::vector<Point> pts{{0, 0}, {1, 1}, {2, 2}, {0.5, 0.5}};
  geom::ConvexPolygon h = geom::convex_hull(pts);
  CHECK(h.degenerate());
  CHECK(h.vertices().size() == 2);
  for (const Point& p : pts) CHECK(h.contains(p, 1e-9));
}

TEST_CASE("convex hull rejects empty input") {
  CHECK_THROWS_AS(geom::convex_hull(std::vector<Point>{}), Error);
}

TEST_CASE("convex hull matches the brute-force edge oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts;
    int n = 5 + static_cast<int>(rng() % 96);
    for (int i = 0; i < n; ++i) pts.push_back({unit(rng), unit(rng)});
    geom::ConvexPolygon h = geom::convex_hull(pts);
    for (const Point& p : pts) CHECK(h.contains(p, 1e-9));

    auto expected = brute_hull_vertices(pts);
    std::set<std::pair<double, double>> got;
    for (const Point& v : h.vertices()) got.insert({v.x, v.y});
    CHECK(got == expected);
  }
}

TEST_CASE("convex hull is idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({unit(rng), unit(rng)});
    geom::ConvexPolygon h1 = geom::convex_hull(pts);
    geom::ConvexPolygon h2 = geom::convex_hull(h1.vertices());
    REQUIRE(h1.vertices().size() == h2.vertices().size());
    for (size_t i = 0; i < h1.vertices().size(); ++i) {
      CHECK(h1.vertices()[i].x == doctest::Approx(h2.vertices()[i].x).epsilon(1e-12));
      CHECK(h1.vertices()[i].y == doctest::Approx(h2.vertices()[i].y).epsilon(1e-12));
    }
  }
}

TEST_CASE("polygon membership honors the boundary tolerance") {
  geom::ConvexPolygon square(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(square.contains({0.5, 0.5}, 1e-9));
  CHECK_FALSE(square.contains({2.0, 0.0}, 1e-9));
  CHECK(square.contains({1.0 + 1e-12, 0.5}, 1e-9));
  CHECK_FALSE(square.contains({1.0 + 1e-6, 0.5}, 1e-9));
}

TEST_CASE("polygon projection lands inside and fixes interior points") {
  geom::ConvexPolygon square(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Point in = square.project({0.3, 0.4});
  CHECK(in.x == doctest::Approx(0.3));
  CHECK(in.y == doctest::Approx(0.4));
  Point out = square.project({2.0, 0.5});
  CHECK(out.x == doctest::Approx(1.0));
  CHECK(out.y == doctest::Approx(0.5));
  Point corner = square.project({-1.0, -2.0});
  CHECK(corner.x == doctest::Approx(0.0));
  CHECK(corner.y == doctest::Approx(0.0));
}

TEST_CASE("perpendicular bisector examples") {
  geom::Line v = geom::perpendicular_bisector({0, 0}, {2, 0});
  CHECK(v.point.x == doctest::Approx(1.0));
  CHECK(std::abs(v.dir.x) < 1e-12);

  geom::Line h = geom::perpendicular_bisector({0, 0}, {0, 2});
  CHECK(h.point.y == doctest::Approx(1.0));
  CHECK(std::abs(h.dir.y) < 1e-12);

  geom::Line d = geom::perpendicular_bisector({0, 0}, {2, 2});
  CHECK(d.point.x == doctest::Approx(1.0));
  CHECK(d.point.y == doctest::Approx(1.0));
  CHECK(std::abs(geom::dot(d.dir, Point{2, 2})) < 1e-9);

  CHECK_THROWS_AS(geom::perpendicular_bisector({1, 1}, {1, 1}), Error);
}

TEST_CASE("bisector points are equidistant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Point a{unit(rng), unit(rng)}, b{unit(rng), unit(rng)};
    if (geom::distance(a, b) < 1e-3) continue;
    geom::Line l = geom::perpendicular_bisector(a, b);
    for (double t : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
      Point p = l.point + t * l.dir;
      CHECK(geom::distance(p, a) == doctest::Approx(geom::distance(p, b)).epsilon(1e-9));
    }
  }
}

TEST_CASE("weighted minimax: symmetric midpoint") {
  std::vector<std::pair<Point, double>> anchors{{{0, 0}, 1.0}, {{2, 0}, 1.0}};
  auto h = [](double d) { return d * d; };
  geom::MinimaxResult r = geom::weighted_minimax_point(anchors, h);
  CHECK(r.point.x == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(r.point.y) < 1e-6);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("weighted minimax equals the smallest enclosing circle") {
  std::vector<std::pair<Point, double>> anchors{{{0, 0}, 1.0}, {{0, 1}, 1.0}, {{4, 0}, 1.0}};
  auto h = [](double d) { return d * d; };
  geom::MinimaxResult r = geom::weighted_minimax_point(anchors, h);
  testsupport::SecCircle sec =
      testsupport::smallest_enclosing_circle({{0, 0}, {0, 1}, {4, 0}});
  CHECK(geom::distance(r.point, sec.center) < 1e-6);
  CHECK(r.value == doctest::Approx(sec.radius * sec.radius).epsilon(1e-6));
}

TEST_CASE("weighted minimax balances unequal weights on the segment") {
  std::vector<std::pair<Point, double>> anchors{{{0, 0}, 4.0}, {{2, 0}, 1.0}};
  auto h = [](double d) { return d * d; };
  geom::MinimaxResult r = geom::weighted_minimax_point(anchors, h);
  CHECK(r.point.x == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(std::abs(r.point.y) < 1e-6);
  CHECK(r.value == doctest::Approx(16.0 / 9.0).epsilon(1e-7));

  // independent 1-D oracle along the segment
  auto seg_val = [&](double x) {
    double da = x, db = 2.0 - x;
    return -std::max(4.0 * da * da, db * db);
  };
  geom::ScalarOptResult o = geom::maximize_on_segment(seg_val, 0.0, 2.0, true);
  CHECK(-o.value == doctest::Approx(r.value).epsilon(1e-8));
}

TEST_CASE("weighted minimax matches Welzl on random equal-weight sets") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto h = [](double d) { return d * d; };
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    std::vector<Point> pts;
    std::vector<std::pair<Point, double>> anchors;
    for (int i = 0; i < n; ++i) {
      Point p{unit(rng), unit(rng)};
      pts.push_back(p);
      anchors.emplace_back(p, 1.0);
    }
    geom::MinimaxResult r = geom::weighted_minimax_point(anchors, h);
    testsupport::SecCircle sec = testsupport::smallest_enclosing_circle(pts, 99 + trial);
    CHECK(geom::distance(r.point, sec.center) < 1e-6);
    CHECK(std::abs(r.value - sec.radius * sec.radius) < 1e-6);
  }
}

TEST_CASE("weighted minimax honors the domain") {
  // anchor center lies outside the disk: solution must sit on its boundary
  std::vector<std::pair<Point, double>> anchors{{{4, 0}, 1.0}};
  auto h = [](double d) { return d; };
  geom::DiskDomain disk(geom::Circle{{0, 0}, 1.0});
  geom::MinimaxResult r = geom::weighted_minimax_point(anchors, h, disk);
  CHECK(r.point.x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(r.point.y) < 1e-5);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("minimax subgradient certificate on random instances") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto h = [](double d) { return d * d; };
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    std::vector<std::pair<Point, double>> anchors;
    for (int i = 0; i < n; ++i)
      anchors.emplace_back(Point{unit(rng), unit(rng)}, 0.5 + 4.0 * unit(rng));
    geom::MinimaxResult r = geom::weighted_minimax_point(anchors, h);

    // either one anchor attains the max and the point sits on it, or at least
    // two anchors are equalized within 1e-7 relative
    double best = 0.0;
    for (const auto& [a, w] : anchors) {
      double v = w * h(geom::distance(r.point, a));
      best = std::max(best, v);
    }
    int active = 0;
    bool at_anchor = false;
    for (const auto& [a, w] : anchors) {
      double v = w * h(geom::distance(r.point, a));
      if (v >= best - 1e-7 * std::max(1.0, best)) {
        ++active;
        if (geom::distance(r.point, a) < 1e-6) at_anchor = true;
      }
    }
    CHECK((active >= 2 || at_anchor));

    // unbeatable by small probes (first-order optimality)
    for (int k = 0; k < 12; ++k) {
      double ang = 2.0 * 3.14159265358979 * k / 12;
      Point q = r.point + 1e-5 * Point{std::cos(ang), std::sin(ang)};
      double vq = 0.0;
      for (const auto& [a, w] : anchors) vq = std::max(vq, w * h(geom::distance(q, a)));
      CHECK(vq >= r.value - 1e-9);
    }
  }
}

TEST_CASE("circle intersection region basics") {
  geom::LensRegion empty = geom::circle_intersection_region({{0, 0}, 1.0}, {{3, 0}, 1.0});
  CHECK(empty.empty());

  geom::LensRegion same = geom::circle_intersection_region({{0, 0}, 1.0}, {{0, 0}, 1.0});
  CHECK_FALSE(same.empty());
  CHECK(same.contains({0, 0}, 1e-9));
  CHECK(same.contains({0.999999, 0}, 1e-6));
  CHECK_FALSE(same.contains({1.1, 0}, 1e-9));

  geom::LensRegion lens = geom::circle_intersection_region({{0, 0}, 1.0}, {{1, 0}, 1.0});
  CHECK_FALSE(lens.empty());
  CHECK(lens.contains({0.5, 0}, 1e-9));
  CHECK_FALSE(lens.contains({0, 0.9}, 1e-9));
  REQUIRE(lens.corners().size() == 2);
  for (const Point& c : lens.corners()) {
    CHECK(geom::distance(c, {0, 0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(geom::distance(c, {1, 0}) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("lens projection returns member points") {
  geom::LensRegion lens = geom::circle_intersection_region({{0, 0}, 1.0}, {{1, 0}, 1.0});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-2.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Point p{unit(rng), unit(rng)};
    Point q = lens.project(p);
    CHECK(lens.contains(q, 1e-6));
    if (lens.contains(p, 1e-9)) {
      CHECK(geom::distance(p, q) < 1e-9);
    }
  }
}

TEST_CASE("intersection domain projection is feasible and near-optimal") {
  geom::DiskDomain d1(geom::Circle{{0, 0}, 1.0});
  geom::DiskDomain d2(geom::Circle{{1, 0}, 1.0});
  std::vector<const geom::ConvexDomain*> parts{&d1, &d2};
  geom::IntersectionDomain dom(parts);
  geom::LensRegion lens = geom::circle_intersection_region({{0, 0}, 1.0}, {{1, 0}, 1.0});
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(-2.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    Point p{unit(rng), unit(rng)};
    Point q = dom.project(p);
    CHECK(lens.contains(q, 1e-5));
    Point exact = lens.project(p);
    CHECK(geom::distance(p, q) <= geom::distance(p, exact) + 1e-5);
  }
}

TEST_CASE("maximize_on_segment examples") {
  auto f1 = [](double x) { return -(x - 0.3) * (x - 0.3); };
  geom::ScalarOptResult r1 = geom::maximize_on_segment(f1, 0.0, 1.0, true);
  CHECK(r1.x == doctest::Approx(0.3).epsilon(1e-8));

  auto f2 = [](double x) { return x; };
  geom::ScalarOptResult r2 = geom::maximize_on_segment(f2, 0.0, 1.0, false);
  CHECK(r2.x == doctest::Approx(1.0));
  CHECK(r2.value == doctest::Approx(1.0));
}

TEST_CASE("maximize_on_segment matches a dense scan on a wiggly function") {
  auto f = [](double x) { return std::sin(5.0 * x) + 0.3 * std::cos(17.0 * x) - 0.05 * x * x; };
  geom::ScalarOptResult r = geom::maximize_on_segment(f, -3.0, 4.0, false);
  double best = -1e300;
  for (int i = 0; i <= 1000000; ++i) {
    double x = -3.0 + 7.0 * i / 1000000.0;
    best = std::max(best, f(x));
  }
  CHECK(r.value == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("minimize_convex_2d finds constrained quadratic minima") {
  auto f = [](Point p) { return (p.x - 2.0) * (p.x - 2.0) + (p.y - 0.5) * (p.y - 0.5); };
  geom::ConvexPolygon square(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  geom::PolygonDomain dom(square);
  std::vector<Point> starts{{0.1, 0.1}, {0.9, 0.9}};
  geom::MinimaxResult r = geom::minimize_convex_2d(f, dom, starts);
  CHECK(r.point.x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.point.y == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("closest point on segment") {
  Point q = geom::closest_point_on_segment({0.5, 2.0}, {0, 0}, {1, 0});
  CHECK(q.x == doctest::Approx(0.5));
  CHECK(q.y == doctest::Approx(0.0));
  Point e = geom::closest_point_on_segment({-1.0, 1.0}, {0, 0}, {1, 0});
  CHECK(e.x == doctest::Approx(0.0));
  CHECK(e.y == doctest::Approx(0.0));
}
