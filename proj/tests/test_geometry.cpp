#include <doctest.h>

#include <algorithm>
#include <random>

#include "skein/error.hpp"
#include "skein/geometry.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace skein;

namespace {

ChromatinModel pts_model(std::vector<Vec3> pts, std::vector<Part> parts = {}) {
  return ChromatinModel("g", std::move(pts), std::move(parts), 1);
}

// Catmull-Rom in its textbook basis-matrix form, for comparison with the Bezier split.
Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (3.0 * p1 - p0 - 3.0 * p2 + p3) * t3);
}

}  // namespace

TEST_CASE("tukey hinges") {
  const std::vector<double> even{4, 1, 3, 2};
  auto h = tukey_hinges(even);
  CHECK(h.q1 == 1.5);
  CHECK(h.median == 2.5);
  CHECK(h.q3 == 3.5);
  const std::vector<double> odd{1, 2, 3, 4, 5};
  h = tukey_hinges(odd);
  CHECK(h.q1 == 2.0);
  CHECK(h.median == 3.0);
  CHECK(h.q3 == 4.0);
  const std::vector<double> one{7};
  h = tukey_hinges(one);
  CHECK((h.q1 == 7.0 && h.q3 == 7.0));
}

TEST_CASE("radius rule: hand cases") {
  const std::vector<double> uniform{1, 1, 1, 1};
  auto r = estimate_tube_radius(uniform);
  CHECK(r.lower == 0.5);
  CHECK(r.default_radius == 0.5);
  CHECK(r.upper == 0.5);

  const std::vector<double> steps{2, 2, 4, 4};
  r = estimate_tube_radius(steps);
  // unclamped default 0.5 * (2 + 4) / 2 = 1.5, capped at half the smallest spacing
  CHECK(r.default_radius == 1.0);
  CHECK(r.upper == 0.5 * (4 + 1.5 * 2));
  CHECK(r.lower == 0.5 * 0.1 * 2);  // Q1 - 1.5 IQR = -1 falls to the floor

  CHECK_THROWS_AS(estimate_tube_radius(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(estimate_tube_radius(std::vector<double>{1, 0}), InvalidArgument);
}

TEST_CASE("radius rule: ordering, min-spacing cap and scale equivariance") {
  std::mt19937_64 rng(21);
  std::lognormal_distribution<double> spacing(0.0, 0.6);
  std::uniform_real_distribution<double> scale_exp(-6.0, 6.0);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> s(1 + rng() % 60);
    for (auto& v : s) v = spacing(rng);
    const auto r = estimate_tube_radius(s);
    const double smallest = *std::min_element(s.begin(), s.end());
    REQUIRE(r.default_radius <= 0.5 * smallest);
    REQUIRE(r.lower > 0.0);
    REQUIRE(r.lower <= r.default_radius);
    REQUIRE(r.default_radius <= r.upper);

    if (trial < 100) {
      // powers of two keep the scaled problem exactly representable
      const double k = std::exp2(std::round(scale_exp(rng)));
      std::vector<double> scaled(s);
      for (auto& v : scaled) v *= k;
      const auto rs = estimate_tube_radius(scaled);
      CHECK(rs.lower == r.lower * k);
      CHECK(rs.default_radius == r.default_radius * k);
      CHECK(rs.upper == r.upper * k);
    }
  }
}

TEST_CASE("build_spheres") {
  const auto m = pts_model({{0, 0, 0}, {1, 2, 3}, {4, 5, 6}});
  const auto prims = build_spheres(m, 0.25);
  REQUIRE(prims.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(prims[i].bin_id == i);
    CHECK(std::get<Sphere>(prims[i].shape).center == m.bin(i));
    CHECK(std::get<Sphere>(prims[i].shape).radius == 0.25);
  }
  CHECK_THROWS_AS(build_spheres(m, 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_spheres(m, -1.0), InvalidArgument);
}

TEST_CASE("build_straight_tube") {
  const auto line = pts_model({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  auto prims = build_straight_tube(line, 0.1);
  REQUIRE(prims.size() == 2);
  CHECK(std::get<RoundedCone>(prims[0].shape).p1 == std::get<RoundedCone>(prims[1].shape).p0);
  CHECK(prims[0].bin_id == 0);
  CHECK(prims[1].bin_id == 1);

  const auto split = pts_model({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}}, {{"a", {0, 1}, 0}, {"b", {2, 3}, 0}});
  prims = build_straight_tube(split, 0.1);
  REQUIRE(prims.size() == 2);
  CHECK(prims[1].bin_id == 2);

  const auto lone = pts_model({{0, 0, 0}, {1, 0, 0}, {5, 0, 0}}, {{"a", {0, 1}, 0}, {"b", {2, 2}, 0}});
  prims = build_straight_tube(lone, 0.1);
  REQUIRE(prims.size() == 2);
  CHECK(std::holds_alternative<Sphere>(prims[1].shape));
  CHECK(prims[1].bin_id == 2);
}

TEST_CASE("straight tube union is continuous across joints") {
  const auto m = synth::globule(40, 1, 3);
  const double radius = 0.3;
  const auto prims = build_straight_tube(m, radius);
  auto sdf = [&](const Vec3& p) {
    double d = oracle::kInf;
    for (const auto& pr : prims) d = std::min(d, oracle::rounded_cone_sdf(std::get<RoundedCone>(pr.shape), p));
    return d;
  };
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (BinIndex j = 1; j + 1 < m.size(); ++j) {
    for (int k = 0; k < 4; ++k) {
      const Vec3 dir = normalized({n01(rng), n01(rng), n01(rng)});
      const Vec3 p = m.bin(j) + dir * radius;
      // the shared joint sphere makes every point of its surface lie on the union's
      // boundary or inside it
      CHECK(sdf(p) <= 1e-9);
      const double h = 1e-4;
      const Vec3 q = p + normalized({n01(rng), n01(rng), n01(rng)}) * h;
      CHECK(std::abs(sdf(q) - sdf(p)) <= h * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("approximate_spline: two points give a straight segment") {
  const std::vector<Vec3> pts{{0, 0, 0}, {2, 0, 0}};
  const auto s = approximate_spline(pts);
  REQUIRE(s.segments.size() == 1);
  CHECK(s.segments[0].curve.b1 == Vec3{1, 0, 0});
  CHECK_THROWS_AS(approximate_spline(std::vector<Vec3>{{1, 1, 1}, {1, 1, 1}}), InvalidArgument);
}

TEST_CASE("approximate_spline: collinear input stays on the line") {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 1, 1}, {3, 3, 3}, {3.5, 3.5, 3.5}, {7, 7, 7}};
  const auto s = approximate_spline(pts);
  CHECK(s.segments.size() == 8);
  const Vec3 axis = normalized({1, 1, 1});
  for (const auto& seg : s.segments)
    for (int i = 0; i <= 20; ++i) CHECK(length(cross(seg.curve.at(i / 20.0), axis)) < 1e-12);
}

TEST_CASE("approximate_spline: C1 joints, interpolation, duplicates") {
  std::vector<Vec3> pts;
  const auto m = synth::globule(200, 1, 9);
  for (const auto& p : m.bins()) pts.push_back(p);
  pts.insert(pts.begin() + 50, pts[50]);  // a duplicate to collapse
  const auto s = approximate_spline(pts);
  CHECK(s.collapsed_points == 1);
  REQUIRE(s.segments.size() == 2 * (pts.size() - 2));
  for (std::size_t i = 0; i + 1 < s.segments.size(); ++i) {
    const auto& a = s.segments[i].curve;
    const auto& b = s.segments[i + 1].curve;
    CHECK(a.b2 == b.b0);
    const Vec3 tin = normalized(a.tangent(1.0));
    const Vec3 tout = normalized(b.tangent(0.0));
    CHECK(length(cross(tout, tin)) < 1e-9);
    CHECK(dot(tout, tin) > 0.0);
  }
  // Every input point is an endpoint of some segment.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = oracle::kInf;
    for (const auto& seg : s.segments)
      best = std::min({best, distance(seg.curve.b0, pts[i]), distance(seg.curve.b2, pts[i])});
    CHECK(best == 0.0);
  }
}

TEST_CASE("approximate_spline: deviation from the cubic it replaces") {
  // Regression bound, measured on unit-step random walks: the two quadratics stay within
  // 0.02 step lengths of the Catmull-Rom cubic (observed maximum about 0.016).
  constexpr double kTauSpline = 0.02;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = synth::globule(60, 1, seed);
    const auto pts = m.bins();
    const auto s = approximate_spline(pts);
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Vec3 p0 = i > 0 ? pts[i - 1] : 2.0 * pts[0] - pts[1];
      const Vec3 p3 = i + 2 < n ? pts[i + 2] : 2.0 * pts[n - 1] - pts[n - 2];
      const auto& qa = s.segments[2 * i].curve;
      const auto& qb = s.segments[2 * i + 1].curve;
      for (int k = 0; k <= 200; ++k) {
        const Vec3 c = catmull_rom(p0, pts[i], pts[i + 1], p3, k / 200.0);
        double best = oracle::kInf;
        for (int j = 0; j <= 400; ++j) {
          best = std::min(best, distance(c, qa.at(j / 400.0)));
          best = std::min(best, distance(c, qb.at(j / 400.0)));
        }
        worst = std::max(worst, best);
      }
    }
  }
  MESSAGE("max spline deviation: " << worst);
  CHECK(worst < kTauSpline);
}

TEST_CASE("build_smooth_tube bookkeeping") {
  const auto m = synth::globule(30, 2, 4);
  const auto prims = build_smooth_tube(m, 0.2);
  CHECK(prims.size() == 2 * (15 - 1) * 2);
  BinIndex last = 0;
  for (const auto& p : prims) {
    CHECK(std::holds_alternative<QuadSwept>(p.shape));
    CHECK(p.bin_id < m.size());
    CHECK(p.bin_id >= last);
    last = p.bin_id;
  }

  const std::vector<Vec3> two{{0, 0, 0}, {1, 0, 0}};
  const auto s = approximate_spline(two);
  const std::vector<BinIndex> bins{7, 8};
  const auto one = build_smooth_tube(s.segments, 0.1, bins);
  REQUIRE(one.size() == 1);
  CHECK(one[0].bin_id == 7);
  CHECK_THROWS_AS(build_smooth_tube(s.segments, 0.0, bins), InvalidArgument);
}

TEST_CASE("builders are pure") {
  const auto m = synth::globule(100, 3, 2);
  for (auto kind : {Representation::spheres, Representation::straight_tube, Representation::smooth_tube}) {
    const auto a = build_representation(m, kind, 0.3);
    const auto b = build_representation(m, kind, 0.3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].bin_id == b[i].bin_id);
      const auto ba = bounds(a[i].shape), bb = bounds(b[i].shape);
      CHECK((ba.lo == bb.lo && ba.hi == bb.hi));
    }
    CHECK(parse_representation(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_representation("ribbons"), InvalidArgument);
}
