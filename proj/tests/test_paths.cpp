#include <cmath>

#include <gtest/gtest.h>

#include "kobacore/metric.hpp"
#include "kobacore/paths.hpp"
#include "kobacore/random.hpp"

using namespace kobacore;
using namespace kobacore::paths;
using domains::make_ball;

namespace {

const Complex I(0.0, 1.0);

DistanceFn exact_on(const domains::DomainOracle& dom) {
  return [dom](const Point& a, const Point& b) { return metric::exact_distance(dom, a, b); };
}

domains::DomainOracle annulus() {
  domains::CustomSpec spec;
  spec.name = "annulus";
  spec.value = [](const Point& p) {
    const double r = std::abs(p(0));
    return std::max(r - 1.0, 0.5 - r);
  };
  spec.bounded = true;
  spec.bounding_radius = 1.0;
  return domains::make_custom(spec);
}

}  // namespace

TEST(StraightSegment, SpecExamples) {
  const auto disk = make_ball(1);
  const auto c = straight_segment(disk, make_point({0.0}), make_point({0.5}), 3);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_NEAR(std::abs(c.nodes[1](0) - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.nodes[2](0) - 0.5), 0.0, 1e-15);

  const auto back = straight_segment(disk, make_point({0.5}), make_point({0.0}), 3);
  const auto rev = c.reversed();
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR((back.nodes[i] - rev.nodes[i]).norm(), 0.0, 1e-15);

  try {
    straight_segment(annulus(), make_point({0.75}), make_point({-0.75}), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SegmentExitsDomain);
  }
}

TEST(Geodesic, DiskAndBallSpecExamples) {
  const auto disk = make_ball(1);
  const auto r = optimize_geodesic(disk, make_point({0.0}), make_point({0.5}));
  EXPECT_GE(r.length, std::atanh(0.5));
  EXPECT_LE(r.length, std::log(2.0) + 1e-6);

  const auto ball = make_ball(2);
  const auto rb = optimize_geodesic(ball, make_point({0.0, 0.0}), make_point({0.5, 0.0}));
  EXPECT_GE(rb.length, std::atanh(0.5));
  EXPECT_LE(rb.length, std::log(2.0) + 1e-6);

  const auto z = optimize_geodesic(disk, make_point({0.2}), make_point({0.2}));
  EXPECT_EQ(z.curve.size(), 2u);
  EXPECT_EQ(z.length, 0.0);
}

TEST(Geodesic, LevelLengthsNeverIncrease) {
  const auto cone = domains::make_pnorm_cone(1, 2.0);
  const auto r = optimize_geodesic(cone, make_point({Complex(0.3, 1.0), 0.4}), make_point({Complex(-1.0, 3.0), 0.5}));
  ASSERT_GE(r.level_lengths.size(), 2u);
  for (std::size_t i = 1; i < r.level_lengths.size(); ++i) EXPECT_LE(r.level_lengths[i], r.level_lengths[i - 1]);
  EXPECT_EQ(r.length, r.level_lengths.back());
  EXPECT_NEAR(metric::curve_length_upper(cone, r.curve), r.length, 1e-8 * r.length);
}

TEST(Geodesic, UpperBoundOnModels) {
  Rng rng(200);
  const auto ball = make_ball(2);
  const auto bidisc = domains::make_polydisc({1.0, 1.0});
  GeodesicSettings s;
  s.nodes = 9;
  s.max_nodes = 9;
  for (int k = 0; k < 100; ++k) {
    for (const auto* dom : {&ball, &bidisc}) {
      const Point p = 0.9 * rng.uniform() * rng.unit_vector(2);
      const Point q = 0.9 * rng.uniform() * rng.unit_vector(2);
      EXPECT_GE(optimize_geodesic(*dom, p, q, s).length, metric::exact_distance(*dom, p, q)) << dom->name();
    }
  }
}

TEST(Geodesic, GridStartOnNonConvexDomain) {
  // The projective image is C-convex but not convex.
  const auto img = domains::make_projective_image(1);
  const Point p = domains::projective_transform(make_point({Complex(-3.0, 1.0), 0.0}), domains::ProjectiveDirection::Forward);
  const Point q = domains::projective_transform(make_point({Complex(3.0, 1.0), 0.0}), domains::ProjectiveDirection::Forward);
  GeodesicSettings s;
  s.nodes = 5;
  s.max_nodes = 5;
  s.graph_seed = true;
  s.graph_grid = 32;
  const auto r = optimize_geodesic(img, p, q, s);
  EXPECT_GT(r.length, 0.0);
  EXPECT_FALSE(r.start.empty());
  for (const auto& x : r.curve.nodes) EXPECT_TRUE(img.contains(x));
  EXPECT_LE(r.length, dijkstra_grid_path(img, p, q, 32).length * 1.05);
}

TEST(Dijkstra, SpecExamples) {
  const auto disk = make_ball(1);
  const double g = dijkstra_grid_distance(disk, make_point({0.0}), make_point({0.5}), 200);
  const double o = optimize_geodesic(disk, make_point({0.0}), make_point({0.5})).length;
  EXPECT_LE(std::abs(g - o), 0.03 * o);
  EXPECT_EQ(dijkstra_grid_distance(disk, make_point({0.1}), make_point({0.1}), 50), 0.0);
}

TEST(Dijkstra, RefinementDecreases) {
  const auto disk = make_ball(1);
  const Point p = make_point({Complex(-0.4, 0.3)}), q = make_point({Complex(0.6, -0.2)});
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {51, 101, 201}) {
    const double g = dijkstra_grid_distance(disk, p, q, n);
    EXPECT_LE(g, prev + 1e-3);
    prev = g;
  }
}

TEST(Dijkstra, WindowChecked) {
  try {
    dijkstra_grid_distance(make_ball(1), make_point({-0.5}), make_point({0.5}), 50, 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointsOutsideWindow);
  }
}

TEST(NormalRay, SpecExamples) {
  const auto disk = make_ball(1);
  const auto c = normal_ray_curve(disk, make_point({1.0}), 6.0, 13);
  for (std::size_t k = 0; k < c.size(); ++k)
    EXPECT_NEAR(std::abs(c.nodes[k](0) - (1.0 - std::exp(-c.times[k]))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.nodes[0](0)), 0.0, 1e-15);

  const auto ball = make_ball(2);
  const auto cb = normal_ray_curve(ball, make_point({1.0, 0.0}), 4.0, 5);
  for (std::size_t k = 0; k < cb.size(); ++k) {
    EXPECT_NEAR(std::abs(cb.nodes[k](0) - (1.0 - std::exp(-cb.times[k]))), 0.0, 1e-15);
    EXPECT_EQ(cb.nodes[k](1), Complex(0.0));
  }
}

TEST(NormalRay, StaysInside) {
  const auto cone = domains::make_pnorm_cone(1, 2.0);
  const auto c = normal_ray_curve(cone, make_point({I, 1.0}), 20.0, 81);
  for (const auto& x : c.nodes) EXPECT_TRUE(cone.contains(x));
  try {
    normal_ray_curve(cone, make_point({0.0, 0.0}), 1.0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularBoundaryPoint);
  }
}

TEST(QuasiGeodesic, SpecExamples) {
  const auto disk = make_ball(1);
  const auto ray = normal_ray_curve(disk, make_point({1.0}), 6.0, 25);
  const auto rep = qg_constants_measure(exact_on(disk), ray);
  EXPECT_GE(rep.A, 1.0);
  EXPECT_LE(rep.A, 4.0);
  EXPECT_EQ(rep.B, 0.0);

  // Radial geodesic parametrised by Kobayashi arclength.
  std::vector<Point> nodes;
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) {
    times.push_back(0.25 * k);
    nodes.push_back(make_point({std::tanh(0.25 * k)}));
  }
  const auto geo = qg_constants_measure(exact_on(disk), make_curve(nodes, times));
  EXPECT_NEAR(geo.A, 1.0, 1e-6);
  EXPECT_NEAR(geo.B, 0.0, 1e-6);

  const auto flat = qg_constants_measure(exact_on(disk), make_curve({make_point({0.1}), make_point({0.1}), make_point({0.1})}));
  EXPECT_TRUE(flat.degenerate);
  EXPECT_EQ(flat.A, 1.0);
  EXPECT_EQ(flat.B, 0.0);
}

TEST(QuasiGeodesic, NormalLineBoundsInTheDisk) {
  const auto disk = make_ball(1);
  const auto ray = domains::normal_reach(disk, make_point({1.0}));
  const auto c = normal_ray_curve(disk, ray, 8.0, 33);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double gap = c.times[j] - c.times[i];
      const double K = metric::exact_distance(disk, c.nodes[i], c.nodes[j]);
      EXPECT_GE(K, 0.25 * gap - 1e-6);
      EXPECT_LE(K, gap / ray.c_lower + 1e-6);
    }
}

TEST(Shadowing, SpecExamples) {
  const auto disk = make_ball(1);
  const auto D = exact_on(disk);
  domains::NormalRay r1{make_point({1.0}), make_point({-1.0}), 1.0, 1.0};
  domains::NormalRay r2{make_point({1.0}), make_point({-1.0}), 0.5, 1.0};
  const auto same = shadowing_gap(D, normal_ray_curve(disk, r1, 8.0, 33), normal_ray_curve(disk, r2, 8.0, 33));
  EXPECT_LE(same.sup_gap, std::abs(std::log(1.0 / 0.5)) + 1.0);

  // Antipodal rays: both start at 0, so the gap is the distance from the
  // far end of one ray back to 0, arctanh(1 - e^{-T}) ~ T/2.
  domains::NormalRay r3{make_point({-1.0}), make_point({1.0}), 1.0, 1.0};
  double prev = 0.0;
  for (double T : {2.0, 4.0, 8.0}) {
    const auto rep = shadowing_gap(D, normal_ray_curve(disk, r1, T, 41), normal_ray_curve(disk, r3, T, 41));
    EXPECT_NEAR(rep.sup_gap, std::atanh(1.0 - std::exp(-T)), 1e-9);
    EXPECT_GT(rep.sup_gap, prev);
    prev = rep.sup_gap;
  }

  const auto c = normal_ray_curve(disk, r1, 3.0, 7);
  const auto zero = shadowing_gap(D, c, c);
  EXPECT_EQ(zero.sup_gap, 0.0);
  EXPECT_EQ(zero.base_gap, 0.0);
}

TEST(CurveJson, RoundTrip) {
  const auto c = make_curve({make_point({0.1, I}), make_point({0.2, 0.5 * I})}, {0.0, 2.0});
  const auto back = curve_from_json(curve_to_json(c));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.times, c.times);
  EXPECT_EQ(back.nodes[1], c.nodes[1]);
}
