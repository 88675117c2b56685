#include <cmath>

#include <gtest/gtest.h>

#include "kobacore/metric.hpp"
#include "kobacore/random.hpp"

using namespace kobacore;
using namespace kobacore::metric;
using domains::make_ball;
using domains::make_half_plane;
using domains::make_pnorm_cone;
using domains::make_polydisc;

namespace {

const Complex I(0.0, 1.0);

Point in_ball(Rng& rng, int dim, double radius = 0.95) {
  return radius * std::pow(rng.uniform(), 1.0 / (2 * dim)) * rng.unit_vector(dim);
}

Point in_polydisc(Rng& rng, int dim) {
  Point p(dim);
  for (int j = 0; j < dim; ++j) p(j) = 0.95 * std::sqrt(rng.uniform()) * rng.unit_vector(1)(0);
  return p;
}

paths::GeodesicSettings quick() {
  paths::GeodesicSettings s;
  s.nodes = 9;
  s.max_nodes = 9;
  return s;
}

}  // namespace

TEST(Khat, SpecExamples) {
  const auto disk = make_ball(1);
  EXPECT_NEAR(khat(disk, make_point({0.0}), make_point({1.0})), 1.0, 1e-14);
  EXPECT_NEAR(khat(disk, make_point({0.5}), make_point({1.0})), 2.0, 1e-14);
  const double exact = exact_infinitesimal(disk, make_point({0.5}), make_point({1.0}));
  EXPECT_NEAR(exact, 4.0 / 3.0, 1e-14);
  EXPECT_LE(k_lower(disk, make_point({0.5}), make_point({1.0})), exact);
  EXPECT_GE(khat(disk, make_point({0.5}), make_point({1.0})), exact);
}

TEST(Khat, ZeroVectorAndErrors) {
  const auto disk = make_ball(1);
  EXPECT_EQ(khat(disk, make_point({0.2}), make_point({0.0})), 0.0);
  try {
    khat(disk, make_point({1.5}), make_point({1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInterior);
  }
}

TEST(KLower, SpecExamples) {
  EXPECT_NEAR(k_lower(make_ball(1), make_point({0.0}), make_point({1.0})), 0.25, 1e-15);
  EXPECT_NEAR(k_lower(make_ball(2), make_point({0.5, 0.0}), make_point({0.0, 1.0})), 1.0 / (4.0 * std::sqrt(0.75)),
              1e-12);
  EXPECT_NEAR(k_lower(make_ball(2), make_point({0.5, 0.0}), make_point({0.0, 1.0})), 0.28868, 5e-6);
  EXPECT_EQ(k_lower(make_ball(1), make_point({0.3}), make_point({0.0})), 0.0);
}

TEST(KLower, RequiresCConvexFlag) {
  domains::CustomSpec spec;
  spec.value = [](const Point& p) { return std::abs(p(0)) - 1.0; };
  const auto dom = domains::make_custom(spec);
  try {
    k_lower(dom, make_point({0.0}), make_point({1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCConvex);
  }
}

TEST(InfinitesimalSandwich, DiskAndBall) {
  Rng rng(31);
  const auto disk = make_ball(1);
  const auto ball = make_ball(2);
  for (int k = 0; k < 1000; ++k) {
    for (const auto* dom : {&disk, &ball}) {
      const Point p = in_ball(rng, dom->dim(), 0.999);
      const Point v = rng.unit_vector(dom->dim()) * std::exp(rng.normal());
      const double exact = exact_infinitesimal(*dom, p, v);
      EXPECT_LE(k_lower(*dom, p, v), exact * (1.0 + 1e-12));
      EXPECT_GE(khat(*dom, p, v), exact * (1.0 - 1e-12));
    }
  }
}

TEST(KhatInvariance, ScalingGroup) {
  Rng rng(77);
  const auto cone = make_pnorm_cone(2, 2.0);
  const auto poly = domains::make_epigraph(
      domains::EpigraphFunction(2, 0.0, 2.0, {{1.0, {2.0, 0.0}}, {1.0, {0.0, 4.0}}}), {0.5, 0.25}, true);
  for (const auto* dom : {&cone, &poly}) {
    for (int k = 0; k < 25; ++k) {
      Point p(3);
      p(1) = rng.complex_normal();
      p(2) = rng.complex_normal();
      p(0) = Complex(rng.normal(), dom->epigraph()->value(p.tail(2)) + 0.1 + rng.uniform());
      const Point v = rng.unit_vector(3);
      const double t = std::exp(rng.uniform(-2.0, 2.0));
      const double before = khat(*dom, p, v);
      const double after =
          khat(*dom, domains::scaling_group_apply(*dom, t, p), domains::scaling_group_apply(*dom, t, v));
      EXPECT_NEAR(after, before, 1e-8 * before) << dom->name();
    }
  }
}

TEST(CurveLength, SpecExamples) {
  const auto disk = make_ball(1);
  const auto seg = paths::straight_segment(disk, make_point({0.0}), make_point({0.5}), 5);
  EXPECT_NEAR(curve_length_upper(disk, seg), std::log(2.0), 1e-8 * std::log(2.0));
  EXPECT_EQ(curve_length_upper(disk, make_curve({make_point({0.1}), make_point({0.1})})), 0.0);
}

TEST(CurveLength, ReversalInvariant) {
  Rng rng(3);
  const auto ball = make_ball(2);
  std::vector<Point> nodes;
  for (int k = 0; k < 6; ++k) nodes.push_back(in_ball(rng, 2, 0.7));
  const auto curve = make_curve(nodes);
  EXPECT_NEAR(curve_length_upper(ball, curve.reversed()), curve_length_upper(ball, curve), 1e-10);
}

TEST(CurveLength, NodeOutsideDomain) {
  try {
    curve_length_upper(make_ball(1), make_curve({make_point({0.0}), make_point({1.2})}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NodeOutsideDomain);
  }
}

TEST(DistanceUpper, SpecExamples) {
  const auto disk = make_ball(1);
  const double d = distance_upper(disk, make_point({0.0}), make_point({0.5}));
  EXPECT_GE(d, std::atanh(0.5));
  EXPECT_LE(d, std::log(2.0) + 1e-6);
  EXPECT_EQ(distance_upper(disk, make_point({0.3}), make_point({0.3})), 0.0);
}

TEST(DistanceUpper, MonotoneUnderInclusion) {
  Rng rng(12);
  const auto small = make_ball(2, 1.0);
  const auto big = make_ball(2, 2.0);
  for (int k = 0; k < 10; ++k) {
    const Point p = in_ball(rng, 2, 0.9), q = in_ball(rng, 2, 0.9);
    EXPECT_GE(distance_upper(small, p, q, quick()), distance_upper(big, p, q, quick()));
  }
}

TEST(LowerLine, SpecExamples) {
  const auto disk = make_ball(1);
  EXPECT_NEAR(distance_lower_line(disk, make_point({0.0}), make_point({0.9})), 0.25 * std::log(10.0), 1e-9);
  EXPECT_EQ(distance_lower_line(disk, make_point({0.4}), make_point({0.4})), 0.0);
  EXPECT_LE(distance_lower_line(disk, make_point({0.0}), make_point({0.9})), std::atanh(0.9));
}

TEST(LowerSharp, SpecExamples) {
  const auto disk = make_ball(1);
  EXPECT_NEAR(distance_lower_sharp(disk, make_point({0.0}), make_point({0.9})), 0.25 * std::log(10.0), 1e-12);
  EXPECT_NEAR(distance_lower_sharp(disk, make_point({0.0}), make_point({0.5})), 0.25 * std::log(2.0), 1e-12);
  EXPECT_EQ(distance_lower_sharp(disk, make_point({0.1}), make_point({0.1})), 0.0);
}

TEST(LowerBounds, MonotoneUnderNestedBalls) {
  Rng rng(14);
  const auto small = make_ball(2, 1.0);
  const auto big = make_ball(2, 1.5);
  for (int k = 0; k < 100; ++k) {
    const Point p = in_ball(rng, 2, 0.95), q = in_ball(rng, 2, 0.95);
    EXPECT_GE(distance_lower_line(small, p, q) + 1e-12, distance_lower_line(big, p, q));
    EXPECT_GE(distance_lower_sharp(small, p, q) + 1e-12, distance_lower_sharp(big, p, q));
  }
}

TEST(ExactDistance, SpecExamples) {
  EXPECT_NEAR(exact_distance(make_ball(1), make_point({0.0}), make_point({0.5})), std::atanh(0.5), 1e-15);
  EXPECT_NEAR(exact_distance(make_polydisc({1.0, 1.0}), make_point({0.0, 0.0}), make_point({0.5, 0.8})),
              std::atanh(0.8), 1e-14);
  EXPECT_NEAR(exact_distance(make_polydisc({1.0, 1.0}), make_point({0.0, 0.0}), make_point({0.5, 0.8})), 1.09861,
              5e-6);
  EXPECT_NEAR(exact_distance(make_half_plane(), make_point({I}), make_point({4.0 * I})), std::log(2.0), 1e-15);
}

TEST(ExactDistance, AgreesWithTextbookForms) {
  Rng rng(6);
  const auto ball = make_ball(3);
  for (int k = 0; k < 200; ++k) {
    const Point p = in_ball(rng, 3), q = in_ball(rng, 3);
    // arctanh sqrt(1 - (1-|p|^2)(1-|q|^2)/|1-<p,q>|^2)
    const Complex inner = q.dot(p);
    const double x = 1.0 - (1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm()) / std::norm(1.0 - inner);
    EXPECT_NEAR(exact_distance(ball, p, q), std::atanh(std::sqrt(x)), 1e-9);
    // Disk: arctanh |(a-b)/(1-conj(a) b)|.
    const Complex a = p(0), b = q(0);
    EXPECT_NEAR(exact_distance(make_ball(1), make_point({a}), make_point({b})),
                std::atanh(std::abs((a - b) / (1.0 - std::conj(a) * b))), 1e-12);
  }
  // Origin normalisation K(0, z) = arctanh |z|.
  EXPECT_NEAR(exact_distance(ball, Point::Zero(3), make_point({0.3, 0.4 * I, 0.0})), std::atanh(0.5), 1e-15);
}

TEST(ExactDistance, ModelOnly) {
  try {
    exact_distance(make_pnorm_cone(1, 2.0), make_point({I, 0.0}), make_point({2.0 * I, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelOnly);
  }
}

TEST(Interval, SpecExamples) {
  const auto disk = make_ball(1);
  const auto b = distance_interval(disk, make_point({0.0}), make_point({0.9}));
  EXPECT_NEAR(b.lower, 0.25 * std::log(10.0), 1e-9);
  EXPECT_TRUE(b.contains(std::atanh(0.9)));
  // The chord 0 -> 0.9 has khat-length log 10, and it is already minimal
  // for the radial density 1/(1-|z|).
  EXPECT_LE(b.upper, std::log(10.0) + 1e-6);
  EXPECT_GE(b.upper, std::log(10.0) - 1e-6);

  const auto z = distance_interval(disk, make_point({0.2}), make_point({0.2}));
  EXPECT_EQ(z.lower, 0.0);
  EXPECT_EQ(z.upper, 0.0);

  const auto bi = distance_interval(make_polydisc({1.0, 1.0}), make_point({0.0, 0.0}), make_point({0.5, 0.0}));
  EXPECT_TRUE(bi.contains(std::atanh(0.5)));
  EXPECT_FALSE(bi.lower_tag.empty());
  EXPECT_EQ(bi.upper_tag, "khat-length");
}

TEST(Interval, SandwichOnModels) {
  Rng rng(1001);
  const auto disk = make_ball(1);
  const auto ball = make_ball(2);
  const auto bidisc = make_polydisc({1.0, 1.0});
  const auto half = make_half_plane(1);
  for (int k = 0; k < 40; ++k) {
    for (const auto* dom : {&disk, &ball, &bidisc, &half}) {
      Point p, q;
      if (dom == &bidisc) {
        p = in_polydisc(rng, 2);
        q = in_polydisc(rng, 2);
      } else if (dom == &half) {
        p = make_point({Complex(rng.normal(), std::exp(rng.normal()))});
        q = make_point({Complex(rng.normal(), std::exp(rng.normal()))});
      } else {
        p = in_ball(rng, dom->dim());
        q = in_ball(rng, dom->dim());
      }
      const auto b = distance_interval(*dom, p, q, quick());
      const double exact = exact_distance(*dom, p, q);
      EXPECT_LE(b.lower, exact + 1e-9) << dom->name();
      EXPECT_GE(b.upper, exact - 1e-9) << dom->name();
    }
  }
}

TEST(Surrogate, SymmetricAndTriangular) {
  Rng rng(8);
  const SurrogateMetric D(make_ball(2), quick());
  for (int k = 0; k < 10; ++k) {
    const Point p = in_ball(rng, 2, 0.9), q = in_ball(rng, 2, 0.9), r = in_ball(rng, 2, 0.9);
    const double pq = D(p, q), qp = D(q, p);
    EXPECT_LE(std::abs(pq - qp), 1e-3 * (1.0 + pq));
    EXPECT_LE(D(p, r), pq + D(q, r) + 1e-3 * (1.0 + D(p, r)));
  }
}
