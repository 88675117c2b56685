#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "kobacore/hilbert.hpp"
#include "kobacore/random.hpp"

using namespace kobacore;
using namespace kobacore::hilbert;

namespace {

RealPoint v2(double x, double y) { return RealPoint{{x, y}}; }

// Random point well inside the unit disk / square.
RealPoint inner(Rng& rng, double r = 0.95) { return r * std::sqrt(rng.uniform()) * rng.real_unit_vector(2); }

}  // namespace

TEST(HilbertDistance, Examples) {
  EXPECT_NEAR(hilbert_distance(disk(), v2(0, 0), v2(0.5, 0)), std::atanh(0.5), 1e-9);
  EXPECT_NEAR(hilbert_distance(square(), v2(0, 0), v2(0.5, 0)), std::atanh(0.5), 1e-9);
  EXPECT_NEAR(hilbert_distance(disk(), v2(0, 0), v2(0.5, 0)), 0.54931, 1e-5);
  EXPECT_EQ(hilbert_distance(disk(), v2(0.3, 0.1), v2(0.3, 0.1)), 0.0);
}

TEST(HilbertDistance, KleinModelClosedForm) {
  // Klein model: cosh d = (1 - x.y) / sqrt((1 - |x|^2)(1 - |y|^2)), with the
  // 1/2 log normalisation giving curvature -1.
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const RealPoint x = inner(rng), y = inner(rng);
    const double c = (1 - x.dot(y)) / std::sqrt((1 - x.squaredNorm()) * (1 - y.squaredNorm()));
    EXPECT_NEAR(hilbert_distance(disk(), x, y), std::acosh(c), 1e-8 * (1 + std::acosh(c)));
  }
}

TEST(HilbertDistance, Errors) {
  try {
    hilbert_distance(disk(), v2(0, 0), v2(1.0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInterior);
  }
  try {
    square().chord(v2(0.1, 0.1), v2(0.1, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateChord);
  }
  EXPECT_THROW(polygon({v2(0, 0), v2(1, 0), v2(2, 0)}), Error);
}

TEST(Chord, EndpointsOnBoundary) {
  Rng rng(4);
  for (const auto& body : {disk(), square(), regular_polygon(7)}) {
    for (int k = 0; k < 50; ++k) {
      const RealPoint x = inner(rng, 0.8), y = inner(rng, 0.8);
      const auto [a, b] = body.chord(x, y);
      EXPECT_LE(std::abs(body.value(a)), 1e-10);
      EXPECT_LE(std::abs(body.value(b)), 1e-10);
      // a, x, y, b in order along the line.
      EXPECT_NEAR((b - a).norm(), (x - a).norm() + (y - x).norm() + (b - y).norm(), 1e-10);
    }
  }
}

TEST(HilbertDistance, SymmetricAndTriangle) {
  Rng rng(6);
  const auto D = disk();
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const RealPoint x = inner(rng), y = inner(rng), z = inner(rng);
    const double xy = hilbert_distance(D, x, y);
    EXPECT_NEAR(xy, hilbert_distance(D, y, x), 1e-10 * (1 + xy));
    EXPECT_GT(xy, 0.0);
    worst = std::max(worst, xy - hilbert_distance(D, x, z) - hilbert_distance(D, z, y));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(HilbertDistance, AffineInvariance) {
  Rng rng(8);
  for (const auto& body : {disk(), square(), regular_polygon(5)}) {
    for (int k = 0; k < 100; ++k) {
      Eigen::MatrixXd A(2, 2);
      do {
        A << rng.normal(), rng.normal(), rng.normal(), rng.normal();
      } while (std::abs(A.determinant()) < 0.2);
      const RealPoint t = v2(rng.normal(), rng.normal());
      const auto image = affine_image(body, A, t);
      const RealPoint x = inner(rng, 0.7), y = inner(rng, 0.7);
      const double h = hilbert_distance(body, x, y);
      EXPECT_NEAR(hilbert_distance(image, A * x + t, A * y + t), h, 1e-9 * (1 + h)) << body.name();
    }
  }
}

TEST(HilbertJson, RoundTrip) {
  Eigen::MatrixXd A(2, 2);
  A << 2, 1, 0, 1;
  for (const auto& body : {disk(), square(), regular_polygon(64), polygon({v2(0, 0), v2(2, 0), v2(0, 1)}),
                           affine_image(square(), A, v2(1, -1))}) {
    const auto back = body_from_json(body.to_json());
    EXPECT_EQ(back.to_json(), body.to_json());
    const RealPoint x = body.center() + v2(0.05, 0.02);
    EXPECT_EQ(hilbert_distance(back, body.center(), x), hilbert_distance(body, body.center(), x));
  }
  EXPECT_THROW(body_from_json({{"body", "ellipse"}}), Error);
  EXPECT_THROW(body_from_json({{"body", "disk"}, {"radius", 1.0}, {"colour", "red"}}), Error);
}

TEST(HilbertScan, SquareWitnessIsExactlyHalfScale) {
  const auto rep = hilbert_four_point_scan(square(), 1, {1.0, 2.0, 4.0, 8.0}, 1);
  for (std::size_t i = 0; i < rep.scale_schedule.size(); ++i)
    EXPECT_NEAR(rep.delta_per_scale[i], rep.scale_schedule[i] / 2, 1e-5);
}

TEST(HilbertScan, Contrast) {
  const std::vector<double> scales{2.0, 4.0, 8.0};
  const auto d = hilbert_four_point_scan(disk(), 200, scales, 3);
  EXPECT_EQ(hyperbolicity::verdict(d).verdict, hyperbolicity::Verdict::BoundedConsistent);
  EXPECT_EQ(d.metric_used, "hilbert");

  const auto sq = hilbert_four_point_scan(square(), 200, scales, 3);
  EXPECT_EQ(hyperbolicity::verdict(sq).verdict, hyperbolicity::Verdict::Growing);
  for (std::size_t i = 0; i < scales.size(); ++i) EXPECT_GE(sq.delta_per_scale[i], 0.45 * scales[i]);

  const auto ngon = hilbert_four_point_scan(regular_polygon(64), 200, scales, 3);
  const auto v = hyperbolicity::verdict(ngon);
  EXPECT_EQ(v.verdict, hyperbolicity::Verdict::Growing);
  EXPECT_LT(ngon.delta_per_scale.back() - ngon.delta_per_scale.front(),
            sq.delta_per_scale.back() - sq.delta_per_scale.front());
}
