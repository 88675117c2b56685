#include "kobacore/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kobacore/detail/golden.hpp"

namespace kobacore::metric {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_interior(const DomainOracle& dom, const Point& p) {
  if (p.size() != dom.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  if (!dom.contains(p)) throw Error(ErrorCode::NotInterior, "point is not inside the domain");
}

void require_c_convex(const DomainOracle& dom) {
  if (!dom.c_convex()) throw Error(ErrorCode::NotCConvex, dom.name() + " is not flagged C-convex");
}

// Unit-disk distance in the log form log(1+s) - 1/2 log(1 - s^2), with
// 1 - s^2 = (1-|a|^2)(1-|b|^2)/|1-<a,b>|^2 assembled from its factors so
// points near the boundary keep full relative precision.
double ball_distance(const Point& a, const Point& b) {
  const Complex inner = a.dot(b);  // conj(a) . b; its modulus is what matters
  const double a2 = a.squaredNorm();
  const double b2 = b.squaredNorm();
  const double denom = std::norm(1.0 - std::conj(inner));
  const double wedge = std::max(0.0, a2 * b2 - std::norm(inner));
  const double s2 = std::max(0.0, ((a - b).squaredNorm() - wedge) / denom);
  const double s = std::min(1.0, std::sqrt(s2));
  return std::log1p(s) - 0.5 * (std::log1p(-a2) + std::log1p(-b2) - std::log(denom));
}

double disk_distance(Complex a, Complex b, double r) {
  Point x(1), y(1);
  x(0) = a / r;
  y(0) = b / r;
  return ball_distance(x, y);
}

std::vector<double> polydisc_radii(const DomainOracle& dom) {
  return dom.to_json().at("radii").get<std::vector<double>>();
}

double log_ratio(const Point& p, const Point& q, const Point& xi) {
  const double num = (q - xi).norm();
  const double den = (p - xi).norm();
  if (num == 0.0 || den == 0.0) return 0.0;
  return 0.25 * std::abs(std::log(num / den));
}

}  // namespace

double khat(const DomainOracle& dom, const Point& p, const Point& v, const domains::LineSearchOptions& opts) {
  require_interior(dom, p);
  const double vn = v.norm();
  if (vn == 0.0) return 0.0;
  const double d = domains::line_boundary_distance(dom, p, v, opts);
  return std::isfinite(d) ? vn / d : 0.0;
}

double k_lower(const DomainOracle& dom, const Point& p, const Point& v, const domains::LineSearchOptions& opts) {
  require_c_convex(dom);
  return 0.25 * khat(dom, p, v, opts);
}

double segment_length_upper(const DomainOracle& dom, const Point& a, const Point& b, const QuadratureOptions& opts) {
  const Point d = b - a;
  if (d.norm() == 0.0) {
    if (!dom.contains(a)) throw Error(ErrorCode::NodeOutsideDomain, "curve node outside the domain");
    return 0.0;
  }
  auto f = [&](double s) {
    const Point x = a + s * d;
    if (!dom.contains(x)) throw Error(ErrorCode::NodeOutsideDomain, "curve leaves the domain");
    const double delta = domains::line_boundary_distance(dom, x, d, opts.line);
    return std::isfinite(delta) ? d.norm() / delta : 0.0;
  };
  if (!dom.contains(a) || !dom.contains(b)) throw Error(ErrorCode::NodeOutsideDomain, "curve node outside the domain");
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, opts.max_depth, opts.rel_tol, &error);
  return value + error;
}

double curve_length_upper(const DomainOracle& dom, const PolyCurve& curve, const QuadratureOptions& opts) {
  curve.validate();
  double total = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) total += segment_length_upper(dom, curve.nodes[i - 1], curve.nodes[i], opts);
  return total;
}

std::vector<double> cumulative_length_upper(const DomainOracle& dom, const PolyCurve& curve,
                                            const QuadratureOptions& opts) {
  curve.validate();
  std::vector<double> out(curve.size(), 0.0);
  for (std::size_t i = 1; i < curve.size(); ++i)
    out[i] = out[i - 1] + segment_length_upper(dom, curve.nodes[i - 1], curve.nodes[i], opts);
  return out;
}

double distance_upper(const DomainOracle& dom, const Point& p, const Point& q, const paths::GeodesicSettings& settings) {
  require_interior(dom, p);
  require_interior(dom, q);
  if ((p - q).norm() == 0.0) return 0.0;
  paths::GeodesicSettings s = settings;
  if (s.lower_bound <= 0.0 && dom.c_convex()) s.lower_bound = distance_lower(dom, p, q);
  return paths::optimize_geodesic(dom, p, q, s).length;
}

double distance_lower_line(const DomainOracle& dom, const Point& p, const Point& q, int rays) {
  require_c_convex(dom);
  require_interior(dom, p);
  require_interior(dom, q);
  const Point d = q - p;
  if (d.norm() == 0.0) return 0.0;
  const Point u = d / d.norm();
  rays = std::max(rays, 3);

  double best = 0.0;
  for (const Point* center : {&p, &q}) {
    auto value_at = [&](double theta) {
      const Point w = std::polar(1.0, theta) * u;
      const double t = domains::ray_exit(dom, *center, w);
      if (!std::isfinite(t)) return 0.0;
      return log_ratio(p, q, *center + t * w);
    };
    int best_k = -1;
    double local = 0.0;
    for (int k = 0; k < rays; ++k) {
      const double v = value_at(kTwoPi * k / rays);
      if (v > local) {
        local = v;
        best_k = k;
      }
    }
    if (best_k < 0) continue;
    const double h = kTwoPi / rays;
    const double theta0 = kTwoPi * best_k / rays;
    const auto r = detail::golden_section_min([&](double th) { return -value_at(th); }, theta0 - h, theta0 + h, 40,
                                              theta0, -local);
    best = std::max(best, -r.f);
  }
  return best;
}

double distance_lower_sharp(const DomainOracle& dom, const Point& p, const Point& q) {
  require_c_convex(dom);
  require_interior(dom, p);
  require_interior(dom, q);
  const Point d = q - p;
  const double dn = d.norm();
  if (dn == 0.0) return 0.0;
  const double m = std::min(domains::line_boundary_distance(dom, p, d), domains::line_boundary_distance(dom, q, -d));
  if (!std::isfinite(m)) return 0.0;
  return 0.25 * std::log1p(dn / m);
}

double distance_lower(const DomainOracle& dom, const Point& p, const Point& q) {
  return std::max(distance_lower_line(dom, p, q), distance_lower_sharp(dom, p, q));
}

bool has_exact_model(const DomainOracle& dom) {
  using domains::FamilyKind;
  return dom.kind() == FamilyKind::Ball || dom.kind() == FamilyKind::Polydisc || dom.kind() == FamilyKind::HalfPlane;
}

double exact_distance(const DomainOracle& dom, const Point& p, const Point& q) {
  using domains::FamilyKind;
  if (!has_exact_model(dom)) throw Error(ErrorCode::ModelOnly, "no closed form for " + dom.name());
  require_interior(dom, p);
  require_interior(dom, q);
  if (p == q) return 0.0;
  switch (dom.kind()) {
    case FamilyKind::Ball: {
      const double r = *dom.bounding_radius();
      return ball_distance(p / r, q / r);
    }
    case FamilyKind::Polydisc: {
      const auto radii = polydisc_radii(dom);
      double best = 0.0;
      for (int j = 0; j < dom.dim(); ++j) best = std::max(best, disk_distance(p(j), q(j), radii[j]));
      return best;
    }
    default: {
      // Half-plane: s = |a-b| / |a-conj(b)|, 1 - s^2 = 4 Im a Im b / |a-conj(b)|^2.
      const Complex a = p(0), b = q(0);
      const double far = std::abs(a - std::conj(b));
      const double s = std::abs(a - b) / far;
      return std::log1p(s) - 0.5 * std::log(4.0 * a.imag() * b.imag() / (far * far));
    }
  }
}

double exact_infinitesimal(const DomainOracle& dom, const Point& p, const Point& v) {
  using domains::FamilyKind;
  if (!has_exact_model(dom)) throw Error(ErrorCode::ModelOnly, "no closed form for " + dom.name());
  require_interior(dom, p);
  switch (dom.kind()) {
    case FamilyKind::Ball: {
      const double r = *dom.bounding_radius();
      const Point x = p / r;
      const Point w = v / r;
      const double a = 1.0 - x.squaredNorm();
      return std::sqrt(w.squaredNorm() / a + std::norm(x.dot(w)) / (a * a));
    }
    case FamilyKind::Polydisc: {
      const auto radii = polydisc_radii(dom);
      double best = 0.0;
      for (int j = 0; j < dom.dim(); ++j) {
        const double r = radii[j];
        best = std::max(best, std::abs(v(j)) * r / (r * r - std::norm(p(j))));
      }
      return best;
    }
    default:
      return std::abs(v(0)) / (2.0 * p(0).imag());
  }
}

MetricBounds distance_interval(const DomainOracle& dom, const Point& p, const Point& q,
                               const paths::GeodesicSettings& settings) {
  require_interior(dom, p);
  require_interior(dom, q);
  MetricBounds b;
  b.upper_tag = "khat-length";
  if ((p - q).norm() == 0.0) {
    b.lower_tag = "identical";
    return b;
  }
  if (dom.c_convex()) {
    const double line = distance_lower_line(dom, p, q);
    const double sharp = distance_lower_sharp(dom, p, q);
    b.lower = std::max(line, sharp);
    b.lower_tag = sharp >= line ? "sharp-log" : "log-ratio";
  } else {
    b.lower_tag = "none";
  }
  paths::GeodesicSettings s = settings;
  if (s.lower_bound <= 0.0) s.lower_bound = b.lower;
  b.upper = paths::optimize_geodesic(dom, p, q, s).length;
  if (b.lower > b.upper * (1.0 + 1e-9) + 1e-12)
    throw Error(ErrorCode::NumericalFailure, "lower bound exceeds upper bound");
  return b;
}

}  // namespace kobacore::metric
