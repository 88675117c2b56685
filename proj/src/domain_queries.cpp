#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "kobacore/detail/golden.hpp"
#include "kobacore/domains.hpp"
#include "kobacore/random.hpp"

namespace kobacore::domains {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_interior(const DomainOracle& dom, const Point& p) {
  if (p.size() != dom.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  if (!(dom.value(p) < 0.0)) throw Error(ErrorCode::NotInterior, "point is not inside the domain");
}

// Push t outward until p + t w lies on the closed complement.
double settle_outside(const DomainOracle& dom, const Point& p, const Point& w, double t) {
  for (int i = 0; i < 64 && dom.value(p + t * w) < 0.0; ++i) {
    t = std::nextafter(t, kInf) + 4.0 * std::numeric_limits<double>::epsilon() * t * (1 << std::min(i, 20));
  }
  return t;
}

double numeric_ray_exit(const DomainOracle& dom, const Point& p, const Point& w) {
  const double wn = w.norm();
  const double horizon = search_horizon(dom, p) / wn;
  auto f = [&](double t) { return dom.value(p + t * w); };

  double lo = 0.0;
  double hi;
  double f_hi;
  if (dom.convex()) {
    const double scale = dom.bounding_radius() ? 2.0 * *dom.bounding_radius() + p.norm() : 1.0 + p.norm();
    hi = std::min(scale / wn, horizon);
    f_hi = f(hi);
    while (f_hi < 0.0) {
      if (hi >= horizon) return kInf;
      lo = hi;
      hi = std::min(2.0 * hi, horizon);
      f_hi = f(hi);
    }
  } else {
    // March for the first exit; slices need not be star-shaped about p.
    const double scale = dom.bounding_radius() ? *dom.bounding_radius() : 1.0 + p.norm();
    double step = scale / (256.0 * wn);
    hi = step;
    f_hi = f(hi);
    while (f_hi < 0.0) {
      if (hi >= horizon) return kInf;
      lo = hi;
      if (hi * wn > 2.0 * scale) step *= 1.05;
      hi = std::min(hi + step, horizon);
      f_hi = f(hi);
    }
  }
  if (f_hi == 0.0) return hi;
  boost::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, lo == 0.0 ? dom.value(p) : f(lo), f_hi,
      boost::math::tools::eps_tolerance<double>(40), max_iter);
  return bracket.second;
}

Point to_complex(const RealVector& x) {
  Point p(x.size() / 2);
  for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = {x(2 * j), x(2 * j + 1)};
  return p;
}

}  // namespace

double search_horizon(const DomainOracle& dom, const Point& p) {
  if (auto r = dom.bounding_radius()) return 2.0 * (*r + p.norm()) + 1.0;
  return 1e6 * (1.0 + p.norm());
}

double ray_exit(const DomainOracle& dom, const Point& p, const Point& w, bool closed_forms) {
  double t;
  if (auto closed = closed_forms ? dom.family().closed_ray_exit(p, w) : std::nullopt) {
    t = *closed;
  } else {
    t = numeric_ray_exit(dom, p, w);
  }
  if (!std::isfinite(t)) return kInf;
  return settle_outside(dom, p, w, t);
}

double line_boundary_distance(const DomainOracle& dom, const Point& p, const Point& v,
                              const LineSearchOptions& opts) {
  require_interior(dom, p);
  const double vn = v.norm();
  if (!(vn > 0.0)) throw Error(ErrorCode::ZeroVector, "direction must be nonzero");
  const Point u = v / vn;
  if (opts.closed_forms) {
    if (auto d = dom.family().closed_line_distance(p, u)) return *d;
  }
  const int rays = std::max(opts.rays, 3);
  auto exit_at = [&](double theta) {
    const Point w = std::polar(1.0, theta) * u;
    return ray_exit(dom, p, w, opts.closed_forms);
  };
  std::vector<double> fan(rays);
  for (int k = 0; k < rays; ++k) fan[k] = exit_at(kTwoPi * k / rays);
  const double best = *std::min_element(fan.begin(), fan.end());
  if (!std::isfinite(best)) return kInf;
  // Refine every local minimum of the fan close to the best one: nearly
  // symmetric slices have two basins of almost equal depth.
  std::vector<std::pair<double, int>> minima;
  for (int k = 0; k < rays; ++k) {
    const double prev = fan[(k + rays - 1) % rays], next = fan[(k + 1) % rays];
    if (fan[k] <= prev && fan[k] <= next && fan[k] <= best * (1.0 + 1e-2)) minima.emplace_back(fan[k], k);
  }
  std::sort(minima.begin(), minima.end());
  if (minima.size() > 3) minima.resize(3);
  const double h = kTwoPi / rays;
  double out = best;
  for (const auto& [value, k] : minima) {
    const double theta0 = kTwoPi * k / rays;
    out = std::min(out, detail::golden_section_min(exit_at, theta0 - h, theta0 + h, 40, theta0, value).f);
  }
  return out;
}

std::vector<Point> slice_boundary_points(const DomainOracle& dom, const Point& p, const Point& v, int rays) {
  require_interior(dom, p);
  const double vn = v.norm();
  if (!(vn > 0.0)) throw Error(ErrorCode::ZeroVector, "direction must be nonzero");
  const Point u = v / vn;
  std::vector<Point> out;
  out.reserve(rays);
  for (int k = 0; k < rays; ++k) {
    const Point w = std::polar(1.0, kTwoPi * k / rays) * u;
    const double t = ray_exit(dom, p, w);
    if (std::isfinite(t)) out.push_back(p + t * w);
  }
  return out;
}

double euclidean_boundary_distance(const DomainOracle& dom, const Point& p, bool closed_forms) {
  require_interior(dom, p);
  if (closed_forms) {
    if (auto d = dom.family().closed_boundary_distance(p)) return *d;
  }
  const int m = 2 * dom.dim();
  constexpr int kDirections = 512;

  std::vector<RealVector> dirs;
  dirs.reserve(kDirections);
  double spacing;
  if (m == 2) {
    for (int k = 0; k < kDirections; ++k) {
      RealVector w(2);
      w << std::cos(kTwoPi * k / kDirections), std::sin(kTwoPi * k / kDirections);
      dirs.push_back(w);
    }
    spacing = kTwoPi / kDirections;
  } else {
    Rng rng(0xd1ec7104ULL + static_cast<std::uint64_t>(m));
    for (int k = 0; k < kDirections; ++k) dirs.push_back(rng.real_unit_vector(m));
    // Typical angular gap of a random mesh on S^{m-1}.
    spacing = std::min(1.0, 2.0 * std::pow(static_cast<double>(kDirections), -1.0 / (m - 1)));
  }

  auto exit_along = [&](const RealVector& w) { return ray_exit(dom, p, to_complex(w), closed_forms); };
  RealVector best_w = dirs[0];
  double best = kInf;
  for (const auto& w : dirs) {
    const double t = exit_along(w);
    if (t < best) {
      best = t;
      best_w = w;
    }
  }
  if (!std::isfinite(best)) return kInf;

  // Coordinate-wise golden refinement over rotations of the best direction.
  double h = spacing;
  for (int round = 0; round < 24; ++round) {
    const double before = best;
    for (int axis = 0; axis < m; ++axis) {
      RealVector e = RealVector::Zero(m);
      e(axis) = 1.0;
      e -= e.dot(best_w) * best_w;
      const double en = e.norm();
      if (en < 1e-8) continue;
      e /= en;
      const RealVector base = best_w;
      auto f = [&](double phi) { return exit_along(std::cos(phi) * base + std::sin(phi) * e); };
      const auto r = detail::golden_section_min(f, -h, h, 30, 0.0, best);
      if (r.f < best) {
        best = r.f;
        best_w = (std::cos(r.x) * base + std::sin(r.x) * e).normalized();
      }
    }
    if (round >= 1 && before - best <= 1e-14 * best) break;
    h *= 0.5;
  }
  return best;
}

Point boundary_normal(const DomainOracle& dom, const Point& x) {
  if (x.size() != dom.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  if (std::abs(dom.value(x)) > 1e-8 * (1.0 + x.norm()))
    throw Error(ErrorCode::NotOnBoundary, "point is not on the boundary");
  if (dom.is_singular(x)) throw Error(ErrorCode::SingularBoundaryPoint, "boundary is not smooth here");
  const Point g = dom.gradient(x);
  const double gn = g.norm();
  if (!(gn > 1e-14)) throw Error(ErrorCode::SingularBoundaryPoint, "vanishing gradient");
  return -g / gn;
}

NormalRay normal_reach(const DomainOracle& dom, const Point& x, double max_eps) {
  const Point n = boundary_normal(dom, x);
  constexpr int kGrid = 41;
  auto grid_inside = [&](double eps) {
    for (int k = 0; k < kGrid; ++k) {
      const double t = eps * std::pow(2.0, -0.5 * k);
      if (!dom.contains(x + t * n)) return false;
    }
    return true;
  };

  double eps = std::min(1.0, max_eps);
  if (grid_inside(eps)) {
    while (2.0 * eps <= max_eps && grid_inside(2.0 * eps)) eps *= 2.0;
  } else {
    while (!grid_inside(eps)) {
      eps *= 0.5;
      if (eps < 1e-12) throw Error(ErrorCode::ReachNotFound, "normal leaves the domain at every probe scale");
    }
  }

  double c = kInf;
  for (int k = 0; k < kGrid; ++k) {
    const double t = eps * std::pow(2.0, -0.5 * k);
    c = std::min(c, euclidean_boundary_distance(dom, x + t * n) / t);
  }
  return {x, n, eps, c};
}

Point scaling_group_apply(const std::vector<double>& weights, double t, const Point& p) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "scaling parameter must be positive");
  if (static_cast<Eigen::Index>(weights.size()) + 1 != p.size())
    throw Error(ErrorCode::DimensionMismatch, "weights do not match point dimension");
  Point q = p;
  q(0) *= t;
  for (std::size_t j = 0; j < weights.size(); ++j) q(j + 1) *= std::pow(t, weights[j]);
  return q;
}

Point scaling_group_apply(const DomainOracle& dom, double t, const Point& p) {
  const auto w = dom.weights();
  if (w.empty() && dom.kind() != FamilyKind::HalfPlane)
    throw Error(ErrorCode::NonHomogeneousFamily, "domain carries no scaling group");
  return scaling_group_apply(w, t, p);
}

double homogeneity_residual(const EpigraphFunction& f, const std::vector<double>& weights, double t,
                            const Point& z) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "scaling parameter must be positive");
  if (static_cast<int>(weights.size()) != f.dim() || z.size() != f.dim())
    throw Error(ErrorCode::DimensionMismatch, "weights/point do not match F");
  Point scaled = z;
  for (int j = 0; j < f.dim(); ++j) scaled(j) *= std::pow(t, weights[j]);
  return std::abs(f.value(scaled) / t - f.value(z));
}

double homogeneity_residual(const DomainOracle& dom, double t, const Point& z) {
  const auto* f = dom.epigraph();
  if (!f || dom.weights().empty()) throw Error(ErrorCode::NonHomogeneousFamily, "not a weighted epigraph");
  return homogeneity_residual(*f, dom.weights(), t, z);
}

Point projective_transform(const Point& p, ProjectiveDirection direction) {
  constexpr double kPole = 1e-300;
  const Complex i(0.0, 1.0);
  Point q(p.size());
  if (direction == ProjectiveDirection::Forward) {
    const Complex denom = p(0) + i;
    if (std::abs(denom) <= kPole) throw Error(ErrorCode::PoleHit, "z_0 = -i");
    q(0) = 1.0 / denom;
    for (Eigen::Index j = 1; j < p.size(); ++j) q(j) = p(j) / denom;
  } else {
    if (std::abs(p(0)) <= kPole) throw Error(ErrorCode::PoleHit, "w_0 = 0");
    q(0) = 1.0 / p(0) - i;
    for (Eigen::Index j = 1; j < p.size(); ++j) q(j) = p(j) / p(0);
  }
  return q;
}

}  // namespace kobacore::domains
