#include "kobacore/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "kobacore/parallel.hpp"
#include "kobacore/random.hpp"

namespace kobacore::hyperbolicity {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

Point sigma(const domains::NormalRay& ray, double t) {
  return ray.base + std::exp(-t) * std::min(ray.eps, 1.0) * ray.normal;
}

// Boundary point of the ball / polydisc in direction u from 0.
Point boundary_point(const DomainOracle& dom, const Point& u) {
  if (dom.kind() == domains::FamilyKind::Ball) return *dom.bounding_radius() * u;
  const auto radii = dom.to_json().at("radii").get<std::vector<double>>();
  double m = 0.0;
  for (int j = 0; j < dom.dim(); ++j) m = std::max(m, std::abs(u(j)) / radii[j]);
  return u / m;
}

}  // namespace

double gromov_product(const DistanceFn& dist, const Point& o, const Point& p, const Point& q) {
  return 0.5 * (dist(p, o) + dist(o, q) - dist(p, q));
}

Interval gromov_product(const IntervalDistanceFn& dist, const Point& o, const Point& p, const Point& q) {
  const Interval po = dist(p, o), oq = dist(o, q), pq = dist(p, q);
  return {0.5 * (po.lower + oq.lower - pq.upper), 0.5 * (po.upper + oq.upper - pq.lower)};
}

double four_point_defect_ordered(const DistanceFn& dist, const Quadruple& quad) {
  const double xz = gromov_product(dist, quad.w, quad.x, quad.z);
  const double zy = gromov_product(dist, quad.w, quad.z, quad.y);
  const double xy = gromov_product(dist, quad.w, quad.x, quad.y);
  return std::min(xz, zy) - xy;
}

double four_point_defect(double xy, double xz, double xw, double yz, double yw, double zw) {
  std::array<double, 3> s{xy + zw, xz + yw, xw + yz};
  std::sort(s.begin(), s.end());
  return std::max(0.0, 0.5 * (s[2] - s[1]));
}

double four_point_defect(const DistanceFn& dist, const Quadruple& q) {
  return four_point_defect(dist(q.x, q.y), dist(q.x, q.z), dist(q.x, q.w), dist(q.y, q.z), dist(q.y, q.w),
                           dist(q.z, q.w));
}

double four_point_delta(const DistanceFn& dist, const std::vector<Quadruple>& quads) {
  double best = 0.0;
  for (const auto& q : quads) best = std::max(best, four_point_defect(dist, q));
  return best;
}

FourPointReport four_point_scan(const ScanModel& model, const std::vector<double>& scale_schedule,
                                std::uint64_t seed) {
  if (scale_schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty scale schedule");
  FourPointReport report;
  report.scale_schedule = scale_schedule;
  report.metric_used = model.metric_used;
  report.seed = seed;

  for (double scale : scale_schedule) {
    const ScaleSample s = model.sample(scale);
    if (s.quadruples.empty()) throw Error(ErrorCode::InvalidArgument, "sampler produced no quadruples");
    report.quadruples_per_scale = static_cast<int>(s.quadruples.size());

    std::map<std::pair<int, int>, std::size_t> slot;
    std::vector<std::pair<int, int>> pairs;
    for (const auto& q : s.quadruples)
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          const auto key = std::minmax(q[a], q[b]);
          if (key.first != key.second && slot.emplace(key, pairs.size()).second) pairs.push_back(key);
        }
    std::vector<double> d(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
      d[i] = model.distance(s.points[pairs[i].first], s.points[pairs[i].second]);
    });
    auto D = [&](int a, int b) { return a == b ? 0.0 : d[slot.at(std::minmax(a, b))]; };

    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < s.quadruples.size(); ++k) {
      const auto& q = s.quadruples[k];
      const double v = four_point_defect(D(q[0], q[1]), D(q[0], q[2]), D(q[0], q[3]), D(q[1], q[2]),
                                         D(q[1], q[3]), D(q[2], q[3]));
      if (v > best) {
        best = v;
        best_k = k;
      }
    }
    const auto& w = s.quadruples[best_k];
    report.delta_per_scale.push_back(best);
    report.witness.push_back({s.points[w[0]], s.points[w[1]], s.points[w[2]], s.points[w[3]]});
  }
  return report;
}

ScanModel exact_model(const DomainOracle& dom, int quadruples, std::uint64_t seed, bool planted) {
  using domains::FamilyKind;
  if (dom.kind() != FamilyKind::Ball && dom.kind() != FamilyKind::Polydisc)
    throw Error(ErrorCode::ModelOnly, "exact scans need a ball or polydisc");
  if (quadruples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one quadruple");

  Rng rng(seed);
  std::vector<Point> template_points;
  for (int k = 0; k < 4 * quadruples; ++k) template_points.push_back(boundary_point(dom, rng.unit_vector(dom.dim())));
  const bool plant = planted && dom.kind() == FamilyKind::Polydisc && dom.dim() >= 2;

  ScanModel m;
  m.metric_used = "exact";
  m.distance = [dom](const Point& a, const Point& b) { return metric::exact_distance(dom, a, b); };
  m.sample = [dom, template_points, quadruples, plant](double scale) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    ScaleSample s;
    const double t = std::tanh(scale);
    for (const auto& b : template_points) s.points.push_back(t * b);
    for (int k = 0; k < quadruples; ++k) s.quadruples.push_back({4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3});
    if (plant) {
      const auto radii = dom.to_json().at("radii").get<std::vector<double>>();
      const double a = std::tanh(scale), a2 = std::tanh(2.0 * scale);
      Point x = Point::Zero(dom.dim()), y = x, z = x, w = x;
      y(0) = radii[0] * a2;
      z(0) = w(0) = radii[0] * a;
      z(1) = radii[1] * a;
      w(1) = -radii[1] * a;
      s.points[0] = x;
      s.points[1] = y;
      s.points[2] = z;
      s.points[3] = w;
    }
    return s;
  };
  return m;
}

paths::GeodesicSettings scan_geodesic_settings() {
  paths::GeodesicSettings s;
  s.nodes = 17;
  s.max_nodes = 17;
  s.sweep_tol = 1e-5;
  s.max_sweeps = 0;
  return s;
}

ScanModel homogeneous_surrogate_model(const DomainOracle& dom, const HomogeneousPoolOptions& options,
                                      std::uint64_t seed) {
  if (!dom.homogeneous() || !dom.epigraph())
    throw Error(ErrorCode::NonHomogeneousFamily, dom.name() + " carries no scaling group");
  if (options.pool < 4) throw Error(ErrorCode::InvalidArgument, "pool needs at least 4 points");
  if (options.quadruples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one quadruple");

  const auto* F = dom.epigraph();
  const int d = F->dim();
  Rng rng(seed);
  std::vector<Point> base;
  std::vector<double> exponent;
  for (int i = 0; i < options.pool; ++i) {
    Point z(d);
    for (int j = 0; j < d; ++j) z(j) = rng.complex_normal();
    Point p(d + 1);
    p.tail(d) = z;
    p(0) = Complex(rng.normal(), F->value(z) + std::exp(rng.normal()));
    base.push_back(p);
    exponent.push_back(rng.uniform());
  }
  std::vector<std::array<int, 4>> quads;
  for (int k = 0; k < options.quadruples; ++k) {
    std::array<int, 4> q{};
    for (int a = 0; a < 4; ++a) {
      int idx;
      do {
        idx = static_cast<int>(rng.below(options.pool));
      } while (std::find(q.begin(), q.begin() + a, idx) != q.begin() + a);
      q[a] = idx;
    }
    quads.push_back(q);
  }

  ScanModel m;
  m.metric_used = "khat-length";
  m.distance = metric::SurrogateMetric(dom, options.settings);
  m.sample = [dom, base, exponent, quads](double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    ScaleSample s;
    for (std::size_t i = 0; i < base.size(); ++i)
      s.points.push_back(domains::scaling_group_apply(dom, std::pow(t, exponent[i]), base[i]));
    s.quadruples = quads;
    return s;
  };
  return m;
}

double thin_triangle_delta(const DomainOracle& dom, const Point& p, const Point& q, const Point& r,
                           const paths::GeodesicSettings& settings, const DistanceFn& dist) {
  const DistanceFn D = dist ? dist : DistanceFn(metric::SurrogateMetric(dom, settings));
  const std::array<PolyCurve, 3> sides{paths::optimize_geodesic(dom, p, q, settings).curve,
                                       paths::optimize_geodesic(dom, q, r, settings).curve,
                                       paths::optimize_geodesic(dom, r, p, settings).curve};
  // Distance from x to a side: D at the Euclidean foot of x on the few
  // segments nearest to x.
  auto to_side = [&](const Point& x, const PolyCurve& side) {
    std::vector<std::pair<double, Point>> feet;
    for (std::size_t k = 0; k + 1 < side.nodes.size(); ++k) {
      const Point& a = side.nodes[k];
      const Point e = side.nodes[k + 1] - a;
      const double len2 = e.squaredNorm();
      const double s = len2 > 0.0 ? std::clamp(e.dot(x - a).real() / len2, 0.0, 1.0) : 0.0;
      const Point foot = a + s * e;
      feet.emplace_back((x - foot).norm(), foot);
    }
    const std::size_t keep = std::min<std::size_t>(3, feet.size());
    std::partial_sort(feet.begin(), feet.begin() + keep, feet.end(),
                      [](const auto& u, const auto& v) { return u.first < v.first; });
    double best = kInf;
    for (std::size_t k = 0; k < keep && best > 0.0; ++k)
      best = std::min(best, feet[k].first == 0.0 ? 0.0 : D(x, feet[k].second));
    return best;
  };
  double delta = 0.0;
  for (int i = 0; i < 3; ++i)
    for (const auto& x : sides[i].nodes)
      delta = std::max(delta, std::min(to_side(x, sides[(i + 1) % 3]), to_side(x, sides[(i + 2) % 3])));
  return delta;
}

DivergenceReport boundary_divergence_probe(const DomainOracle& dom, const Point& x, const Point& y,
                                           const std::vector<double>& t_schedule) {
  if ((x - y).norm() == 0.0) throw Error(ErrorCode::InvalidArgument, "boundary points must be distinct");
  if (t_schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty t schedule");
  const auto rx = domains::normal_reach(dom, x);
  const auto ry = domains::normal_reach(dom, y);
  DivergenceReport rep;
  std::vector<double> ts, ls;
  for (double t : t_schedule) {
    const double lower = metric::distance_lower(dom, sigma(rx, t), sigma(ry, t));
    rep.rows.push_back({t, lower});
    ts.push_back(t);
    ls.push_back(lower);
  }
  rep.slope = least_squares_slope(ts, ls);
  return rep;
}

FlatShadowingReport flat_shadowing_probe(const DomainOracle& dom, const Point& x, const Point& y,
                                         const std::vector<double>& t_schedule, bool strict,
                                         const paths::GeodesicSettings& settings) {
  if (t_schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty t schedule");
  FlatShadowingReport rep;
  rep.t_schedule = t_schedule;
  if ((x - y).norm() == 0.0) {
    rep.upper.assign(t_schedule.size(), 0.0);
    return rep;
  }
  if (strict) {
    // The real segment and the imaginary direction from x must stay on the boundary.
    const double tol = 1e-9 * (1.0 + x.norm() + y.norm());
    const Complex I(0.0, 1.0);
    for (int k = 0; k <= 8; ++k) {
      const double s = k / 8.0;
      for (const Point& z : {Point(x + s * (y - x)), Point(x + I * s * (y - x))})
        if (std::abs(dom.value(z)) > tol) throw Error(ErrorCode::NotInFlat, "points do not span a boundary flat");
    }
  }
  const auto rx = domains::normal_reach(dom, x);
  const auto ry = domains::normal_reach(dom, y);
  for (double t : t_schedule) {
    const double u = metric::distance_upper(dom, sigma(rx, t), sigma(ry, t), settings);
    rep.upper.push_back(u);
    rep.sup_gap = std::max(rep.sup_gap, u);
  }
  const double first = rep.upper.front(), last = rep.upper.back();
  rep.ratio = first > 0.0 ? last / first : (last > 0.0 ? kInf : 1.0);
  rep.bounded = rep.ratio <= 1.2;
  return rep;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::BoundedConsistent:
      return "bounded-consistent";
    case Verdict::Growing:
      return "growing";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

HyperbolicityVerdict verdict(const std::vector<double>& scales, const std::vector<double>& deltas,
                             const Thresholds& thresholds) {
  if (scales.size() < 2 || deltas.size() != scales.size())
    throw Error(ErrorCode::InvalidArgument, "a verdict needs at least two scales");
  HyperbolicityVerdict v;
  v.thresholds = thresholds;
  const double top = *std::max_element(deltas.begin(), deltas.end());
  if (top <= 0.0) {
    v.verdict = Verdict::BoundedConsistent;
    return v;
  }
  const double floor = 1e-12 * top;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "scales must be positive");
    lx.push_back(std::log2(scales[i]));
    ly.push_back(std::log2(std::max(deltas[i], floor)));
  }
  v.exponent = least_squares_slope(lx, ly);
  v.growth_ratio = deltas.front() > 0.0 ? deltas.back() / deltas.front() : kInf;
  if (v.exponent > thresholds.exponent)
    v.verdict = Verdict::Growing;
  else if (v.growth_ratio <= thresholds.growth_ratio)
    v.verdict = Verdict::BoundedConsistent;
  else
    v.verdict = Verdict::Inconclusive;
  return v;
}

HyperbolicityVerdict verdict(const FourPointReport& report, const Thresholds& thresholds) {
  return verdict(report.scale_schedule, report.delta_per_scale, thresholds);
}

}  // namespace kobacore::hyperbolicity
