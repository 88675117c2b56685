#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kobacore/domains.hpp"
#include "kobacore/metric.hpp"
#include "kobacore/paths.hpp"

namespace kobacore::hyperbolicity {

using domains::DomainOracle;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

using IntervalDistanceFn = std::function<Interval(const Point&, const Point&)>;

/// (p|q)_o = (D(p,o) + D(o,q) - D(p,q)) / 2.
double gromov_product(const DistanceFn& dist, const Point& o, const Point& p, const Point& q);
/// Worst-case combination of interval distances.
Interval gromov_product(const IntervalDistanceFn& dist, const Point& o, const Point& p, const Point& q);

struct GromovProductSample {
  Point o, p, q;
  double value = 0.0;
};

struct Quadruple {
  Point x, y, z, w;
};

/// min((x|z)_w, (z|y)_w) - (x|y)_w for this labelling.
double four_point_defect_ordered(const DistanceFn& dist, const Quadruple& quad);
/// Largest ordered defect over all labellings, floored at 0. Equals
/// (S_max - S_mid) / 2 for the three pair sums d(x,y)+d(z,w), ...
double four_point_defect(const DistanceFn& dist, const Quadruple& quad);
double four_point_defect(double xy, double xz, double xw, double yz, double yw, double zw);
double four_point_delta(const DistanceFn& dist, const std::vector<Quadruple>& quads);

/// Points for one scale plus the quadruples, given as indices into them.
struct ScaleSample {
  std::vector<Point> points;
  std::vector<std::array<int, 4>> quadruples;
};

/// A scan model couples a distance with a seeded sampler.
struct ScanModel {
  std::string metric_used;
  DistanceFn distance;
  std::function<ScaleSample(double scale)> sample;
};

struct FourPointReport {
  std::vector<double> scale_schedule;
  std::vector<double> delta_per_scale;
  std::vector<Quadruple> witness;
  std::string metric_used;
  std::uint64_t seed = 0;
  int quadruples_per_scale = 0;
};

/// Per scale: every distinct pair used by some quadruple is evaluated once
/// (in parallel), then the max defect is taken. Ties keep the first witness.
FourPointReport four_point_scan(const ScanModel& model, const std::vector<double>& scale_schedule,
                                std::uint64_t seed);

/// Exact-distance model for the ball and polydisc. Quadruple points are
/// tanh(scale) * b with b a seeded boundary point in a random direction, so
/// each point sits at distance scale from 0; directions are shared across
/// scales. With `planted` (polydisc, dim >= 2) the first quadruple is the
/// product-metric witness with R = scale, whose defect is exactly R.
ScanModel exact_model(const DomainOracle& dom, int quadruples, std::uint64_t seed, bool planted = true);

/// Scan settings used for surrogate distances inside scans.
paths::GeodesicSettings scan_geodesic_settings();

struct HomogeneousPoolOptions {
  int pool = 16;
  int quadruples = 100;
  paths::GeodesicSettings settings = scan_geodesic_settings();
};

/// Surrogate model for a homogeneous epigraph family. A seeded pool of
/// template points x_i with exponents u_i in [0, 1]; at scale t point i is
/// g_{t^{u_i}}(x_i). Quadruples are seeded 4-subsets of the pool, fixed
/// across scales. Distances are khat-length upper bounds.
ScanModel homogeneous_surrogate_model(const DomainOracle& dom, const HomogeneousPoolOptions& options,
                                      std::uint64_t seed);

/// Max over side nodes of the distance to the union of the other two sides,
/// each taken as a polygonal curve. Sides come from optimize_geodesic with
/// `settings`; distances use `dist` when given, else the surrogate upper bound.
double thin_triangle_delta(const DomainOracle& dom, const Point& p, const Point& q, const Point& r,
                           const paths::GeodesicSettings& settings = {}, const DistanceFn& dist = {});

struct DivergenceRow {
  double t = 0.0;
  double lower = 0.0;
};

struct DivergenceReport {
  std::vector<DivergenceRow> rows;
  /// Least-squares slope of lower against t.
  double slope = 0.0;
};

/// Lower bounds between x + e^{-t} eps n_x and y + e^{-t} eps n_y.
DivergenceReport boundary_divergence_probe(const DomainOracle& dom, const Point& x, const Point& y,
                                           const std::vector<double>& t_schedule);

struct FlatShadowingReport {
  std::vector<double> t_schedule;
  std::vector<double> upper;
  double sup_gap = 0.0;
  double ratio = 1.0;
  bool bounded = true;
};

/// Upper bounds between the normal rays over x and y. With `strict`, x and
/// y must span a boundary flat (NotInFlat otherwise).
FlatShadowingReport flat_shadowing_probe(const DomainOracle& dom, const Point& x, const Point& y,
                                         const std::vector<double>& t_schedule, bool strict = true,
                                         const paths::GeodesicSettings& settings = {});

struct Thresholds {
  /// Growing when the fitted exponent of delta against scale exceeds this.
  double exponent = 0.25;
  /// Bounded-consistent when delta(last)/delta(first) stays below this.
  double growth_ratio = 1.5;
};

enum class Verdict { BoundedConsistent, Growing, Inconclusive };
const char* to_string(Verdict v);

struct HyperbolicityVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double growth_ratio = 1.0;
  /// Least-squares slope of log2 delta against log2 scale.
  double exponent = 0.0;
  Thresholds thresholds;
};

HyperbolicityVerdict verdict(const FourPointReport& report, const Thresholds& thresholds = {});
HyperbolicityVerdict verdict(const std::vector<double>& scales, const std::vector<double>& deltas,
                             const Thresholds& thresholds = {});

}  // namespace kobacore::hyperbolicity
