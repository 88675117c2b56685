#pragma once

// Computable sandwich for the Kobayashi metric of a (C-)convex domain.
//
//   khat(p; v) = |v| / delta(p; v)      upper envelope (affine disks)
//   khat / 4                            lower bound, C-convex domains only
//
// Distances: upper bounds integrate khat along optimised curves, lower
// bounds come from the log-ratio estimates on the complex line through
// the two points. Exact closed forms are provided for the model domains
// (ball, polydisc, half-plane) and serve as oracles.

#include <string>

#include "kobacore/curve.hpp"
#include "kobacore/domains.hpp"
#include "kobacore/paths.hpp"

namespace kobacore::metric {

using domains::DomainOracle;

/// |v| / delta(p; v); 0 for v = 0 or an unbounded slice.
double khat(const DomainOracle& dom, const Point& p, const Point& v,
            const domains::LineSearchOptions& opts = {});
/// khat / 4. Throws NotCConvex when the domain is not flagged C-convex.
double k_lower(const DomainOracle& dom, const Point& p, const Point& v,
               const domains::LineSearchOptions& opts = {});

/// Adaptive Gauss-Kronrod (15 points). The returned integral includes the
/// Kronrod error estimate, so an unconverged subdivision stays an upper bound.
struct QuadratureOptions {
  double rel_tol = 1e-8;
  int max_depth = 10;
  domains::LineSearchOptions line = {};
};

/// Integral of khat(sigma; sigma') over one straight segment.
double segment_length_upper(const DomainOracle& dom, const Point& a, const Point& b,
                            const QuadratureOptions& opts = {});
/// Sum of segment integrals. Throws NodeOutsideDomain.
double curve_length_upper(const DomainOracle& dom, const PolyCurve& curve,
                          const QuadratureOptions& opts = {});
/// Cumulative khat-length at each node (first entry 0).
std::vector<double> cumulative_length_upper(const DomainOracle& dom, const PolyCurve& curve,
                                            const QuadratureOptions& opts = {});

/// khat-length of the optimised curve joining p and q.
double distance_upper(const DomainOracle& dom, const Point& p, const Point& q,
                      const paths::GeodesicSettings& settings = {});

/// max over slice boundary points xi of 1/4 |log(|q-xi| / |p-xi|)|.
double distance_lower_line(const DomainOracle& dom, const Point& p, const Point& q, int rays = 64);
/// 1/4 log(1 + |p-q| / min(delta(p; q-p), delta(q; p-q))).
double distance_lower_sharp(const DomainOracle& dom, const Point& p, const Point& q);
double distance_lower(const DomainOracle& dom, const Point& p, const Point& q);

bool has_exact_model(const DomainOracle& dom);
/// Closed-form Kobayashi distance on balls, polydiscs and half-planes.
/// On H x C^{n-1} only z_0 contributes. Throws ModelOnly otherwise.
double exact_distance(const DomainOracle& dom, const Point& p, const Point& q);
double exact_infinitesimal(const DomainOracle& dom, const Point& p, const Point& v);

struct MetricBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::string lower_tag;
  std::string upper_tag;

  bool contains(double x, double tol = 0.0) const { return x >= lower - tol && x <= upper + tol; }
  double width() const { return upper - lower; }
};

MetricBounds distance_interval(const DomainOracle& dom, const Point& p, const Point& q,
                               const paths::GeodesicSettings& settings = {});

/// Distance callable backed by distance_upper.
class SurrogateMetric {
 public:
  SurrogateMetric(DomainOracle dom, paths::GeodesicSettings settings = {})
      : dom_(std::move(dom)), settings_(settings) {}

  double operator()(const Point& p, const Point& q) const { return distance_upper(dom_, p, q, settings_); }

  const DomainOracle& domain() const { return dom_; }
  const paths::GeodesicSettings& settings() const { return settings_; }

 private:
  DomainOracle dom_;
  paths::GeodesicSettings settings_;
};

}  // namespace kobacore::metric
