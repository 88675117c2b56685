#pragma once

// Hausdorff distances between sampled closed sets and probes of how the
// metric estimators move along sequences of domains.

#include <functional>
#include <utility>
#include <vector>

#include "kobacore/domains.hpp"
#include "kobacore/hilbert.hpp"
#include "kobacore/metric.hpp"

namespace kobacore::convergence {

using domains::DomainOracle;

/// Grid sample of a closed set {value <= 0} in R^m, restricted to the cube
/// [-window, window]^m with `resolution` points per axis. Only the shell is
/// kept: grid points of the set with an axis neighbour outside it (grid
/// edges count as outside).
class SetSampler {
 public:
  SetSampler(std::function<double(const RealVector&)> value, int real_dim, double window, int resolution = 0);

  /// Complex coordinates are split as (Re z_0, Im z_0, Re z_1, ...).
  static SetSampler from_domain(const DomainOracle& dom, double window, int resolution = 0);
  static SetSampler from_body(const hilbert::RealConvexBody& body, double window, int resolution = 0);

  int real_dim() const { return dim_; }
  double window() const { return window_; }
  int resolution() const { return resolution_; }
  double value(const RealVector& x) const { return value_(x); }
  bool contains(const RealVector& x) const { return value_(x) <= 0.0; }
  const std::vector<RealVector>& cloud() const { return cloud_; }
  /// Diagonal of one grid cell.
  double cell_diameter() const;

  /// The set intersected with the closed ball B_R(0), resampled on [-R, R]^m.
  SetSampler truncated(double R) const;

 private:
  std::function<double(const RealVector&)> value_;
  int dim_;
  double window_;
  int resolution_;
  std::vector<RealVector> cloud_;
};

/// 128 per axis in the plane, 32 in R^3 and R^4, 12 beyond.
int default_resolution(int real_dim);

struct HausdorffEstimate {
  double value = 0.0;
  /// Resolution error bar: the larger cell diagonal of the two grids.
  double error = 0.0;
};

/// Throws EmptySampleCloud, DimensionMismatch.
HausdorffEstimate hausdorff_distance(const SetSampler& a, const SetSampler& b);
/// Hausdorff distance of the truncations to B_R(0). Throws InvalidArgument for R <= 0.
HausdorffEstimate local_hausdorff(const SetSampler& a, const SetSampler& b, double R);

/// g_t(dom) for each t. Throws NonHomogeneousFamily, InvalidArgument for t <= 0.
std::vector<DomainOracle> rescaled_family(const DomainOracle& dom, const std::vector<double>& t_schedule);

/// Omega_{F + eps ||z||^2}, keeping the scaling weights of dom.
DomainOracle perturbed_epigraph(const DomainOracle& dom, double eps);

struct ProbeOptions {
  /// Skip oracles that do not contain every pair instead of throwing PairExitsDomain.
  bool skip_exiting = true;
  paths::GeodesicSettings settings = {};
};

struct ProbeRow {
  double label = 0.0;
  bool skipped = false;
  /// One interval per pair.
  std::vector<metric::MetricBounds> intervals;
  /// khat(p; q - p) per pair.
  std::vector<double> khat;
  /// Sup over pairs of the endpoint drift against the limit.
  double interval_drift = 0.0;
  double khat_drift = 0.0;
};

struct ProbeReport {
  ProbeRow limit;
  std::vector<ProbeRow> rows;
};

ProbeReport metric_convergence_probe(const std::vector<DomainOracle>& sequence, const std::vector<double>& labels,
                                     const DomainOracle& limit, const std::vector<std::pair<Point, Point>>& pairs,
                                     const ProbeOptions& options = {});

}  // namespace kobacore::convergence
