#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kobacore/curve.hpp"
#include "kobacore/domains.hpp"

namespace kobacore::paths {

using domains::DomainOracle;

/// Uniform nodes on [p, q]. Throws NotInterior for the endpoints and
/// SegmentExitsDomain when a sample of the segment leaves the domain.
PolyCurve straight_segment(const DomainOracle& dom, const Point& p, const Point& q, int n_nodes);

struct GeodesicSettings {
  /// Node count of the last regular level; levels start at coarse_nodes
  /// and insert midpoints (5, 9, 17, 33, ...).
  int nodes = 33;
  int coarse_nodes = 5;
  /// Extra doublings are allowed up to this count while the curve stays
  /// stall_ratio above lower_bound and refinement still pays.
  int max_nodes = 65;
  double lower_bound = 0.0;
  double stall_ratio = 1.2;
  /// L-BFGS iterations per level, then at most max_sweeps node-wise
  /// golden sweeps as a polish.
  int max_iterations = 200;
  int max_sweeps = 4;
  /// Stop when a sweep improves the length by less than this (relative to
  /// 1 + length); also the L-BFGS function tolerance.
  double sweep_tol = 1e-7;
  int golden_iterations = 20;
  /// Random real directions tried per node per sweep, besides the local
  /// descent direction.
  int random_directions = 1;
  /// Also start from the grid shortest path in the complex line.
  bool graph_seed = false;
  int graph_grid = 96;
  int line_rays = 64;
  std::uint64_t seed = 0;
};

struct GeodesicResult {
  PolyCurve curve;
  /// Certified khat-length of curve.
  double length = 0.0;
  /// Discrete objective after every sweep (non-increasing within a level).
  std::vector<double> sweep_lengths;
  /// Certified length after each level (non-increasing).
  std::vector<double> level_lengths;
  int sweeps = 0;
  bool max_iterations = false;
  std::string start;
};

GeodesicResult optimize_geodesic(const DomainOracle& dom, const Point& p, const Point& q,
                                 const GeodesicSettings& settings = {});

struct GridPath {
  double length = 0.0;
  PolyCurve curve;
};

/// Grid shortest path in the complex line through p and q, edge weight
/// khat(midpoint; edge) * |edge|. The window is the square of half-width
/// `window` centred at (p+q)/2 in line coordinates (default: the bounding
/// ball, or 4 (1 + |p-q|) for unbounded domains). Throws PointsOutsideWindow.
GridPath dijkstra_grid_path(const DomainOracle& dom, const Point& p, const Point& q, int grid_n,
                            std::optional<double> window = std::nullopt);
double dijkstra_grid_distance(const DomainOracle& dom, const Point& p, const Point& q, int grid_n,
                              std::optional<double> window = std::nullopt);

/// sigma(t) = x + e^{-t} eps n_x, t uniform on [0, t_max], eps = min(ray.eps, 1).
PolyCurve normal_ray_curve(const DomainOracle& dom, const domains::NormalRay& ray, double t_max, int n_nodes);
PolyCurve normal_ray_curve(const DomainOracle& dom, const Point& x, double t_max, int n_nodes);

struct QuasiGeodesicReport {
  double A = 1.0;
  double B = 0.0;
  int pairs_tested = 0;
  std::string metric_used;
  bool degenerate = false;
};

QuasiGeodesicReport qg_constants_measure(const DistanceFn& dist, const PolyCurve& curve,
                                         const std::string& metric_used = "exact");

struct ShadowingReport {
  double sup_gap = 0.0;
  double base_gap = 0.0;
  double M_effective = 0.0;
};

ShadowingReport shadowing_gap(const DistanceFn& dist, const PolyCurve& a, const PolyCurve& b);

}  // namespace kobacore::paths
