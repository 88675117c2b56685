#pragma once

// Hilbert metric on bounded convex bodies in R^d.
//
//   H(x, y) = 1/2 log( |a-y| |b-x| / (|a-x| |b-y|) ),   chord order a, x, y, b.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "kobacore/hyperbolicity.hpp"

namespace kobacore::hilbert {

using RealPoint = Eigen::VectorXd;

class RealConvexBody {
 public:
  int dim() const { return dim_; }
  /// Negative inside, zero on the boundary, positive outside.
  double value(const RealPoint& x) const { return value_(x); }
  bool contains(const RealPoint& x) const { return value_(x) < 0.0; }
  /// Radius of a ball about the origin containing the body.
  double bounding_radius() const { return bounding_radius_; }
  /// An interior point used as the base of scans.
  const RealPoint& center() const { return center_; }
  /// Polygon vertices in counter-clockwise order; empty for smooth bodies.
  const std::vector<RealPoint>& vertices() const { return vertices_; }
  const std::string& name() const { return name_; }
  nlohmann::json to_json() const { return json_; }

  /// First exit parameter of x + t u (u unit), by bisection to 1e-12.
  double exit(const RealPoint& x, const RealPoint& u) const;

  /// Boundary points (a, b) of the chord through x and y, with order a, x, y, b.
  std::pair<RealPoint, RealPoint> chord(const RealPoint& x, const RealPoint& y) const;

  friend RealConvexBody disk(double radius, int dim);
  friend RealConvexBody polygon(std::vector<RealPoint> vertices);
  friend RealConvexBody square();
  friend RealConvexBody regular_polygon(int n);
  friend RealConvexBody affine_image(const RealConvexBody& body, const Eigen::MatrixXd& A, const RealPoint& b);

 private:
  int dim_ = 2;
  std::function<double(const RealPoint&)> value_;
  double bounding_radius_ = 1.0;
  RealPoint center_;
  std::vector<RealPoint> vertices_;
  std::string name_;
  nlohmann::json json_;
};

/// Euclidean ball of the given radius about 0 in R^dim.
RealConvexBody disk(double radius = 1.0, int dim = 2);
/// Convex polygon; vertices in either orientation. Throws InvalidSpec when
/// the vertices are not in convex position.
RealConvexBody polygon(std::vector<RealPoint> vertices);
/// [-1, 1]^2.
RealConvexBody square();
/// Regular n-gon inscribed in the unit circle, a vertex on the positive x axis.
RealConvexBody regular_polygon(int n);
/// {A x + b : x in body}. A must be invertible.
RealConvexBody affine_image(const RealConvexBody& body, const Eigen::MatrixXd& A, const RealPoint& b);

/// {"body":"disk"}, {"body":"square"}, {"body":"ngon","n":64},
/// {"body":"polygon","vertices":[[x,y],...]},
/// {"body":"affine","matrix":[[..],..],"offset":[..],"of":{...}}.
RealConvexBody body_from_json(const nlohmann::json& spec);
std::vector<std::string> supported_bodies();

/// Throws NotInterior, DegenerateChord.
double hilbert_distance(const RealConvexBody& body, const RealPoint& x, const RealPoint& y);

/// Real coordinates packed into the complex point type used by scans.
Point to_point(const RealPoint& x);
RealPoint to_real(const Point& p);

/// Points c + tanh(scale) (b - c) with c the body center and b a seeded
/// boundary point, directions shared across scales. When the body has
/// vertices and `planted` is set, the first quadruple is built from adjacent
/// vertices V1, V2 and the midpoint M of their edge: tanh(scale) * {V1, V2,
/// -M, M} about the center. On the square its defect is scale / 2.
hyperbolicity::ScanModel hilbert_model(const RealConvexBody& body, int quadruples, std::uint64_t seed,
                                       bool planted = true);

hyperbolicity::FourPointReport hilbert_four_point_scan(const RealConvexBody& body, int quadruples,
                                                       const std::vector<double>& scale_schedule,
                                                       std::uint64_t seed, bool planted = true);

}  // namespace kobacore::hilbert
