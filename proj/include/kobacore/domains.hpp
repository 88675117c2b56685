#pragma once

// Domain oracles for the families used throughout the laboratory, plus the
// boundary-distance primitives every estimator is built from:
//
//   delta(p)    Euclidean distance from p to the boundary,
//   delta(p;v)  distance from p to the boundary inside the complex line p + C v.
//
// A domain is described by a defining function r with Omega = {r < 0}.
// All oracles are immutable after construction and may be shared freely
// between threads.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kobacore/types.hpp"

namespace kobacore::domains {

enum class FamilyKind {
  Ball,
  Polydisc,
  HalfPlane,
  PNormCone,
  HomogeneousEpigraph,
  PolynomialEpigraph,
  ProjectiveImage,
  Rescaled,
  Custom,
};

const char* to_string(FamilyKind kind);

/// coeff * prod_j |z_j|^{powers[j]}
struct Monomial {
  double coeff = 1.0;
  std::vector<double> powers;
};

/// F(z) = norm_coeff * ||z||_p + sum of monomials, on C^d.
class EpigraphFunction {
 public:
  EpigraphFunction(int d, double norm_coeff, double p, std::vector<Monomial> monomials);

  static EpigraphFunction pnorm(int d, double p);
  static EpigraphFunction polynomial(int d, std::vector<Monomial> monomials);

  int dim() const { return d_; }
  double norm_coeff() const { return norm_coeff_; }
  double p() const { return p_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  double value(const Point& z) const;
  /// Real gradient packed as a complex vector (d/dx_j + i d/dy_j).
  Point gradient(const Point& z) const;
  /// False where F fails to be C^1 (cone tip of the norm term, |z_j|^a with a <= 1).
  bool smooth_at(const Point& z) const;

  /// F + eps * ||z||_2^2.
  EpigraphFunction plus_square_norm(double eps) const;

  nlohmann::json to_json() const;

 private:
  int d_;
  double norm_coeff_;
  double p_;
  std::vector<Monomial> monomials_;
};

/// Hooks a family implementation provides. Closed forms are optional; the
/// free functions below fall back to numeric root finding when absent.
class Family {
 public:
  virtual ~Family() = default;

  virtual FamilyKind kind() const = 0;
  virtual int dim() const = 0;
  virtual double value(const Point& p) const = 0;
  virtual Point gradient(const Point& p) const = 0;
  virtual nlohmann::json to_json() const = 0;

  virtual bool bounded() const { return false; }
  virtual std::optional<double> bounding_radius() const { return std::nullopt; }
  virtual bool convex() const { return true; }
  virtual bool c_convex() const { return true; }
  virtual bool smooth_boundary() const { return true; }
  virtual bool is_singular(const Point& x) const;
  virtual std::vector<Point> singular_points() const { return {}; }

  /// Scaling-group weights (delta_1..delta_d); empty when the family has no group.
  virtual std::vector<double> weights() const { return {}; }
  /// True when the domain is actually invariant under the scaling group.
  virtual bool homogeneous() const { return false; }
  virtual const EpigraphFunction* epigraph() const { return nullptr; }

  /// Closed-form first exit of the real ray p + t w, t > 0 (w unit). Returns
  /// nullopt when no closed form exists; +inf when the ray never leaves.
  virtual std::optional<double> closed_ray_exit(const Point& p, const Point& w) const;
  virtual std::optional<double> closed_line_distance(const Point& p, const Point& u) const;
  virtual std::optional<double> closed_boundary_distance(const Point& p) const;
};

class DomainOracle {
 public:
  explicit DomainOracle(std::shared_ptr<const Family> family);

  FamilyKind kind() const { return family_->kind(); }
  int dim() const { return family_->dim(); }
  double value(const Point& p) const { return family_->value(p); }
  Point gradient(const Point& p) const { return family_->gradient(p); }
  bool contains(const Point& p) const;

  bool bounded() const { return family_->bounded(); }
  std::optional<double> bounding_radius() const { return family_->bounding_radius(); }
  bool convex() const { return family_->convex(); }
  bool c_convex() const { return family_->c_convex(); }
  /// False for families with non-smooth boundary pieces beyond the
  /// registered singular points (p = 1 cones).
  bool smooth_boundary() const { return family_->smooth_boundary(); }
  bool is_singular(const Point& x) const { return family_->is_singular(x); }
  std::vector<Point> singular_points() const { return family_->singular_points(); }
  std::vector<double> weights() const { return family_->weights(); }
  bool homogeneous() const { return family_->homogeneous(); }
  const EpigraphFunction* epigraph() const { return family_->epigraph(); }
  const Family& family() const { return *family_; }

  nlohmann::json to_json() const { return family_->to_json(); }
  std::string name() const;

 private:
  std::shared_ptr<const Family> family_;
};

// ---------------------------------------------------------------------------
// Construction

DomainOracle make_ball(int dim, double radius = 1.0);
DomainOracle make_polydisc(std::vector<double> radii);
/// {Im z_0 > 0} x C^{dim-1}.
DomainOracle make_half_plane(int dim = 1);
/// C_p = {(z_0, z) in C^{d+1} : Im z_0 > ||z||_p}.
DomainOracle make_pnorm_cone(int d, double p);
/// Omega_F. With weights the family carries the scaling group
/// diag(t, t^{w_1}, ...); require_homogeneous rejects F that is not
/// invariant under it (checked on seeded samples).
DomainOracle make_epigraph(EpigraphFunction f, std::vector<double> weights = {},
                           bool require_homogeneous = false);
/// Image of a p-norm cone under f(z) = (1/(z_0+i), z/(z_0+i)).
DomainOracle make_projective_image(int d, double p = 2.0);
/// g_t(Omega) for a family carrying a scaling group.
DomainOracle make_rescaled(const DomainOracle& source, double t);

struct CustomSpec {
  std::string name = "custom";
  int dim = 1;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  bool bounded = false;
  std::optional<double> bounding_radius;
  bool convex = false;
  bool c_convex = false;
};
DomainOracle make_custom(CustomSpec spec);

/// Builds a domain from its JSON description, e.g. {"family":"pcone","d":2,"p":2}.
DomainOracle domain_from_json(const nlohmann::json& spec);
std::vector<std::string> supported_families();

// ---------------------------------------------------------------------------
// Boundary distances

struct LineSearchOptions {
  int rays = 64;
  /// Use family closed forms where available.
  bool closed_forms = true;
};

inline constexpr double kRootRelTol = 2e-12;

/// Horizon beyond which an unbounded ray is declared line-free.
double search_horizon(const DomainOracle& dom, const Point& p);

/// First exit parameter of p + t w (w a unit vector), +inf when the ray
/// stays inside up to the search horizon. The returned parameter is on the
/// closed complement: p + t w is not in the domain.
double ray_exit(const DomainOracle& dom, const Point& p, const Point& w,
                bool closed_forms = true);

/// delta(p; v). Throws NotInterior / ZeroVector.
double line_boundary_distance(const DomainOracle& dom, const Point& p, const Point& v,
                              const LineSearchOptions& opts = {});

/// Boundary points of the slice (p + C v) found along a fan of rays from p;
/// rays that never exit are skipped.
std::vector<Point> slice_boundary_points(const DomainOracle& dom, const Point& p,
                                         const Point& v, int rays = 64);

/// delta(p). Closed forms for ball/polydisc/half-plane, direction-mesh
/// minimisation otherwise.
double euclidean_boundary_distance(const DomainOracle& dom, const Point& p,
                                   bool closed_forms = true);

// ---------------------------------------------------------------------------
// Normals and reach

/// Unit inward normal -grad r / |grad r| at a smooth boundary point.
Point boundary_normal(const DomainOracle& dom, const Point& x);

struct NormalRay {
  Point base;
  Point normal;
  double eps = 0.0;
  /// min over the reach grid of delta(x + t n) / t.
  double c_lower = 0.0;
};

NormalRay normal_reach(const DomainOracle& dom, const Point& x, double max_eps = 1.0);

// ---------------------------------------------------------------------------
// Scaling group, homogeneity, projective map

/// diag(t, t^{w_1}, ..., t^{w_d}) applied to p (also the differential on vectors).
Point scaling_group_apply(const DomainOracle& dom, double t, const Point& p);
Point scaling_group_apply(const std::vector<double>& weights, double t, const Point& p);

/// |(1/t) F(t^{w_1} z_1, ...) - F(z)| for z in C^d.
double homogeneity_residual(const EpigraphFunction& f, const std::vector<double>& weights,
                            double t, const Point& z);
double homogeneity_residual(const DomainOracle& dom, double t, const Point& z);

enum class ProjectiveDirection { Forward, Inverse };

/// f(z) = (1/(z_0+i), z_1/(z_0+i), ...) and its inverse. Throws PoleHit.
Point projective_transform(const Point& p, ProjectiveDirection direction);

// ---------------------------------------------------------------------------
// Structural probes

struct FiniteTypeResult {
  /// Least total order |alpha|+|beta| with a coefficient above tolerance.
  std::optional<int> order;
  /// Largest |coefficient| of that order (0 when no type up to the cap).
  double coefficient = 0.0;
};

struct FiniteTypeOptions {
  int order_cap = 8;
  double radius = 1e-2;
  double tolerance = 1e-6;
};

/// Taylor orders of zeta -> r(base + zeta v) at 0. Throws NotOnBoundary.
FiniteTypeResult finite_type_probe(const DomainOracle& dom, const Point& base,
                                   const Point& line_dir, const FiniteTypeOptions& opts = {});

struct LConvexityEstimate {
  double C = 0.0;
  double L = 1.0;
  double slope = 0.0;
  double r = 0.0;
  double R = 0.0;
  int samples = 0;
  /// max over samples of delta(p;v) / (C delta(p)^{1/L}) - 1 (>= 0).
  double residual = 0.0;
  /// Fitted slope too small for any finite L.
  bool unbounded = false;
};

LConvexityEstimate l_convexity_fit(const DomainOracle& dom, double r, double R, int samples,
                                   std::uint64_t seed);

enum class SliceTopology { Empty, Connected, Disconnected };
const char* to_string(SliceTopology t);

/// Connected components of the rasterised slice Omega cap (p + C v).
SliceTopology c_convex_slice_check(const DomainOracle& dom, const Point& p, const Point& v,
                                   int grid = 128);

}  // namespace kobacore::domains
