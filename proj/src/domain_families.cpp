#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>

#include "kobacore/domains.hpp"
#include "kobacore/random.hpp"

namespace kobacore::domains {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d|z|/dx + i d|z|/dy
Complex abs_gradient(Complex z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Complex{0.0, 0.0};
}

// Smallest positive root of a t^2 + 2 b t + c = 0 accepted by `ok`.
template <class Accept>
double smallest_positive_root(double a, double b, double c, Accept ok) {
  double roots[2];
  int count = 0;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) > 0.0) roots[count++] = -c / (2.0 * b);
  } else {
    const double disc = b * b - a * c;
    if (disc < 0.0) return kInf;
    const double q = -(b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      roots[count++] = q / a;
      roots[count++] = c / q;
    } else {
      roots[count++] = 0.0;
    }
  }
  double best = kInf;
  for (int i = 0; i < count; ++i) {
    if (roots[i] > 0.0 && roots[i] < best && ok(roots[i])) best = roots[i];
  }
  return best;
}

// Exit of |p + t w| = radius for scalars, p strictly inside.
double circle_exit(Complex p, Complex w, double radius) {
  const double a = std::norm(w);
  if (a == 0.0) return kInf;
  const double b = (std::conj(p) * w).real();
  const double c = std::norm(p) - radius * radius;
  const double disc = std::max(0.0, b * b - a * c);
  // c < 0 so the positive root is (-b + sqrt(disc)) / a; rewrite to avoid
  // cancellation when b > 0.
  if (b <= 0.0) return (-b + std::sqrt(disc)) / a;
  return -c / (b + std::sqrt(disc));
}

std::vector<double> read_number_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw Error(ErrorCode::InvalidSpec, std::string("expected array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidSpec, std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key()))
      throw Error(ErrorCode::InvalidSpec, "unknown field '" + it.key() + "'");
  }
}

int read_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw Error(ErrorCode::InvalidSpec, std::string("expected integer '") + key + "'");
  return j.at(key).get<int>();
}

double read_double(const nlohmann::json& j, const char* key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw Error(ErrorCode::InvalidSpec, std::string("missing number '") + key + "'");
  }
  if (!j.at(key).is_number()) throw Error(ErrorCode::InvalidSpec, std::string("expected number '") + key + "'");
  return j.at(key).get<double>();
}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorCode::InvalidSpec, "complex dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
}

// ---------------------------------------------------------------------------

class BallFamily final : public Family {
 public:
  BallFamily(int dim, double radius) : dim_(dim), radius_(radius) {}

  FamilyKind kind() const override { return FamilyKind::Ball; }
  int dim() const override { return dim_; }
  double value(const Point& p) const override { return p.norm() - radius_; }
  Point gradient(const Point& p) const override {
    const double n = p.norm();
    return n > 0.0 ? Point(p / n) : Point(Point::Zero(dim_));
  }
  nlohmann::json to_json() const override {
    return {{"family", "ball"}, {"dim", dim_}, {"radius", radius_}};
  }
  bool bounded() const override { return true; }
  std::optional<double> bounding_radius() const override { return radius_; }

  std::optional<double> closed_ray_exit(const Point& p, const Point& w) const override {
    const double a = w.squaredNorm();
    if (a == 0.0) return kInf;
    const double b = w.dot(p).real();
    const double c = p.squaredNorm() - radius_ * radius_;
    const double disc = std::max(0.0, b * b - a * c);
    if (b <= 0.0) return (-b + std::sqrt(disc)) / a;
    return -c / (b + std::sqrt(disc));
  }
  std::optional<double> closed_line_distance(const Point& p, const Point& u) const override {
    // p = a u + p_perp; the slice is the disk |a + zeta| < sqrt(R^2 - |p_perp|^2).
    const Complex a = u.dot(p);
    const double perp2 = std::max(0.0, p.squaredNorm() - std::norm(a));
    const double rho = std::sqrt(std::max(0.0, radius_ * radius_ - perp2));
    return rho - std::abs(a);
  }
  std::optional<double> closed_boundary_distance(const Point& p) const override {
    return radius_ - p.norm();
  }

  double radius() const { return radius_; }

 private:
  int dim_;
  double radius_;
};

class PolydiscFamily final : public Family {
 public:
  explicit PolydiscFamily(std::vector<double> radii) : radii_(std::move(radii)) {}

  FamilyKind kind() const override { return FamilyKind::Polydisc; }
  int dim() const override { return static_cast<int>(radii_.size()); }
  double value(const Point& p) const override {
    double v = -kInf;
    for (int j = 0; j < dim(); ++j) v = std::max(v, std::abs(p(j)) - radii_[j]);
    return v;
  }
  Point gradient(const Point& p) const override {
    int best = 0;
    double v = -kInf;
    for (int j = 0; j < dim(); ++j) {
      const double vj = std::abs(p(j)) - radii_[j];
      if (vj > v) {
        v = vj;
        best = j;
      }
    }
    Point g = Point::Zero(dim());
    g(best) = abs_gradient(p(best));
    return g;
  }
  nlohmann::json to_json() const override {
    return {{"family", "polydisc"}, {"radii", radii_}};
  }
  bool bounded() const override { return true; }
  std::optional<double> bounding_radius() const override {
    double s = 0.0;
    for (double r : radii_) s += r * r;
    return std::sqrt(s);
  }
  bool is_singular(const Point& x) const override {
    // Corners: two or more factors on their circle at once.
    const double v = value(x);
    int active = 0;
    for (int j = 0; j < dim(); ++j) {
      if (std::abs((std::abs(x(j)) - radii_[j]) - v) <= 1e-12 * (1.0 + radii_[j])) ++active;
    }
    return active > 1;
  }
  std::optional<double> closed_ray_exit(const Point& p, const Point& w) const override {
    double t = kInf;
    for (int j = 0; j < dim(); ++j) t = std::min(t, circle_exit(p(j), w(j), radii_[j]));
    return t;
  }
  std::optional<double> closed_line_distance(const Point& p, const Point& u) const override {
    double best = kInf;
    for (int j = 0; j < dim(); ++j) {
      const double uj = std::abs(u(j));
      if (uj > 0.0) best = std::min(best, (radii_[j] - std::abs(p(j))) / uj);
    }
    return best;
  }
  std::optional<double> closed_boundary_distance(const Point& p) const override {
    double best = kInf;
    for (int j = 0; j < dim(); ++j) best = std::min(best, radii_[j] - std::abs(p(j)));
    return best;
  }

  const std::vector<double>& radii() const { return radii_; }

 private:
  std::vector<double> radii_;
};

class HalfPlaneFamily final : public Family {
 public:
  explicit HalfPlaneFamily(int dim) : dim_(dim) {}

  FamilyKind kind() const override { return FamilyKind::HalfPlane; }
  int dim() const override { return dim_; }
  double value(const Point& p) const override { return -p(0).imag(); }
  Point gradient(const Point&) const override {
    Point g = Point::Zero(dim_);
    g(0) = Complex(0.0, -1.0);
    return g;
  }
  nlohmann::json to_json() const override { return {{"family", "halfplane"}, {"dim", dim_}}; }
  // Translations in Re z_0 and dilations; all coordinates scale with weight 1.
  std::vector<double> weights() const override { return std::vector<double>(dim_ - 1, 1.0); }
  bool homogeneous() const override { return true; }

  std::optional<double> closed_ray_exit(const Point& p, const Point& w) const override {
    const double dy = w(0).imag();
    if (dy >= 0.0) return kInf;
    return p(0).imag() / -dy;
  }
  std::optional<double> closed_line_distance(const Point& p, const Point& u) const override {
    const double u0 = std::abs(u(0));
    if (u0 == 0.0) return kInf;
    return p(0).imag() / u0;
  }
  std::optional<double> closed_boundary_distance(const Point& p) const override {
    return p(0).imag();
  }

 private:
  int dim_;
};

class EpigraphFamily final : public Family {
 public:
  EpigraphFamily(FamilyKind kind, EpigraphFunction f, std::vector<double> weights, bool homogeneous)
      : kind_(kind), f_(std::move(f)), weights_(std::move(weights)), homogeneous_(homogeneous) {}

  FamilyKind kind() const override { return kind_; }
  int dim() const override { return f_.dim() + 1; }
  double value(const Point& p) const override {
    return f_.value(p.tail(f_.dim())) - p(0).imag();
  }
  Point gradient(const Point& p) const override {
    Point g(dim());
    g(0) = Complex(0.0, -1.0);
    g.tail(f_.dim()) = f_.gradient(p.tail(f_.dim()));
    return g;
  }
  nlohmann::json to_json() const override {
    if (kind_ == FamilyKind::PNormCone)
      return {{"family", "pcone"}, {"d", f_.dim()}, {"p", f_.p()}};
    nlohmann::json j;
    if (kind_ == FamilyKind::HomogeneousEpigraph) {
      j = {{"family", "homogeneous_epigraph"}, {"d", f_.dim()}, {"F", f_.to_json()}};
    } else {
      j = {{"family", "polynomial_epigraph"}, {"d", f_.dim()}, {"monomials", f_.to_json()["monomials"]}};
    }
    if (!weights_.empty()) j["weights"] = weights_;
    return j;
  }
  bool smooth_boundary() const override {
    if (f_.norm_coeff() != 0.0 && f_.p() <= 1.0) return false;
    for (const auto& m : f_.monomials())
      for (double a : m.powers)
        if (a > 0.0 && a <= 1.0) return false;
    return true;
  }
  bool is_singular(const Point& x) const override { return !f_.smooth_at(x.tail(f_.dim())); }
  std::vector<Point> singular_points() const override { return {Point::Zero(dim())}; }
  std::vector<double> weights() const override { return weights_; }
  bool homogeneous() const override { return homogeneous_; }
  const EpigraphFunction* epigraph() const override { return &f_; }

  std::optional<double> closed_ray_exit(const Point& p, const Point& w) const override {
    if (!f_.monomials().empty() || f_.p() != 2.0 || f_.norm_coeff() <= 0.0) return std::nullopt;
    // c |p' + t w'| = alpha + beta t, squared, restricted to alpha + beta t >= 0.
    const int d = f_.dim();
    const double c2 = f_.norm_coeff() * f_.norm_coeff();
    const double alpha = p(0).imag();
    const double beta = w(0).imag();
    const double A = p.tail(d).squaredNorm();
    const double B = p.tail(d).dot(w.tail(d)).real();
    const double C = w.tail(d).squaredNorm();
    const double t = smallest_positive_root(beta * beta - c2 * C, alpha * beta - c2 * B,
                                            alpha * alpha - c2 * A,
                                            [&](double s) { return alpha + beta * s >= 0.0; });
    if (!std::isfinite(t)) return kInf;
    // One Newton step on g(t) = c|p'+tw'| - (alpha + beta t) to clean up
    // cancellation in the quadratic.
    const Point q = p.tail(d) + t * w.tail(d);
    const double qn = q.norm();
    if (qn > 0.0) {
      const double g = f_.norm_coeff() * qn - (alpha + beta * t);
      const double dg = f_.norm_coeff() * q.dot(w.tail(d)).real() / qn - beta;
      if (dg > 0.0) {
        const double refined = t - g / dg;
        if (refined > 0.0 && std::abs(refined - t) < 1e-6 * t) return refined;
      }
    }
    return t;
  }

  std::optional<double> closed_line_distance(const Point& p, const Point& u) const override {
    if (!f_.monomials().empty() || f_.p() != 2.0 || f_.norm_coeff() <= 0.0) return std::nullopt;
    // In the slice coordinate zeta = x + iy the boundary is the branch with
    // a >= 0 of g = a^2 - c^2 b = zeta^T M zeta + 2 q.zeta + r, where
    // a = Im(p_0 + zeta u_0) and b = |p' + zeta u'|^2. Nearest points solve
    // zeta = lambda (M zeta + q); each candidate direction is then measured
    // with the exact ray exit, so the result never undercuts the true
    // distance.
    const int d = f_.dim();
    const double c2 = f_.norm_coeff() * f_.norm_coeff();
    const Eigen::Vector2d beta(u(0).imag(), u(0).real());
    const Complex s = p.tail(d).dot(u.tail(d));
    const Eigen::Vector2d B(s.real(), -s.imag());
    const double alpha = p(0).imag();
    const double C = u.tail(d).squaredNorm();
    const double r = alpha * alpha - c2 * p.tail(d).squaredNorm();
    const Eigen::Matrix2d M = beta * beta.transpose() - c2 * C * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d q = alpha * beta - c2 * B;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(M);
    const Eigen::Vector2d m = eig.eigenvalues();
    const Eigen::Matrix2d E = eig.eigenvectors();
    const Eigen::Vector2d qt = E.transpose() * q;
    const double scale = std::max({std::abs(m(0)), std::abs(m(1)), qt.norm(), std::abs(r), 1e-300});

    // At most 4 roots, 4 degenerate points, the tip and 8 fixed directions.
    std::array<Eigen::Vector2d, 17> candidates;
    int count = 0;
    // Generic stationary points: roots of
    // r D + sum_i qt_i^2 lambda (2 - lambda m_i) (1 - lambda m_j)^2 with
    // D = (1 - lambda m_1)^2 (1 - lambda m_2)^2.
    using Poly = std::array<double, 5>;
    auto mul = [](const Poly& a, const Poly& b) {
      Poly out{};
      for (int i = 0; i < 5; ++i)
        for (int j = 0; i + j < 5; ++j) out[i + j] += a[i] * b[j];
      return out;
    };
    const Poly l1{1.0, -m(0)}, l2{1.0, -m(1)};
    const Poly D = mul(mul(l1, l1), mul(l2, l2));
    const Poly t1 = mul(mul(Poly{0.0, 2.0, -m(0)}, l2), l2);
    const Poly t2 = mul(mul(Poly{0.0, 2.0, -m(1)}, l1), l1);
    Poly P{};
    for (int k = 0; k < 5; ++k)
      P[k] = r * D[k] + qt(0) * qt(0) * t1[k] + qt(1) * qt(1) * t2[k];
    int deg = 4;
    double pmax = 0.0;
    for (double c : P) pmax = std::max(pmax, std::abs(c));
    while (deg > 0 && std::abs(P[deg]) <= 1e-13 * pmax) --deg;
    std::array<double, 4> lambdas{};
    if (deg >= 1) {
      using Companion = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
      Companion comp = Companion::Zero(deg, deg);
      for (int k = 0; k < deg; ++k) comp(0, k) = -P[deg - 1 - k] / P[deg];
      for (int k = 1; k < deg; ++k) comp(k, k - 1) = 1.0;
      const Eigen::EigenSolver<Companion> roots(comp, false);
      // Near-double roots come back with small imaginary parts; every real
      // part is polished by Newton and kept, spurious ones are harmless.
      for (int k = 0; k < deg; ++k) {
        double x = roots.eigenvalues()(k).real();
        for (int it = 0; it < 4; ++it) {
          double v = 0.0, dv = 0.0;
          for (int c = deg; c >= 0; --c) {
            dv = dv * x + v;
            v = v * x + P[c];
          }
          if (dv == 0.0) break;
          const double step = v / dv;
          if (!std::isfinite(step)) break;
          x -= step;
        }
        lambdas[k] = x;
      }
    }
    for (int k = 0; k < deg; ++k) {
      const double lambda = lambdas[k];
      Eigen::Vector2d zt;
      bool ok = true;
      for (int i = 0; i < 2; ++i) {
        const double den = 1.0 - lambda * m(i);
        if (std::abs(den) <= 1e-14) {
          ok = false;
          break;
        }
        zt(i) = lambda * qt(i) / den;
      }
      if (ok) candidates[count++] = E * zt;
    }
    // Degenerate stationary points: lambda = 1 / m_i with qt_i = 0 leaves
    // zeta_i free, fixed by g = 0.
    for (int i = 0; i < 2; ++i) {
      if (std::abs(m(i)) <= 1e-14 * scale || std::abs(qt(i)) > 1e-9 * scale) continue;
      const int j = 1 - i;
      const double lambda = 1.0 / m(i);
      const double den = 1.0 - lambda * m(j);
      const double zj = std::abs(den) > 1e-14 ? lambda * qt(j) / den : 0.0;
      const double zi2 = -(m(j) * zj * zj + 2.0 * qt(j) * zj + r) / m(i);
      if (zi2 < 0.0) continue;
      Eigen::Vector2d zt;
      zt(i) = std::sqrt(zi2);
      zt(j) = zj;
      candidates[count++] = E * zt;
      zt(i) = -zt(i);
      candidates[count++] = E * zt;
    }
    // The tip of the cone, when the line meets it.
    if (C > 0.0) {
      const Complex zeta = -s / C;
      if ((p.tail(d) + zeta * u.tail(d)).norm() <= 1e-12 * (1.0 + p.tail(d).norm()) &&
          std::abs(alpha + (zeta * u(0)).imag()) <= 1e-12 * (1.0 + std::abs(alpha)))
        candidates[count++] = Eigen::Vector2d(zeta.real(), zeta.imag());
    }
    // A few fixed directions guard against a lost root.
    for (int k = 0; k < 8; ++k)
      candidates[count++] = Eigen::Vector2d(std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4));

    auto exit_at = [&](double theta) { return *closed_ray_exit(p, std::polar(1.0, theta) * u); };
    std::array<std::pair<double, double>, 17> scored;  // (exit, angle)
    int scored_count = 0;
    for (int k = 0; k < count; ++k) {
      const Eigen::Vector2d& z = candidates[k];
      const double n = z.norm();
      if (!(n > 0.0) || !std::isfinite(n)) continue;
      const double theta = std::atan2(z(1), z(0));
      scored[scored_count++] = {exit_at(theta), theta};
    }
    std::sort(scored.begin(), scored.begin() + scored_count);
    if (scored_count == 0 || !std::isfinite(scored[0].first)) return kInf;
    // Clustered roots of the quartic lose accuracy, and near-symmetric
    // slices have two basins of almost equal depth: polish every distinct
    // candidate close to the best on the exact exit function.
    double best = scored[0].first;
    std::array<double, 3> polished_at{};
    int polished = 0;
    const double h = std::numbers::pi / 8.0;
    for (int k = 0; k < scored_count && polished < 3; ++k) {
      if (scored[k].first > best * (1.0 + 1e-2)) break;
      const double theta = scored[k].second;
      bool seen = false;
      for (int j = 0; j < polished; ++j) {
        const double gap = std::remainder(theta - polished_at[j], 2.0 * std::numbers::pi);
        seen = seen || std::abs(gap) < 1e-3;
      }
      if (seen) continue;
      std::uintmax_t iters = 60;
      const auto r = boost::math::tools::brent_find_minima(exit_at, theta - h, theta + h,
                                                           std::numeric_limits<double>::digits / 2, iters);
      polished_at[polished++] = r.first;
      best = std::min(best, r.second);
    }
    return best;
  }

 private:
  FamilyKind kind_;
  EpigraphFunction f_;
  std::vector<double> weights_;
  bool homogeneous_;
};

// r(w) = |w_0|^2 r_cone(f^{-1}(w)) = |w_0| ||w'||_p + Im w_0 + |w_0|^2.
class ProjectiveImageFamily final : public Family {
 public:
  ProjectiveImageFamily(int d, double p) : norm_(EpigraphFunction::pnorm(d, p)) {}

  FamilyKind kind() const override { return FamilyKind::ProjectiveImage; }
  int dim() const override { return norm_.dim() + 1; }
  double value(const Point& w) const override {
    const double a = std::abs(w(0));
    return a * norm_.value(w.tail(norm_.dim())) + w(0).imag() + a * a;
  }
  Point gradient(const Point& w) const override {
    const int d = norm_.dim();
    const double a = std::abs(w(0));
    const double nv = norm_.value(w.tail(d));
    Point g(dim());
    g(0) = nv * abs_gradient(w(0)) + Complex(0.0, 1.0) + 2.0 * w(0);
    g.tail(d) = a * norm_.gradient(w.tail(d));
    return g;
  }
  nlohmann::json to_json() const override {
    return {{"family", "projective_image"}, {"d", norm_.dim()}, {"p", norm_.p()}};
  }
  bool bounded() const override { return true; }
  std::optional<double> bounding_radius() const override {
    // |w_0| < 1 and ||w'||_p < 1.
    const double d = norm_.dim();
    const double w2 = std::max(1.0, std::pow(d, std::max(0.0, 0.5 - 1.0 / norm_.p())));
    return std::sqrt(1.0 + w2 * w2);
  }
  bool convex() const override { return false; }
  bool smooth_boundary() const override { return norm_.p() > 1.0; }
  bool is_singular(const Point& x) const override {
    return std::abs(x(0)) < 1e-12 || !norm_.smooth_at(x.tail(norm_.dim()));
  }
  std::vector<Point> singular_points() const override { return {Point::Zero(dim())}; }

 private:
  EpigraphFunction norm_;
};

class RescaledFamily final : public Family {
 public:
  RescaledFamily(DomainOracle source, double t) : source_(std::move(source)), t_(t) {
    const auto w = source_.weights();
    scale_.resize(source_.dim());
    scale_[0] = t;
    for (std::size_t j = 0; j < w.size(); ++j) scale_[j + 1] = std::pow(t, w[j]);
  }

  FamilyKind kind() const override { return FamilyKind::Rescaled; }
  int dim() const override { return source_.dim(); }
  double value(const Point& p) const override { return source_.value(pull(p)); }
  Point gradient(const Point& p) const override {
    Point g = source_.gradient(pull(p));
    for (int j = 0; j < dim(); ++j) g(j) /= scale_[j];
    return g;
  }
  nlohmann::json to_json() const override {
    return {{"family", "rescaled"}, {"t", t_}, {"source", source_.to_json()}};
  }
  bool bounded() const override { return source_.bounded(); }
  std::optional<double> bounding_radius() const override {
    auto r = source_.bounding_radius();
    if (!r) return std::nullopt;
    return *r * *std::max_element(scale_.begin(), scale_.end());
  }
  bool convex() const override { return source_.convex(); }
  bool c_convex() const override { return source_.c_convex(); }
  bool smooth_boundary() const override { return source_.smooth_boundary(); }
  bool is_singular(const Point& x) const override { return source_.is_singular(pull(x)); }
  std::vector<Point> singular_points() const override {
    auto pts = source_.singular_points();
    for (auto& q : pts)
      for (int j = 0; j < dim(); ++j) q(j) *= scale_[j];
    return pts;
  }
  std::vector<double> weights() const override { return source_.weights(); }
  bool homogeneous() const override { return source_.homogeneous(); }

  std::optional<double> closed_ray_exit(const Point& p, const Point& w) const override {
    return source_.family().closed_ray_exit(pull(p), pull(w));
  }
  std::optional<double> closed_line_distance(const Point& p, const Point& u) const override {
    const Point v = pull(u);
    auto d = source_.family().closed_line_distance(pull(p), v / v.norm());
    if (!d) return std::nullopt;
    return *d / v.norm();
  }

 private:
  Point pull(const Point& p) const {
    Point q = p;
    for (int j = 0; j < dim(); ++j) q(j) /= scale_[j];
    return q;
  }

  DomainOracle source_;
  double t_;
  std::vector<double> scale_;
};

class CustomFamily final : public Family {
 public:
  explicit CustomFamily(CustomSpec spec) : spec_(std::move(spec)) {}

  FamilyKind kind() const override { return FamilyKind::Custom; }
  int dim() const override { return spec_.dim; }
  double value(const Point& p) const override { return spec_.value(p); }
  Point gradient(const Point& p) const override {
    if (spec_.gradient) return spec_.gradient(p);
    // Central differences on each real coordinate.
    Point g(dim());
    const double h = 1e-7 * (1.0 + p.norm());
    for (int j = 0; j < dim(); ++j) {
      Point a = p, b = p;
      a(j) += h;
      b(j) -= h;
      const double dx = (spec_.value(a) - spec_.value(b)) / (2 * h);
      a = p;
      b = p;
      a(j) += Complex(0, h);
      b(j) -= Complex(0, h);
      const double dy = (spec_.value(a) - spec_.value(b)) / (2 * h);
      g(j) = {dx, dy};
    }
    return g;
  }
  nlohmann::json to_json() const override { return {{"family", "custom"}, {"name", spec_.name}}; }
  bool bounded() const override { return spec_.bounded; }
  std::optional<double> bounding_radius() const override { return spec_.bounding_radius; }
  bool convex() const override { return spec_.convex; }
  bool c_convex() const override { return spec_.c_convex; }

 private:
  CustomSpec spec_;
};

EpigraphFunction epigraph_function_from_json(int d, const nlohmann::json& j) {
  check_keys(j, {"norm", "monomials"});
  double norm_coeff = 0.0, p = 2.0;
  if (j.contains("norm")) {
    const auto& n = j.at("norm");
    check_keys(n, {"coeff", "p"});
    norm_coeff = read_double(n, "coeff", 1.0);
    p = read_double(n, "p");
  }
  std::vector<Monomial> monos;
  if (j.contains("monomials")) {
    if (!j.at("monomials").is_array()) throw Error(ErrorCode::InvalidSpec, "'monomials' must be an array");
    for (const auto& m : j.at("monomials")) {
      check_keys(m, {"coeff", "powers"});
      monos.push_back({read_double(m, "coeff", 1.0), read_number_array(m, "powers")});
    }
  }
  return EpigraphFunction(d, norm_coeff, p, std::move(monos));
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Ball: return "ball";
    case FamilyKind::Polydisc: return "polydisc";
    case FamilyKind::HalfPlane: return "halfplane";
    case FamilyKind::PNormCone: return "pcone";
    case FamilyKind::HomogeneousEpigraph: return "homogeneous_epigraph";
    case FamilyKind::PolynomialEpigraph: return "polynomial_epigraph";
    case FamilyKind::ProjectiveImage: return "projective_image";
    case FamilyKind::Rescaled: return "rescaled";
    case FamilyKind::Custom: return "custom";
  }
  return "unknown";
}

EpigraphFunction::EpigraphFunction(int d, double norm_coeff, double p, std::vector<Monomial> monomials)
    : d_(d), norm_coeff_(norm_coeff), p_(p), monomials_(std::move(monomials)) {
  check_dim(d + 1);
  if (norm_coeff_ < 0.0) throw Error(ErrorCode::InvalidSpec, "norm coefficient must be >= 0");
  if (norm_coeff_ > 0.0 && !(p_ >= 1.0)) throw Error(ErrorCode::InvalidSpec, "p-norm requires p >= 1");
  for (const auto& m : monomials_) {
    if (static_cast<int>(m.powers.size()) != d_)
      throw Error(ErrorCode::InvalidSpec, "monomial powers must have one entry per coordinate");
    if (m.coeff < 0.0) throw Error(ErrorCode::InvalidSpec, "monomial coefficients must be >= 0");
    for (double a : m.powers)
      if (a < 0.0) throw Error(ErrorCode::InvalidSpec, "monomial powers must be >= 0");
  }
}

EpigraphFunction EpigraphFunction::pnorm(int d, double p) { return {d, 1.0, p, {}}; }

EpigraphFunction EpigraphFunction::polynomial(int d, std::vector<Monomial> monomials) {
  return {d, 0.0, 2.0, std::move(monomials)};
}

double EpigraphFunction::value(const Point& z) const {
  double v = 0.0;
  if (norm_coeff_ != 0.0) {
    if (p_ == 2.0) {
      v += norm_coeff_ * z.norm();
    } else {
      double s = 0.0;
      for (int j = 0; j < d_; ++j) s += std::pow(std::abs(z(j)), p_);
      v += norm_coeff_ * std::pow(s, 1.0 / p_);
    }
  }
  for (const auto& m : monomials_) {
    double term = m.coeff;
    for (int j = 0; j < d_; ++j) {
      const double a = m.powers[j];
      if (a == 0.0) continue;
      if (a == 2.0) term *= std::norm(z(j));
      else term *= std::pow(std::abs(z(j)), a);
    }
    v += term;
  }
  return v;
}

Point EpigraphFunction::gradient(const Point& z) const {
  Point g = Point::Zero(d_);
  if (norm_coeff_ != 0.0) {
    if (p_ == 2.0) {
      const double n = z.norm();
      if (n > 0.0) g += norm_coeff_ * z / n;
    } else {
      double s = 0.0;
      for (int j = 0; j < d_; ++j) s += std::pow(std::abs(z(j)), p_);
      const double n = std::pow(s, 1.0 / p_);
      if (n > 0.0) {
        for (int j = 0; j < d_; ++j) {
          const double a = std::abs(z(j));
          if (a > 0.0) g(j) += norm_coeff_ * std::pow(n, 1.0 - p_) * std::pow(a, p_ - 2.0) * z(j);
        }
      }
    }
  }
  for (const auto& m : monomials_) {
    for (int j = 0; j < d_; ++j) {
      const double aj = m.powers[j];
      if (aj == 0.0) continue;
      const double mod = std::abs(z(j));
      if (mod == 0.0) continue;
      double rest = m.coeff * aj * std::pow(mod, aj - 2.0);
      for (int k = 0; k < d_; ++k)
        if (k != j && m.powers[k] != 0.0) rest *= std::pow(std::abs(z(k)), m.powers[k]);
      g(j) += rest * z(j);
    }
  }
  return g;
}

bool EpigraphFunction::smooth_at(const Point& z) const {
  const double scale = 1e-12 * (1.0 + z.norm());
  if (norm_coeff_ != 0.0) {
    if (z.norm() <= scale) return false;
    if (p_ <= 1.0) {
      for (int j = 0; j < d_; ++j)
        if (std::abs(z(j)) <= scale) return false;
    }
  }
  for (const auto& m : monomials_)
    for (int j = 0; j < d_; ++j)
      if (m.powers[j] > 0.0 && m.powers[j] <= 1.0 && std::abs(z(j)) <= scale) return false;
  return true;
}

EpigraphFunction EpigraphFunction::plus_square_norm(double eps) const {
  auto monos = monomials_;
  for (int j = 0; j < d_; ++j) {
    Monomial m{eps, std::vector<double>(d_, 0.0)};
    m.powers[j] = 2.0;
    monos.push_back(std::move(m));
  }
  return {d_, norm_coeff_, p_, std::move(monos)};
}

nlohmann::json EpigraphFunction::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (norm_coeff_ != 0.0) j["norm"] = {{"coeff", norm_coeff_}, {"p", p_}};
  nlohmann::json monos = nlohmann::json::array();
  for (const auto& m : monomials_) monos.push_back({{"coeff", m.coeff}, {"powers", m.powers}});
  j["monomials"] = monos;
  return j;
}

// ---------------------------------------------------------------------------

bool Family::is_singular(const Point& x) const { return gradient(x).norm() < 1e-12; }

std::optional<double> Family::closed_ray_exit(const Point&, const Point&) const { return std::nullopt; }
std::optional<double> Family::closed_line_distance(const Point&, const Point&) const { return std::nullopt; }
std::optional<double> Family::closed_boundary_distance(const Point&) const { return std::nullopt; }

DomainOracle::DomainOracle(std::shared_ptr<const Family> family) : family_(std::move(family)) {
  if (!family_) throw Error(ErrorCode::InvalidArgument, "null family");
}

bool DomainOracle::contains(const Point& p) const {
  if (p.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  return value(p) < 0.0;
}

std::string DomainOracle::name() const { return to_json().dump(); }

DomainOracle make_ball(int dim, double radius) {
  check_dim(dim);
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidSpec, "ball radius must be positive");
  return DomainOracle(std::make_shared<BallFamily>(dim, radius));
}

DomainOracle make_polydisc(std::vector<double> radii) {
  check_dim(static_cast<int>(radii.size()));
  for (double r : radii)
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidSpec, "polydisc radii must be positive");
  return DomainOracle(std::make_shared<PolydiscFamily>(std::move(radii)));
}

DomainOracle make_half_plane(int dim) {
  check_dim(dim);
  return DomainOracle(std::make_shared<HalfPlaneFamily>(dim));
}

DomainOracle make_pnorm_cone(int d, double p) {
  check_dim(d + 1);
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidSpec, "cone exponent p must be >= 1");
  return DomainOracle(std::make_shared<EpigraphFamily>(
      FamilyKind::PNormCone, EpigraphFunction::pnorm(d, p), std::vector<double>(d, 1.0), true));
}

DomainOracle make_epigraph(EpigraphFunction f, std::vector<double> weights, bool require_homogeneous) {
  const int d = f.dim();
  bool homogeneous = false;
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != d)
      throw Error(ErrorCode::InvalidSpec, "need one weight per coordinate of F");
    for (double w : weights)
      if (!(w > 0.0)) throw Error(ErrorCode::InvalidSpec, "weights must be strictly positive");
    Rng rng(0x5eed);
    homogeneous = true;
    for (int k = 0; k < 100 && homogeneous; ++k) {
      Point z(d);
      for (int j = 0; j < d; ++j) z(j) = rng.complex_normal();
      const double t = std::exp(rng.uniform(-3.0, 3.0));
      const double res = homogeneity_residual(f, weights, t, z);
      if (res > 1e-9 * (1.0 + f.value(z))) homogeneous = false;
    }
  }
  if (require_homogeneous && !homogeneous)
    throw Error(ErrorCode::InvalidSpec, "F is not homogeneous for the given weights");
  const FamilyKind kind = (f.monomials().empty() && homogeneous) || require_homogeneous
                              ? FamilyKind::HomogeneousEpigraph
                              : FamilyKind::PolynomialEpigraph;
  return DomainOracle(std::make_shared<EpigraphFamily>(kind, std::move(f), std::move(weights), homogeneous));
}

DomainOracle make_projective_image(int d, double p) {
  check_dim(d + 1);
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidSpec, "cone exponent p must be >= 1");
  return DomainOracle(std::make_shared<ProjectiveImageFamily>(d, p));
}

DomainOracle make_rescaled(const DomainOracle& source, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "scaling parameter must be positive");
  if (source.weights().empty() && source.dim() > 1)
    throw Error(ErrorCode::NonHomogeneousFamily, "domain carries no scaling group");
  return DomainOracle(std::make_shared<RescaledFamily>(source, t));
}

DomainOracle make_custom(CustomSpec spec) {
  check_dim(spec.dim);
  if (!spec.value) throw Error(ErrorCode::InvalidSpec, "custom domain needs a defining function");
  return DomainOracle(std::make_shared<CustomFamily>(std::move(spec)));
}

std::vector<std::string> supported_families() {
  return {"ball", "polydisc", "halfplane", "pcone", "homogeneous_epigraph",
          "polynomial_epigraph", "projective_image", "rescaled"};
}

DomainOracle domain_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("family") || !spec.at("family").is_string())
    throw Error(ErrorCode::InvalidSpec, "domain spec needs a string 'family'");
  const std::string family = spec.at("family").get<std::string>();
  if (family == "ball") {
    check_keys(spec, {"family", "dim", "radius"});
    return make_ball(read_int(spec, "dim"), read_double(spec, "radius", 1.0));
  }
  if (family == "polydisc") {
    check_keys(spec, {"family", "radii", "dim", "radius"});
    if (spec.contains("radii")) return make_polydisc(read_number_array(spec, "radii"));
    return make_polydisc(std::vector<double>(read_int(spec, "dim"), read_double(spec, "radius", 1.0)));
  }
  if (family == "halfplane") {
    check_keys(spec, {"family", "dim"});
    return make_half_plane(spec.contains("dim") ? read_int(spec, "dim") : 1);
  }
  if (family == "pcone") {
    check_keys(spec, {"family", "d", "p"});
    return make_pnorm_cone(read_int(spec, "d"), read_double(spec, "p"));
  }
  if (family == "homogeneous_epigraph") {
    check_keys(spec, {"family", "d", "F", "weights"});
    const int d = read_int(spec, "d");
    if (!spec.contains("F")) throw Error(ErrorCode::InvalidSpec, "homogeneous_epigraph needs 'F'");
    return make_epigraph(epigraph_function_from_json(d, spec.at("F")), read_number_array(spec, "weights"), true);
  }
  if (family == "polynomial_epigraph") {
    check_keys(spec, {"family", "d", "monomials", "weights"});
    const int d = read_int(spec, "d");
    auto f = epigraph_function_from_json(d, nlohmann::json{{"monomials", spec.value("monomials", nlohmann::json::array())}});
    std::vector<double> w;
    if (spec.contains("weights")) w = read_number_array(spec, "weights");
    return make_epigraph(std::move(f), std::move(w), false);
  }
  if (family == "projective_image") {
    check_keys(spec, {"family", "d", "p"});
    return make_projective_image(read_int(spec, "d"), read_double(spec, "p", 2.0));
  }
  if (family == "rescaled") {
    check_keys(spec, {"family", "t", "source"});
    if (!spec.contains("source")) throw Error(ErrorCode::InvalidSpec, "rescaled needs 'source'");
    return make_rescaled(domain_from_json(spec.at("source")), read_double(spec, "t"));
  }
  std::ostringstream msg;
  msg << "unknown family '" << family << "'; supported:";
  for (const auto& f : supported_families()) msg << ' ' << f;
  throw Error(ErrorCode::InvalidSpec, msg.str());
}

}  // namespace kobacore::domains
