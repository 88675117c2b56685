#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <Eigen/QR>

#include "kobacore/domains.hpp"
#include "kobacore/random.hpp"

namespace kobacore::domains {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest line distance over complex directions at p: seeded random start
// followed by a shrinking pattern search on the direction sphere.
double max_line_distance(const DomainOracle& dom, const Point& p, Rng& rng) {
  const int n = dom.dim();
  auto eval = [&](const Point& u) { return line_boundary_distance(dom, p, u); };

  Point best_u = Point::Zero(n);
  best_u(0) = 1.0;
  double best = eval(best_u);
  auto consider = [&](const Point& u) {
    const double d = eval(u);
    if (d > best) {
      best = d;
      best_u = u;
    }
  };
  for (int j = 1; j < n; ++j) {
    Point e = Point::Zero(n);
    e(j) = 1.0;
    consider(e);
  }
  for (int k = 0; k < 16; ++k) consider(rng.unit_vector(n));
  if (!std::isfinite(best)) return kInf;

  double step = 0.5;
  while (step > 1e-4) {
    bool improved = false;
    for (int j = 0; j < n; ++j) {
      for (const Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
        Point u = best_u;
        u(j) += step * dir;
        const double un = u.norm();
        if (un < 1e-12) continue;
        const double before = best;
        consider(u / un);
        if (best > before) improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

const char* to_string(SliceTopology t) {
  switch (t) {
    case SliceTopology::Empty: return "empty";
    case SliceTopology::Connected: return "connected";
    case SliceTopology::Disconnected: return "disconnected";
  }
  return "unknown";
}

FiniteTypeResult finite_type_probe(const DomainOracle& dom, const Point& base, const Point& line_dir,
                                   const FiniteTypeOptions& opts) {
  if (base.size() != dom.dim() || line_dir.size() != dom.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  if (std::abs(dom.value(base)) > 1e-8 * (1.0 + base.norm()))
    throw Error(ErrorCode::NotOnBoundary, "base point is not on the boundary");
  if (line_dir.norm() == 0.0) throw Error(ErrorCode::ZeroVector, "line direction must be nonzero");
  if (opts.order_cap < 1) throw Error(ErrorCode::InvalidArgument, "order cap must be >= 1");

  // g(rho e^{i theta}) = sum_{j,k} c_{jk} rho^{j+k} e^{i(j-k) theta}. A DFT in
  // theta isolates m = j - k; for fixed m the remaining dependence on rho is
  // a polynomial whose coefficient of rho^n is c_{(n+m)/2,(n-m)/2}.
  const int cap = opts.order_cap;
  const int fit_degree = cap + 2;
  constexpr int kAngles = 64;
  const int radii = fit_degree + 4;
  const double h = opts.radius;

  std::vector<std::vector<Complex>> modes(radii, std::vector<Complex>(2 * cap + 1));
  std::vector<double> rho(radii);
  for (int k = 0; k < radii; ++k) {
    rho[k] = h * (k + 1) / radii;
    std::vector<double> samples(kAngles);
    for (int a = 0; a < kAngles; ++a) {
      const Complex zeta = std::polar(rho[k], kTwoPi * a / kAngles);
      samples[a] = dom.value(base + zeta * line_dir);
    }
    for (int m = -cap; m <= cap; ++m) {
      Complex acc = 0.0;
      for (int a = 0; a < kAngles; ++a) acc += samples[a] * std::polar(1.0, -kTwoPi * m * a / kAngles);
      modes[k][m + cap] = acc / static_cast<double>(kAngles);
    }
  }

  std::vector<double> order_max(cap + 1, 0.0);
  for (int m = -cap; m <= cap; ++m) {
    std::vector<int> orders;
    for (int n = std::abs(m); n <= fit_degree; n += 2) orders.push_back(n);
    Eigen::MatrixXd A(radii, orders.size());
    Eigen::VectorXd re(radii), im(radii);
    for (int k = 0; k < radii; ++k) {
      const double s = rho[k] / h;
      for (std::size_t i = 0; i < orders.size(); ++i) A(k, i) = std::pow(s, orders[i]);
      re(k) = modes[k][m + cap].real();
      im(k) = modes[k][m + cap].imag();
    }
    const auto qr = A.colPivHouseholderQr();
    const Eigen::VectorXd bre = qr.solve(re);
    const Eigen::VectorXd bim = qr.solve(im);
    for (std::size_t i = 0; i < orders.size(); ++i) {
      const int n = orders[i];
      if (n < 1 || n > cap) continue;
      const double c = std::hypot(bre(i), bim(i)) / std::pow(h, n);
      order_max[n] = std::max(order_max[n], c);
    }
  }

  for (int n = 1; n <= cap; ++n) {
    if (order_max[n] > opts.tolerance) return {n, order_max[n]};
  }
  return {std::nullopt, 0.0};
}

LConvexityEstimate l_convexity_fit(const DomainOracle& dom, double r, double R, int samples,
                                   std::uint64_t seed) {
  if (!(r >= 0.0 && r < R)) throw Error(ErrorCode::InvalidArgument, "annulus needs 0 <= r < R");
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  const int n = dom.dim();
  const int m = 2 * n;
  Rng rng(seed);

  std::vector<Point> pts;
  const long max_attempts = 200L * samples;
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(pts.size()) < samples; ++attempt) {
    const double u = rng.uniform();
    const double radius = std::pow(std::pow(r, m) + u * (std::pow(R, m) - std::pow(r, m)), 1.0 / m);
    const Point p = radius * rng.unit_vector(n);
    if (dom.contains(p)) pts.push_back(p);
  }
  if (static_cast<int>(pts.size()) < std::max(2, samples / 2))
    throw Error(ErrorCode::InsufficientInteriorSamples, "annulus barely meets the domain");

  LConvexityEstimate est;
  est.r = r;
  est.R = R;
  std::vector<double> xs, ys;
  bool improper_slice = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Rng local(substream_seed(seed, i));
    const double delta = euclidean_boundary_distance(dom, pts[i]);
    const double line = max_line_distance(dom, pts[i], local);
    if (!std::isfinite(line)) {
      improper_slice = true;
      continue;
    }
    xs.push_back(std::log(delta));
    ys.push_back(std::log(line));
  }
  est.samples = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    est.unbounded = true;
    est.L = kInf;
    est.residual = kInf;
    return est;
  }

  const double nx = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - est.slope * mx;
  est.C = std::exp(intercept);
  est.unbounded = improper_slice || est.slope <= 0.05;
  est.L = est.unbounded ? kInf : 1.0 / est.slope;
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    worst = std::max(worst, std::exp(ys[i] - intercept - est.slope * xs[i]) - 1.0);
  }
  est.residual = worst;
  return est;
}

SliceTopology c_convex_slice_check(const DomainOracle& dom, const Point& p, const Point& v, int grid) {
  if (p.size() != dom.dim() || v.size() != dom.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  const double vn = v.norm();
  if (!(vn > 0.0)) throw Error(ErrorCode::ZeroVector, "direction must be nonzero");
  if (grid < 4) throw Error(ErrorCode::InvalidArgument, "grid too small");
  const Point u = v / vn;
  const double window = dom.bounding_radius() ? *dom.bounding_radius() + p.norm() : 10.0 * (1.0 + p.norm());

  std::vector<char> inside(static_cast<std::size_t>(grid) * grid);
  const double spacing = 2.0 * window / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Complex zeta(-window + spacing * i, -window + spacing * j);
      inside[i * grid + j] = dom.contains(p + zeta * u) ? 1 : 0;
    }
  }

  int components = 0;
  std::vector<char> seen(inside.size(), 0);
  std::queue<int> todo;
  for (int start = 0; start < grid * grid; ++start) {
    if (!inside[start] || seen[start]) continue;
    ++components;
    if (components > 1) return SliceTopology::Disconnected;
    seen[start] = 1;
    todo.push(start);
    while (!todo.empty()) {
      const int cell = todo.front();
      todo.pop();
      const int ci = cell / grid, cj = cell % grid;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int ni = ci + di, nj = cj + dj;
          if (ni < 0 || nj < 0 || ni >= grid || nj >= grid) continue;
          const int next = ni * grid + nj;
          if (inside[next] && !seen[next]) {
            seen[next] = 1;
            todo.push(next);
          }
        }
      }
    }
  }
  return components == 0 ? SliceTopology::Empty : SliceTopology::Connected;
}

}  // namespace kobacore::domains
