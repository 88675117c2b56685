#include "kobacore/paths.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "kobacore/detail/golden.hpp"
#include "kobacore/metric.hpp"
#include "kobacore/random.hpp"

namespace kobacore::paths {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Discrete length functional: Simpson's rule for the khat integral on each
// segment. Infinite when a sample point leaves the domain.
class SegmentCost {
 public:
  SegmentCost(const DomainOracle& dom, int rays) : dom_(dom) { opts_.rays = rays; }

  double operator()(const Point& a, const Point& b) const {
    const Point d = b - a;
    const double len = d.norm();
    if (len == 0.0) return 0.0;
    const Point mid = 0.5 * (a + b);
    if (!dom_.contains(a) || !dom_.contains(b) || !dom_.contains(mid)) return kInf;
    return len * (inv_delta(a, d) + 4.0 * inv_delta(mid, d) + inv_delta(b, d)) / 6.0;
  }

 private:
  double inv_delta(const Point& x, const Point& d) const {
    const double delta = domains::line_boundary_distance(dom_, x, d, opts_);
    return std::isfinite(delta) ? 1.0 / delta : 0.0;
  }

  const DomainOracle& dom_;
  domains::LineSearchOptions opts_;
};

std::vector<Point> refine_nodes(const std::vector<Point>& nodes) {
  std::vector<Point> out;
  out.reserve(2 * nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    out.push_back(nodes[i]);
    out.push_back(0.5 * (nodes[i] + nodes[i + 1]));
  }
  out.push_back(nodes.back());
  return out;
}

// Nodes at equal Euclidean arclength along a polyline.
std::vector<Point> resample(const std::vector<Point>& path, int n) {
  std::vector<double> s(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) s[i] = s[i - 1] + (path[i] - path[i - 1]).norm();
  std::vector<Point> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double target = s.back() * k / (n - 1);
    while (seg + 2 < path.size() && s[seg + 1] < target) ++seg;
    const double span = s[seg + 1] - s[seg];
    const double lambda = span > 0.0 ? std::clamp((target - s[seg]) / span, 0.0, 1.0) : 0.0;
    out.push_back(path[seg] + lambda * (path[seg + 1] - path[seg]));
  }
  out.front() = path.front();
  out.back() = path.back();
  return out;
}

double total_cost(const SegmentCost& cost, const std::vector<Point>& nodes) {
  double total = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) total += cost(nodes[i - 1], nodes[i]);
  return total;
}

struct LevelOutcome {
  int sweeps = 0;
  bool capped = false;
};

// Whole-curve objective for L-BFGS. Variables are the interior nodes in
// real coordinates, each divided by a per-node length scale so that nodes
// near the boundary are not stiffer than the rest.
class CurveObjective final : public ceres::FirstOrderFunction {
 public:
  CurveObjective(const SegmentCost& cost, const std::vector<Point>& nodes) : cost_(cost), ends_{nodes.front(), nodes.back()} {
    dim_ = static_cast<int>(nodes.front().size());
    interior_ = static_cast<int>(nodes.size()) - 2;
    scale_.resize(interior_);
    for (int i = 0; i < interior_; ++i) {
      scale_[i] = std::min((nodes[i + 1] - nodes[i]).norm(), (nodes[i + 2] - nodes[i + 1]).norm());
      if (!(scale_[i] > 0.0)) scale_[i] = 1.0;
    }
  }

  int NumParameters() const override { return 2 * dim_ * interior_; }

  bool Evaluate(const double* x, double* value, double* gradient) const override {
    const auto nodes = unpack(x);
    std::vector<double> seg(nodes.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      seg[i] = cost_(nodes[i], nodes[i + 1]);
      if (!std::isfinite(seg[i])) return false;
      total += seg[i];
    }
    *value = total;
    if (gradient == nullptr) return true;
    for (int i = 0; i < interior_; ++i) {
      const Point& a = nodes[i];
      const Point& b = nodes[i + 2];
      const double h = 1e-6;
      for (int j = 0; j < dim_; ++j) {
        for (int part = 0; part < 2; ++part) {
          const Complex e = part == 0 ? Complex(h * scale_[i], 0.0) : Complex(0.0, h * scale_[i]);
          Point plus = nodes[i + 1], minus = nodes[i + 1];
          plus(j) += e;
          minus(j) -= e;
          const double fp = cost_(a, plus) + cost_(plus, b);
          const double fm = cost_(a, minus) + cost_(minus, b);
          if (!std::isfinite(fp) || !std::isfinite(fm)) return false;
          gradient[index(i, j, part)] = (fp - fm) / (2.0 * h);
        }
      }
    }
    return true;
  }

  std::vector<double> pack(const std::vector<Point>& nodes) const {
    std::vector<double> x(NumParameters());
    for (int i = 0; i < interior_; ++i)
      for (int j = 0; j < dim_; ++j) {
        x[index(i, j, 0)] = nodes[i + 1](j).real() / scale_[i];
        x[index(i, j, 1)] = nodes[i + 1](j).imag() / scale_[i];
      }
    return x;
  }

  std::vector<Point> unpack(const double* x) const {
    std::vector<Point> nodes;
    nodes.reserve(interior_ + 2);
    nodes.push_back(ends_[0]);
    for (int i = 0; i < interior_; ++i) {
      Point p(dim_);
      for (int j = 0; j < dim_; ++j) p(j) = Complex(x[index(i, j, 0)], x[index(i, j, 1)]) * scale_[i];
      nodes.push_back(p);
    }
    nodes.push_back(ends_[1]);
    return nodes;
  }

 private:
  int index(int i, int j, int part) const { return (i * dim_ + j) * 2 + part; }

  const SegmentCost& cost_;
  std::array<Point, 2> ends_;
  int dim_ = 0;
  int interior_ = 0;
  std::vector<double> scale_;
};

// Quasi-Newton pass over the whole curve. The objective only ever
// decreases (Armijo line search), so the returned nodes are never worse.
bool lbfgs_pass(const SegmentCost& cost, std::vector<Point>& nodes, const GeodesicSettings& settings,
                std::vector<double>& history) {
  if (nodes.size() < 3) return false;
  auto* objective = new CurveObjective(cost, nodes);
  std::vector<double> x = objective->pack(nodes);
  ceres::GradientProblem problem(objective);
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = settings.max_iterations;
  options.function_tolerance = settings.sweep_tol;
  options.gradient_tolerance = 1e-12;
  options.parameter_tolerance = 1e-10;
  options.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, x.data(), &summary);
  if (summary.final_cost < summary.initial_cost) nodes = objective->unpack(x.data());
  history.push_back(std::min(summary.final_cost, summary.initial_cost));
  return summary.termination_type == ceres::NO_CONVERGENCE;
}

// Node-wise polish: each interior node moves along its local descent
// direction and random directions, golden-section on each line.
LevelOutcome relax(const SegmentCost& cost, std::vector<Point>& nodes, const GeodesicSettings& settings, Rng& rng,
                   std::vector<double>& history) {
  const std::size_t n = nodes.size();
  const int dim = static_cast<int>(nodes.front().size());
  std::vector<double> seg(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) seg[i] = cost(nodes[i], nodes[i + 1]);
  double total = std::accumulate(seg.begin(), seg.end(), 0.0);

  LevelOutcome out;
  if (n < 3 || settings.max_sweeps <= 0) return out;
  for (int sweep = 0; sweep < settings.max_sweeps; ++sweep) {
    const double before = total;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Point& a = nodes[i - 1];
      const Point& b = nodes[i + 1];
      auto local = [&](const Point& x) { return cost(a, x) + cost(x, b); };
      double current = seg[i - 1] + seg[i];
      const double reach = 0.5 * std::min((nodes[i] - a).norm(), (b - nodes[i]).norm());
      if (!(reach > 0.0) || !std::isfinite(current)) continue;

      std::vector<Point> dirs;
      const double h = 1e-6 * reach;
      Point grad = Point::Zero(dim);
      bool ok = true;
      for (int j = 0; j < dim && ok; ++j) {
        for (const Complex e : {Complex(1, 0), Complex(0, 1)}) {
          Point plus = nodes[i], minus = nodes[i];
          plus(j) += h * e;
          minus(j) -= h * e;
          const double fp = local(plus), fm = local(minus);
          if (!std::isfinite(fp) || !std::isfinite(fm)) {
            ok = false;
            break;
          }
          grad(j) += e * ((fp - fm) / (2.0 * h));
        }
      }
      if (ok && grad.norm() > 0.0) dirs.push_back(-grad / grad.norm());
      for (int k = 0; k < settings.random_directions; ++k) dirs.push_back(rng.unit_vector(dim));

      for (const Point& dir : dirs) {
        const Point base = nodes[i];
        auto along = [&](double s) { return local(base + s * dir); };
        const auto r = detail::golden_section_min(along, -reach, reach, settings.golden_iterations, 0.0, current);
        if (r.f < current) {
          nodes[i] = base + r.x * dir;
          current = r.f;
        }
      }
      seg[i - 1] = cost(a, nodes[i]);
      seg[i] = cost(nodes[i], b);
    }
    total = std::min(std::accumulate(seg.begin(), seg.end(), 0.0), before);
    history.push_back(total);
    ++out.sweeps;
    if (before - total < settings.sweep_tol * (1.0 + total)) return out;
  }
  out.capped = true;
  return out;
}

std::optional<double> certified_length(const DomainOracle& dom, const std::vector<Point>& nodes, int rays) {
  metric::QuadratureOptions q;
  q.line.rays = rays;
  try {
    double total = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) total += metric::segment_length_upper(dom, nodes[i - 1], nodes[i], q);
    return total;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NodeOutsideDomain) return std::nullopt;
    throw;
  }
}

}  // namespace

PolyCurve straight_segment(const DomainOracle& dom, const Point& p, const Point& q, int n_nodes) {
  if (n_nodes < 2) throw Error(ErrorCode::InvalidArgument, "a segment needs at least two nodes");
  if (p.size() != dom.dim() || q.size() != dom.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  if (!dom.contains(p) || !dom.contains(q)) throw Error(ErrorCode::NotInterior, "segment endpoint outside the domain");
  const int checks = 8 * (n_nodes - 1);
  for (int k = 1; k < checks; ++k) {
    const double s = static_cast<double>(k) / checks;
    if (!dom.contains(p + s * (q - p))) throw Error(ErrorCode::SegmentExitsDomain, "segment leaves the domain");
  }
  std::vector<Point> nodes;
  nodes.reserve(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    const double s = static_cast<double>(k) / (n_nodes - 1);
    nodes.push_back(k == n_nodes - 1 ? q : Point(p + s * (q - p)));
  }
  return make_curve(std::move(nodes));
}

GeodesicResult optimize_geodesic(const DomainOracle& dom, const Point& p, const Point& q,
                                 const GeodesicSettings& settings) {
  if (p.size() != dom.dim() || q.size() != dom.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from domain");
  if (!dom.contains(p) || !dom.contains(q)) throw Error(ErrorCode::NotInterior, "endpoint outside the domain");

  GeodesicResult result;
  if ((p - q).norm() == 0.0) {
    result.curve = make_curve({p, q});
    result.start = "degenerate";
    result.level_lengths.push_back(0.0);
    return result;
  }

  const SegmentCost cost(dom, settings.line_rays);
  const int coarse = std::max(2, std::min(settings.coarse_nodes, settings.nodes));

  // Candidate starts.
  std::vector<Point> start;
  double start_cost = kInf;
  try {
    start = straight_segment(dom, p, q, coarse).nodes;
    start_cost = total_cost(cost, start);
    result.start = "straight";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SegmentExitsDomain) throw;
  }
  if (settings.graph_seed || !std::isfinite(start_cost)) {
    const auto grid = dijkstra_grid_path(dom, p, q, settings.graph_grid);
    for (int n = coarse; n <= std::max(settings.max_nodes, coarse); n = 2 * n - 1) {
      auto nodes = resample(grid.curve.nodes, n);
      const double c = total_cost(cost, nodes);
      if (std::isfinite(c)) {
        // Compare per unit of resolution: coarse straight starts are fine
        // when they are already shorter.
        if (c < start_cost) {
          start = std::move(nodes);
          start_cost = c;
          result.start = "grid";
        }
        break;
      }
    }
  }
  if (!std::isfinite(start_cost))
    throw Error(ErrorCode::SegmentExitsDomain, "no admissible start curve between the endpoints");

  Rng rng(settings.seed);
  std::vector<Point> nodes = std::move(start);
  std::vector<Point> best_nodes;
  double best = kInf;
  double previous_level = kInf;

  while (true) {
    const bool capped = lbfgs_pass(cost, nodes, settings, result.sweep_lengths);
    const auto outcome = relax(cost, nodes, settings, rng, result.sweep_lengths);
    result.sweeps += outcome.sweeps;
    result.max_iterations = result.max_iterations || outcome.capped || capped;
    const auto certified = certified_length(dom, nodes, settings.line_rays);
    if (certified && *certified < best) {
      best = *certified;
      best_nodes = nodes;
    }
    result.level_lengths.push_back(best);

    const int n = static_cast<int>(nodes.size());
    const int next = 2 * n - 1;
    bool refine = n < settings.nodes;
    if (!refine && next <= settings.max_nodes && best > settings.stall_ratio * settings.lower_bound) {
      // Past the regular levels, keep doubling only while it still pays.
      refine = std::isfinite(previous_level) && previous_level - best > 1e-4 * best;
    }
    previous_level = best;
    if (!refine) break;
    nodes = refine_nodes(nodes);
  }

  if (!std::isfinite(best)) throw Error(ErrorCode::NumericalFailure, "optimised curve left the domain");
  result.curve = make_curve(std::move(best_nodes));
  result.length = best;
  return result;
}

GridPath dijkstra_grid_path(const DomainOracle& dom, const Point& p, const Point& q, int grid_n,
                            std::optional<double> window) {
  if (grid_n < 3) throw Error(ErrorCode::InvalidArgument, "grid too small");
  if (!dom.contains(p) || !dom.contains(q)) throw Error(ErrorCode::NotInterior, "endpoint outside the domain");
  const Point diff = q - p;
  const double L = diff.norm();
  if (L == 0.0) return {0.0, make_curve({p, q})};

  const Point u = diff / L;
  const Point c = 0.5 * (p + q);
  double W;
  if (window) {
    W = *window;
  } else if (auto r = dom.bounding_radius()) {
    W = *r + c.norm();
  } else {
    W = 4.0 * (1.0 + L);
  }
  const Complex zp(-0.5 * L, 0.0), zq(0.5 * L, 0.0);
  if (std::abs(zp.real()) > W || std::abs(zq.real()) > W)
    throw Error(ErrorCode::PointsOutsideWindow, "endpoints outside the grid window");

  const double h = 2.0 * W / (grid_n - 1);
  auto to_point = [&](Complex z) -> Point { return c + z * u; };
  auto grid_z = [&](int i, int j) { return Complex(-W + h * i, -W + h * j); };
  const int N = grid_n * grid_n;
  std::vector<char> inside(N);
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) inside[i * grid_n + j] = dom.contains(to_point(grid_z(i, j))) ? 1 : 0;

  std::vector<std::pair<int, int>> stencil;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      if ((a != 0 || b != 0) && std::gcd(std::abs(a), std::abs(b)) == 1) stencil.emplace_back(a, b);

  domains::LineSearchOptions line;
  auto edge = [&](Complex za, Complex zb) {
    const Point a = to_point(za), b = to_point(zb);
    const Point mid = 0.5 * (a + b);
    if (!dom.contains(mid)) return kInf;
    const Point d = b - a;
    const double delta = domains::line_boundary_distance(dom, mid, d, line);
    return std::isfinite(delta) ? d.norm() / delta : 0.0;
  };

  // Node ids: grid cells, then p (N) and q (N + 1).
  const int P = N, Q = N + 1;
  auto position = [&](int id) {
    if (id == P) return zp;
    if (id == Q) return zq;
    return grid_z(id / grid_n, id % grid_n);
  };
  std::vector<double> dist(N + 2, kInf);
  std::vector<int> prev(N + 2, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[P] = 0.0;
  heap.emplace(0.0, P);

  const double attach = 2.0 * h;
  auto nearby = [&](Complex z, auto&& visit) {
    const int i0 = static_cast<int>(std::floor((z.real() + W) / h));
    const int j0 = static_cast<int>(std::floor((z.imag() + W) / h));
    for (int i = i0 - 2; i <= i0 + 3; ++i)
      for (int j = j0 - 2; j <= j0 + 3; ++j) {
        if (i < 0 || j < 0 || i >= grid_n || j >= grid_n || !inside[i * grid_n + j]) continue;
        if (std::abs(grid_z(i, j) - z) <= attach) visit(i * grid_n + j);
      }
  };

  while (!heap.empty()) {
    const auto [d, id] = heap.top();
    heap.pop();
    if (d > dist[id]) continue;
    if (id == Q) break;
    const Complex z = position(id);
    auto relax_to = [&](int to) {
      if (to == id) return;
      const double w = edge(z, position(to));
      if (d + w < dist[to]) {
        dist[to] = d + w;
        prev[to] = id;
        heap.emplace(dist[to], to);
      }
    };
    if (id == P) {
      nearby(zp, relax_to);
      if (L <= attach) relax_to(Q);
      continue;
    }
    const int i = id / grid_n, j = id % grid_n;
    for (const auto& [a, b] : stencil) {
      const int ni = i + a, nj = j + b;
      if (ni < 0 || nj < 0 || ni >= grid_n || nj >= grid_n || !inside[ni * grid_n + nj]) continue;
      relax_to(ni * grid_n + nj);
    }
    if (std::abs(z - zq) <= attach) relax_to(Q);
  }
  if (!std::isfinite(dist[Q])) throw Error(ErrorCode::NumericalFailure, "grid does not connect the endpoints");

  std::vector<Point> path;
  for (int id = Q; id != -1; id = prev[id]) path.push_back(id == P ? p : (id == Q ? q : to_point(position(id))));
  std::reverse(path.begin(), path.end());
  return {dist[Q], make_curve(std::move(path))};
}

double dijkstra_grid_distance(const DomainOracle& dom, const Point& p, const Point& q, int grid_n,
                              std::optional<double> window) {
  return dijkstra_grid_path(dom, p, q, grid_n, window).length;
}

PolyCurve normal_ray_curve(const DomainOracle& dom, const domains::NormalRay& ray, double t_max, int n_nodes) {
  if (dom.is_singular(ray.base)) throw Error(ErrorCode::SingularBoundaryPoint, "ray based at a singular point");
  if (n_nodes < 2 || !(t_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "need t_max > 0 and two nodes");
  const double eps = std::min(ray.eps, 1.0);
  std::vector<Point> nodes;
  std::vector<double> times;
  for (int k = 0; k < n_nodes; ++k) {
    const double t = t_max * k / (n_nodes - 1);
    times.push_back(t);
    nodes.push_back(ray.base + std::exp(-t) * eps * ray.normal);
  }
  return make_curve(std::move(nodes), std::move(times));
}

PolyCurve normal_ray_curve(const DomainOracle& dom, const Point& x, double t_max, int n_nodes) {
  return normal_ray_curve(dom, domains::normal_reach(dom, x), t_max, n_nodes);
}

QuasiGeodesicReport qg_constants_measure(const DistanceFn& dist, const PolyCurve& curve,
                                         const std::string& metric_used) {
  curve.validate();
  if (curve.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three nodes");
  struct Sample {
    double gap;
    double d;
  };
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < curve.size(); ++i)
    for (std::size_t j = i + 1; j < curve.size(); ++j)
      samples.push_back({curve.times[j] - curve.times[i], dist(curve.nodes[i], curve.nodes[j])});

  QuasiGeodesicReport r;
  r.metric_used = metric_used;
  r.pairs_tested = static_cast<int>(samples.size());
  if (std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.d == 0.0; })) {
    r.degenerate = true;
    return r;
  }

  double A0 = 1.0;
  for (const auto& s : samples) {
    if (s.d == 0.0) {
      A0 = kInf;
      break;
    }
    A0 = std::max({A0, s.d / s.gap, s.gap / s.d});
  }
  if (std::isfinite(A0)) {
    r.A = A0;
    return r;
  }
  // Some distinct parameters share a point: take A from well-separated
  // pairs and absorb the rest into B.
  double A = 1.0;
  for (const auto& s : samples) {
    if (s.gap >= 1.0 && s.d > 0.0) A = std::max({A, s.d / s.gap, s.gap / s.d});
  }
  double B = 0.0;
  for (const auto& s : samples) B = std::max({B, s.d - A * s.gap, s.gap / A - s.d});
  r.A = A;
  r.B = B;
  return r;
}

ShadowingReport shadowing_gap(const DistanceFn& dist, const PolyCurve& a, const PolyCurve& b) {
  a.validate();
  b.validate();
  auto directed = [&](const PolyCurve& x, const PolyCurve& y) {
    double sup = 0.0;
    for (const auto& p : x.nodes) {
      double inf = kInf;
      for (const auto& q : y.nodes) inf = std::min(inf, dist(p, q));
      sup = std::max(sup, inf);
    }
    return sup;
  };
  ShadowingReport r;
  r.sup_gap = std::max(directed(a, b), directed(b, a));
  r.base_gap = dist(a.front(), b.front());
  r.M_effective = r.sup_gap - 2.0 * r.base_gap;
  return r;
}

}  // namespace kobacore::paths
