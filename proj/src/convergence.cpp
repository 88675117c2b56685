#include "kobacore/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kobacore/parallel.hpp"
#include "kobacore/random.hpp"

namespace kobacore::convergence {
namespace {

Point to_complex_coords(const RealVector& x) {
  Point p(x.size() / 2);
  for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = Complex(x(2 * j), x(2 * j + 1));
  return p;
}

// Largest distance from a shell point of `a` lying outside `b` to the shell
// of `b`. Early exit per point once it cannot raise the running maximum;
// visiting order is a fixed shuffle so the result is reproducible.
double directed(const SetSampler& a, const SetSampler& b) {
  const auto& A = a.cloud();
  const auto& B = b.cloud();
  std::vector<std::size_t> order(B.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(0x5eed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  double best2 = 0.0;
  for (const auto& x : A) {
    if (b.contains(x)) continue;
    double nearest2 = std::numeric_limits<double>::infinity();
    for (std::size_t k : order) {
      nearest2 = std::min(nearest2, (x - B[k]).squaredNorm());
      if (nearest2 <= best2) break;
    }
    best2 = std::max(best2, nearest2);
  }
  return std::sqrt(best2);
}

}  // namespace

int default_resolution(int real_dim) { return real_dim <= 2 ? 128 : (real_dim <= 4 ? 32 : 12); }

SetSampler::SetSampler(std::function<double(const RealVector&)> value, int real_dim, double window, int resolution)
    : value_(std::move(value)), dim_(real_dim), window_(window),
      resolution_(resolution > 0 ? resolution : default_resolution(real_dim)) {
  if (!(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window radius must be positive");
  if (real_dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (resolution_ < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 2");

  const int n = resolution_;
  const double h = 2.0 * window_ / (n - 1);
  std::size_t total = 1;
  for (int j = 0; j < dim_; ++j) total *= static_cast<std::size_t>(n);

  auto coords = [&](std::size_t idx) {
    RealVector x(dim_);
    for (int j = 0; j < dim_; ++j) {
      x(j) = -window_ + h * static_cast<double>(idx % n);
      idx /= n;
    }
    return x;
  };

  std::vector<char> inside(total);
  const std::size_t chunk = 4096;
  parallel_for((total + chunk - 1) / chunk, [&](std::size_t c) {
    const std::size_t end = std::min(total, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) inside[i] = value_(coords(i)) <= 0.0;
  });

  for (std::size_t i = 0; i < total; ++i) {
    if (!inside[i]) continue;
    bool shell = false;
    std::size_t stride = 1, rest = i;
    for (int j = 0; j < dim_ && !shell; ++j) {
      const std::size_t k = rest % n;
      rest /= n;
      shell = k == 0 || k + 1 == static_cast<std::size_t>(n) || !inside[i - stride] || !inside[i + stride];
      stride *= n;
    }
    if (shell) cloud_.push_back(coords(i));
  }
}

SetSampler SetSampler::from_domain(const DomainOracle& dom, double window, int resolution) {
  return SetSampler([dom](const RealVector& x) { return dom.value(to_complex_coords(x)); }, 2 * dom.dim(), window,
                    resolution);
}

SetSampler SetSampler::from_body(const hilbert::RealConvexBody& body, double window, int resolution) {
  return SetSampler([body](const RealVector& x) { return body.value(x); }, body.dim(), window, resolution);
}

double SetSampler::cell_diameter() const { return 2.0 * window_ / (resolution_ - 1) * std::sqrt(double(dim_)); }

SetSampler SetSampler::truncated(double R) const {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation radius must be positive");
  auto v = value_;
  return SetSampler([v, R](const RealVector& x) { return std::max(v(x), x.norm() - R); }, dim_, R, resolution_);
}

HausdorffEstimate hausdorff_distance(const SetSampler& a, const SetSampler& b) {
  if (a.real_dim() != b.real_dim()) throw Error(ErrorCode::DimensionMismatch, "sets live in different dimensions");
  if (a.cloud().empty() || b.cloud().empty())
    throw Error(ErrorCode::EmptySampleCloud, "no sample of the set inside the window");
  return {std::max(directed(a, b), directed(b, a)), std::max(a.cell_diameter(), b.cell_diameter())};
}

HausdorffEstimate local_hausdorff(const SetSampler& a, const SetSampler& b, double R) {
  return hausdorff_distance(a.truncated(R), b.truncated(R));
}

std::vector<DomainOracle> rescaled_family(const DomainOracle& dom, const std::vector<double>& t_schedule) {
  if (dom.weights().empty()) throw Error(ErrorCode::NonHomogeneousFamily, dom.name() + " carries no scaling group");
  std::vector<DomainOracle> out;
  for (double t : t_schedule) out.push_back(domains::make_rescaled(dom, t));
  return out;
}

DomainOracle perturbed_epigraph(const DomainOracle& dom, double eps) {
  const auto* F = dom.epigraph();
  if (!F) throw Error(ErrorCode::InvalidArgument, dom.name() + " is not an epigraph");
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation must be nonnegative");
  return domains::make_epigraph(F->plus_square_norm(eps), dom.weights());
}

ProbeReport metric_convergence_probe(const std::vector<DomainOracle>& sequence, const std::vector<double>& labels,
                                     const DomainOracle& limit, const std::vector<std::pair<Point, Point>>& pairs,
                                     const ProbeOptions& options) {
  if (labels.size() != sequence.size()) throw Error(ErrorCode::InvalidArgument, "one label per domain");
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no test pairs");

  auto measure = [&](const DomainOracle& dom, ProbeRow& row) {
    row.intervals.resize(pairs.size());
    row.khat.resize(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [p, q] = pairs[i];
      row.intervals[i] = metric::distance_interval(dom, p, q, options.settings);
      row.khat[i] = (p - q).norm() == 0.0 ? 0.0 : metric::khat(dom, p, q - p);
    }
  };

  ProbeReport rep;
  for (const auto& [p, q] : pairs)
    if (!limit.contains(p) || !limit.contains(q))
      throw Error(ErrorCode::PairExitsDomain, "test pair leaves the limit domain");
  measure(limit, rep.limit);

  rep.rows.resize(sequence.size());
  for (std::size_t n = 0; n < sequence.size(); ++n) {
    ProbeRow& row = rep.rows[n];
    row.label = labels[n];
    const bool fits = std::all_of(pairs.begin(), pairs.end(), [&](const auto& pq) {
      return sequence[n].contains(pq.first) && sequence[n].contains(pq.second);
    });
    if (!fits) {
      if (!options.skip_exiting) throw Error(ErrorCode::PairExitsDomain, "test pair leaves " + sequence[n].name());
      row.skipped = true;
      continue;
    }
    measure(sequence[n], row);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& a = row.intervals[i];
      const auto& b = rep.limit.intervals[i];
      row.interval_drift = std::max({row.interval_drift, std::abs(a.lower - b.lower), std::abs(a.upper - b.upper)});
      row.khat_drift = std::max(row.khat_drift, std::abs(row.khat[i] - rep.limit.khat[i]));
    }
  }
  return rep;
}

}  // namespace kobacore::convergence
