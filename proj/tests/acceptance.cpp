// End-to-end acceptance run: one PASS/FAIL line per criterion, each with its
// own runtime budget. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "kobacore/cli.hpp"
#include "kobacore/convergence.hpp"
#include "kobacore/hilbert.hpp"
#include "kobacore/hyperbolicity.hpp"
#include "kobacore/metric.hpp"
#include "kobacore/parallel.hpp"
#include "kobacore/paths.hpp"
#include "kobacore/random.hpp"

using namespace kobacore;
namespace hyp = kobacore::hyperbolicity;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DistanceFn exact_on(const domains::DomainOracle& dom) {
  return [dom](const Point& a, const Point& b) { return metric::exact_distance(dom, a, b); };
}

// Interior sample: |z| <= 0.95 in the disk/ball, each |z_j| <= 0.95 in the bidisc.
Point sample(const domains::DomainOracle& dom, Rng& rng) {
  if (dom.kind() == domains::FamilyKind::Polydisc) {
    Point p(dom.dim());
    for (int j = 0; j < dom.dim(); ++j) p(j) = std::polar(0.95 * std::sqrt(rng.uniform()), 2 * M_PI * rng.uniform());
    return p;
  }
  return 0.95 * std::pow(rng.uniform(), 1.0 / (2 * dom.dim())) * rng.unit_vector(dom.dim());
}

Outcome sandwich() {
  int violations = 0, total = 0;
  double worst = 0.0;
  for (const auto& dom : {domains::make_ball(1), domains::make_ball(2), domains::make_polydisc({1.0, 1.0})}) {
    const int n = 1000;
    std::vector<double> slack(n);
    parallel_for(n, [&](std::size_t k) {
      Rng rng(substream_seed(2024, k + 1000 * dom.dim() + (dom.kind() == domains::FamilyKind::Polydisc ? 7000 : 0)));
      const Point p = sample(dom, rng), q = sample(dom, rng);
      const auto b = metric::distance_interval(dom, p, q);
      const double e = metric::exact_distance(dom, p, q);
      slack[k] = std::min(e - b.lower, b.upper - e);
    });
    for (double s : slack) {
      violations += s < -1e-9;
      worst = std::min(worst, s);
    }
    total += n;
  }
  return {violations == 0, fmt("%d pairs over disk, ball, bidisc; %d violations (min slack %.3g)", total, violations, worst)};
}

Outcome infinitesimal() {
  int violations = 0;
  for (const auto& dom : {domains::make_ball(1), domains::make_ball(2)}) {
    Rng rng(31 + dom.dim());
    for (int k = 0; k < 1000; ++k) {
      const Point p = sample(dom, rng);
      const Point v = rng.unit_vector(dom.dim());
      const double e = metric::exact_infinitesimal(dom, p, v);
      const double lo = metric::k_lower(dom, p, v), hi = metric::khat(dom, p, v);
      violations += !(lo <= e * (1 + 1e-12) && e <= hi * (1 + 1e-12));
    }
  }
  return {violations == 0, fmt("2000 samples on disk and ball; %d violations", violations)};
}

Outcome optimizer() {
  const auto disk = domains::make_ball(1);
  const double len = paths::optimize_geodesic(disk, make_point({0.0}), make_point({0.5})).length;
  const bool in_range = len >= std::atanh(0.5) && len <= std::log(2.0) + 1e-6;
  std::vector<double> rel(50);
  parallel_for(rel.size(), [&](std::size_t k) {
    Rng rng(substream_seed(99, k));
    const Point p = sample(disk, rng), q = sample(disk, rng);
    const double g = paths::dijkstra_grid_distance(disk, p, q, 400);
    const double o = paths::optimize_geodesic(disk, p, q).length;
    rel[k] = std::abs(g - o) / o;
  });
  const double worst = *std::max_element(rel.begin(), rel.end());
  return {in_range && worst <= 0.03,
          fmt("geodesic(0, 0.5) = %.9f in [%.6f, %.9f]; grid-400 worst relative gap %.4f on 50 pairs", len,
              std::atanh(0.5), std::log(2.0) + 1e-6, worst)};
}

Outcome quasi_geodesic() {
  const auto disk = domains::make_ball(1);
  const auto ray = domains::normal_reach(disk, make_point({1.0}));
  const auto c = paths::normal_ray_curve(disk, ray, 8.0, 81);
  int bad = 0, pairs = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j, ++pairs) {
      const double gap = c.times[j] - c.times[i];
      const double K = metric::exact_distance(disk, c.nodes[i], c.nodes[j]);
      bad += K < 0.25 * gap - 1e-6 || K > gap / ray.c_lower + 1e-6;
    }
  return {bad == 0 && std::abs(ray.c_lower - 1.0) <= 1e-6,
          fmt("measured C = %.9f; %d of %d node pairs outside [|t-s|/4, |t-s|/C]", ray.c_lower, bad, pairs)};
}

Outcome four_point_contrast() {
  const auto bidisc = domains::make_polydisc({1.0, 1.0});
  const auto D = exact_on(bidisc);
  std::vector<double> Rs{1, 2, 4, 8}, deltas;
  bool witnesses = true;
  for (double R : Rs) {
    const hyp::Quadruple q{make_point({0.0, 0.0}), make_point({std::tanh(2 * R), 0.0}),
                           make_point({std::tanh(R), std::tanh(R)}), make_point({std::tanh(R), -std::tanh(R)})};
    deltas.push_back(hyp::four_point_delta(D, {q}));
    witnesses = witnesses && deltas.back() >= R - 1e-9;
  }
  const auto vb = hyp::verdict(Rs, deltas);
  const auto ball = hyp::four_point_scan(hyp::exact_model(domains::make_ball(2), 200, 7), {2, 4, 8}, 7);
  const auto va = hyp::verdict(ball);
  const double ratio = ball.delta_per_scale.back() / ball.delta_per_scale.front();
  return {witnesses && vb.verdict == hyp::Verdict::Growing && ratio <= 1.2 &&
              va.verdict == hyp::Verdict::BoundedConsistent,
          fmt("bidisc witness deltas %.6f %.6f %.6f %.6f -> %s; ball deltas %.4f %.4f %.4f ratio %.4f -> %s",
              deltas[0], deltas[1], deltas[2], deltas[3], hyp::to_string(vb.verdict), ball.delta_per_scale[0],
              ball.delta_per_scale[1], ball.delta_per_scale[2], ratio, hyp::to_string(va.verdict))};
}

Outcome cone_scans() {
  bool ok = true;
  std::string detail;
  for (int d : {1, 2}) {
    const auto cone = domains::make_pnorm_cone(d, 2.0);
    hyp::HomogeneousPoolOptions o;
    o.quadruples = 100;
    const auto rep = hyp::four_point_scan(hyp::homogeneous_surrogate_model(cone, o, 1), {1, 4, 16, 64}, 1);
    const auto v = hyp::verdict(rep);
    ok = ok && v.growth_ratio <= 1.5 && v.verdict == hyp::Verdict::BoundedConsistent;
    detail += fmt("%sd=%d deltas %.4f %.4f %.4f %.4f ratio %.3f exponent %.3f -> %s", d == 1 ? "" : "; ", d,
                  rep.delta_per_scale[0], rep.delta_per_scale[1], rep.delta_per_scale[2], rep.delta_per_scale[3],
                  v.growth_ratio, v.exponent, hyp::to_string(v.verdict));
  }
  return {ok, detail};
}

Outcome flat_mechanism() {
  const auto flat = hyp::flat_shadowing_probe(domains::make_polydisc({1.0, 1.0}), make_point({1.0, 0.0}),
                                              make_point({1.0, 0.5}), {1, 2, 3, 4, 5, 6});
  const auto div = hyp::boundary_divergence_probe(domains::make_ball(2), make_point({1.0, 0.0}), make_point({-1.0, 0.0}),
                                                  {1, 2, 3, 4, 5, 6});
  return {flat.bounded && div.slope >= 0.2,
          fmt("bidisc shadowing last/first %.4f (sup %.4f); ball divergence slope %.4f per unit t", flat.ratio,
              flat.sup_gap, div.slope)};
}

Outcome invariance() {
  Rng rng(8);
  const auto cone = domains::make_pnorm_cone(2, 2.0);
  const auto poly = domains::make_epigraph(
      domains::EpigraphFunction(2, 0.0, 2.0, {{1.0, {2.0, 0.0}}, {1.0, {0.0, 4.0}}}), {0.5, 0.25}, true);
  double worst = 0.0;
  for (const auto* dom : {&cone, &poly})
    for (int k = 0; k < 100; ++k) {
      Point p(3);
      p(1) = rng.complex_normal();
      p(2) = rng.complex_normal();
      p(0) = Complex(rng.normal(), dom->epigraph()->value(p.tail(2)) + 0.05 + 2 * rng.uniform());
      const Point v = rng.unit_vector(3);
      const double t = std::exp(rng.uniform(-3.0, 3.0));
      const double a = metric::khat(*dom, p, v);
      const double b = metric::khat(*dom, domains::scaling_group_apply(*dom, t, p), domains::scaling_group_apply(*dom, t, v));
      worst = std::max(worst, std::abs(a - b) / a);
    }
  return {worst <= 1e-8, fmt("200 group elements on the 2-norm cone and |z1|^2+|z2|^4; worst relative change %.3g", worst)};
}

Outcome hilbert_contrast() {
  const double h = hilbert::hilbert_distance(hilbert::disk(), RealVector{{0.0, 0.0}}, RealVector{{0.5, 0.0}});
  const auto sq = hilbert::hilbert_four_point_scan(hilbert::square(), 200, {2, 4, 8}, 3);
  const auto dk = hilbert::hilbert_four_point_scan(hilbert::disk(), 200, {2, 4, 8}, 3);
  const auto vs = hyp::verdict(sq), vd = hyp::verdict(dk);
  return {std::abs(h - std::atanh(0.5)) <= 1e-9 && vs.verdict == hyp::Verdict::Growing &&
              vd.verdict == hyp::Verdict::BoundedConsistent,
          fmt("H(disk, 0, 0.5) - arctanh 0.5 = %.2e; square deltas %.4f %.4f %.4f -> %s; disk ratio %.4f -> %s",
              h - std::atanh(0.5), sq.delta_per_scale[0], sq.delta_per_scale[1], sq.delta_per_scale[2],
              hyp::to_string(vs.verdict), vd.growth_ratio, hyp::to_string(vd.verdict))};
}

Outcome convergence_probes() {
  using convergence::SetSampler;
  auto ball = [](double r, double w) {
    return SetSampler([r](const RealVector& x) { return x.norm() - r; }, 2, w);
  };
  const auto b12 = convergence::hausdorff_distance(ball(1, 2.5), ball(2, 2.5));
  const auto b12c2 = convergence::hausdorff_distance(SetSampler::from_domain(domains::make_ball(2, 1.0), 2.5, 64),
                                                     SetSampler::from_domain(domains::make_ball(2, 2.0), 2.5, 64));
  const auto sd = convergence::hausdorff_distance(SetSampler::from_body(hilbert::square(), 1.5), ball(1, 1.5));
  double worst = 0.0;
  for (int n = 1; n <= 64; ++n) {
    const double k = metric::khat(domains::make_ball(2, 1.0 + 1.0 / n), make_point({0.0, 0.0}), make_point({1.0, 0.0}));
    worst = std::max(worst, std::abs(k - 1.0 / (1.0 + 1.0 / n)));
  }
  const bool ok = std::abs(b12.value - 1) <= b12.error && std::abs(b12c2.value - 1) <= b12c2.error &&
                  std::abs(sd.value - (std::sqrt(2.0) - 1)) <= sd.error && worst <= 1e-10;
  return {ok, fmt("d_H(B1,B2) = %.4f +- %.4f (plane), %.4f +- %.4f (C^2); square vs disk %.4f +- %.4f; khat worst %.2e",
                  b12.value, b12.error, b12c2.value, b12c2.error, sd.value, sd.error, worst)};
}

Outcome determinism() {
  const auto configs = nlohmann::json::parse(R"([
    {"experiment": "probe", "seed": 5, "domain": {"family": "polydisc", "dim": 2},
     "schedule": [1, 2, 4], "sampler": {"quadruples": 50}},
    {"experiment": "probe", "seed": 5, "domain": {"family": "pcone", "d": 1, "p": 2},
     "schedule": [1, 4], "sampler": {"model": "surrogate", "pool": 6, "quadruples": 5, "nodes": 9}},
    {"experiment": "geodesic", "seed": 5, "domain": {"family": "ball", "dim": 2}, "sampler": {"pairs": 4}},
    {"experiment": "sandwich", "seed": 5, "domain": {"family": "polydisc", "dim": 2}, "sampler": {"pairs": 6}},
    {"experiment": "hilbert", "seed": 5, "body": {"body": "ngon", "n": 64}, "schedule": [2, 4, 8],
     "sampler": {"quadruples": 50}},
    {"experiment": "converge", "seed": 5, "domain": {"family": "ball", "dim": 1}, "schedule": [1, 2, 4],
     "sampler": {"points": [[[0], [0.5]]]}},
    {"experiment": "flats", "seed": 5, "domain": {"family": "polydisc", "dim": 2}, "schedule": [1, 3],
     "sampler": {"x": [1, 0], "y": [1, 0.5]}}
  ])");
  int same = 0;
  std::string differing;
  for (const auto& c : configs) {
    const auto a = cli::run_experiment(c).csv;
    const auto b = cli::run_experiment(c).csv;
    if (a == b && !a.empty()) ++same;
    else differing += " " + c.at("experiment").get<std::string>();
  }
  return {same == static_cast<int>(configs.size()),
          fmt("%d of %zu experiment kinds byte-identical on rerun%s", same, configs.size(),
              differing.empty() ? "" : (";" + differing).c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "sandwich certification", 120, sandwich},
      {2, "infinitesimal sandwich", 30, infinitesimal},
      {3, "optimizer quality", 120, optimizer},
      {4, "quasi-geodesic constants", 10, quasi_geodesic},
      {5, "four-point contrast", 120, four_point_contrast},
      {6, "cone surrogate scans", 600, cone_scans},
      {7, "flat-boundary mechanism", 120, flat_mechanism},
      {8, "estimator invariance", 30, invariance},
      {9, "Hilbert contrast", 60, hilbert_contrast},
      {10, "convergence probes", 60, convergence_probes},
      {11, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed;
}
