#include "kobacore/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "kobacore/convergence.hpp"
#include "kobacore/hilbert.hpp"
#include "kobacore/hyperbolicity.hpp"
#include "kobacore/metric.hpp"
#include "kobacore/parallel.hpp"
#include "kobacore/paths.hpp"
#include "kobacore/random.hpp"

#ifndef KOBACORE_VERSION
#define KOBACORE_VERSION "unknown"
#endif

namespace kobacore::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// CSV writing

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string point_text(const Point& p) {
  std::string s;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (j) s += ' ';
    s += num(p(j).real()) + ' ' + num(p(j).imag());
  }
  return s;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw Error(ErrorCode::NumericalFailure, "csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << field(cells[i]);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::size_t width_;
  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// Config reading. Every accessor assumes validate_config has passed.

struct Issues {
  std::vector<std::string> list;
  void add(const std::string& s) { list.push_back(s); }
};

std::optional<Point> parse_point(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) return std::nullopt;
  Point p(dim);
  for (int k = 0; k < dim; ++k) {
    const auto& c = j[k];
    if (c.is_number())
      p(k) = c.get<double>();
    else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())
      p(k) = Complex(c[0].get<double>(), c[1].get<double>());
    else
      return std::nullopt;
  }
  return p;
}

const json& sampler_of(const json& config) {
  static const json empty = json::object();
  return config.contains("sampler") ? config.at("sampler") : empty;
}

template <class T>
T opt(const json& s, const char* key, T fallback) {
  return s.contains(key) ? s.at(key).get<T>() : fallback;
}

bool is_exact_family(const domains::DomainOracle& dom) {
  return dom.kind() == domains::FamilyKind::Ball || dom.kind() == domains::FamilyKind::Polydisc;
}

// Seeded interior point of a ball/polydisc at Euclidean fraction <= frac of the boundary.
Point random_interior(const domains::DomainOracle& dom, Rng& rng, double frac) {
  const Point u = rng.unit_vector(dom.dim());
  double scale = *dom.bounding_radius();
  if (dom.kind() == domains::FamilyKind::Polydisc) {
    const auto radii = dom.to_json().at("radii").get<std::vector<double>>();
    double m = 0.0;
    for (int j = 0; j < dom.dim(); ++j) m = std::max(m, std::abs(u(j)) / radii[j]);
    scale = 1.0 / m;
  }
  return frac * rng.uniform() * scale * u;
}

std::vector<std::pair<Point, Point>> pairs_of(const json& config, const domains::DomainOracle& dom) {
  const json& s = sampler_of(config);
  std::vector<std::pair<Point, Point>> out;
  if (s.contains("points")) {
    for (const auto& pq : s.at("points")) out.emplace_back(*parse_point(pq[0], dom.dim()), *parse_point(pq[1], dom.dim()));
    return out;
  }
  const int n = opt(s, "pairs", 50);
  const double frac = opt(s, "radius", 0.8);
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  for (int k = 0; k < n; ++k) {
    Rng rng(substream_seed(seed, k));
    Point p = random_interior(dom, rng, frac);
    Point q = random_interior(dom, rng, frac);
    out.emplace_back(std::move(p), std::move(q));
  }
  return out;
}

paths::GeodesicSettings geodesic_settings(const json& s, paths::GeodesicSettings base) {
  if (s.contains("nodes")) {
    base.max_nodes = s.at("nodes").get<int>();
    base.nodes = std::min(base.nodes, base.max_nodes);
    base.coarse_nodes = std::min(base.coarse_nodes, base.nodes);
  }
  return base;
}

void check_schedule(const json& config, Issues& issues) {
  if (!config.contains("schedule")) {
    issues.add("missing \"schedule\"");
    return;
  }
  const auto& s = config.at("schedule");
  if (!s.is_array() || s.empty()) {
    issues.add("\"schedule\" must be a non-empty array of numbers");
    return;
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].is_number()) {
      issues.add("\"schedule\" must contain numbers only");
      return;
    }
    const double v = s[i].get<double>();
    if (!(v > prev) || !std::isfinite(v)) {
      issues.add("schedule strictly increasing: entries must be positive and strictly increasing (entry " +
                 std::to_string(i) + " = " + num(v) + ")");
      return;
    }
    prev = v;
  }
}

struct SamplerKey {
  const char* name;
  enum Type { Int, PosInt, Number, Bool, String, Points, PointArray } type;
};

void check_sampler(const json& config, std::initializer_list<SamplerKey> keys, Issues& issues) {
  if (!config.contains("sampler")) return;
  const json& s = config.at("sampler");
  if (!s.is_object()) {
    issues.add("\"sampler\" must be an object");
    return;
  }
  for (const auto& [k, v] : s.items()) {
    const SamplerKey* key = nullptr;
    for (const auto& c : keys)
      if (k == c.name) key = &c;
    if (!key) {
      std::string names;
      for (const auto& c : keys) names += std::string(names.empty() ? "" : ", ") + c.name;
      issues.add("unknown sampler field \"" + k + "\"" + (names.empty() ? "" : " (allowed: " + names + ")"));
      continue;
    }
    bool ok = true;
    switch (key->type) {
      case SamplerKey::Int: ok = v.is_number_integer(); break;
      case SamplerKey::PosInt: ok = v.is_number_integer() && v.get<long long>() > 0; break;
      case SamplerKey::Number: ok = v.is_number(); break;
      case SamplerKey::Bool: ok = v.is_boolean(); break;
      case SamplerKey::String: ok = v.is_string(); break;
      case SamplerKey::Points:
        ok = v.is_array() && !v.empty();
        for (const auto& pq : v) ok = ok && pq.is_array() && pq.size() == 2;
        break;
      case SamplerKey::PointArray: ok = v.is_array(); break;
    }
    if (!ok) issues.add("sampler field \"" + k + "\" has the wrong type");
  }
}

std::optional<domains::DomainOracle> check_domain(const json& config, Issues& issues) {
  if (!config.contains("domain")) {
    issues.add("missing \"domain\"");
    return std::nullopt;
  }
  try {
    return domains::domain_from_json(config.at("domain"));
  } catch (const Error& e) {
    issues.add(std::string("domain: ") + e.what());
  } catch (const json::exception& e) {
    issues.add(std::string("domain: ") + e.what());
  }
  return std::nullopt;
}

void check_points(const json& config, const domains::DomainOracle& dom, Issues& issues, bool required) {
  const json& s = sampler_of(config);
  if (!s.contains("points")) {
    if (required) issues.add("sampler needs \"points\": [[p, q], ...]");
    else if (!is_exact_family(dom)) issues.add("generated pairs need a ball or polydisc; give sampler \"points\"");
    return;
  }
  if (!s.at("points").is_array()) return;
  for (const auto& pq : s.at("points")) {
    if (!pq.is_array() || pq.size() != 2) continue;
    for (const auto& p : pq) {
      const auto pt = parse_point(p, dom.dim());
      if (!pt) issues.add("point " + p.dump() + " is not a list of " + std::to_string(dom.dim()) + " coordinates");
      else if (!dom.contains(*pt)) issues.add("point " + p.dump() + " is not inside the domain");
    }
  }
}

const std::set<std::string>& common_keys() {
  static const std::set<std::string> k{"experiment", "seed", "output", "sampler"};
  return k;
}

}  // namespace

const char* version() { return KOBACORE_VERSION; }

std::vector<std::string> experiment_kinds() { return {"probe", "geodesic", "sandwich", "hilbert", "converge", "flats"}; }

std::vector<std::string> validate_config(const json& config) {
  Issues issues;
  if (!config.is_object()) return {"config must be a JSON object"};

  if (!config.contains("experiment") || !config.at("experiment").is_string()) {
    std::string kinds;
    for (const auto& k : experiment_kinds()) kinds += (kinds.empty() ? "" : ", ") + k;
    return {"missing \"experiment\" (one of: " + kinds + ")"};
  }
  const std::string kind = config.at("experiment").get<std::string>();
  std::set<std::string> allowed = common_keys();
  if (kind == "probe" || kind == "converge" || kind == "flats") allowed.insert({"domain", "schedule"});
  else if (kind == "geodesic" || kind == "sandwich") allowed.insert("domain");
  else if (kind == "hilbert") allowed.insert({"body", "schedule"});
  else {
    std::string kinds;
    for (const auto& k : experiment_kinds()) kinds += (kinds.empty() ? "" : ", ") + k;
    return {"unknown experiment \"" + kind + "\" (one of: " + kinds + ")"};
  }

  for (const auto& [k, _] : config.items())
    if (!allowed.count(k)) issues.add("unknown field \"" + k + "\"");
  if (!config.contains("seed")) issues.add("missing \"seed\" (mandatory)");
  else if (!config.at("seed").is_number_unsigned()) issues.add("\"seed\" must be a non-negative integer");
  if (config.contains("output") && !config.at("output").is_string()) issues.add("\"output\" must be a string");
  if (allowed.count("schedule")) check_schedule(config, issues);

  const json& s = sampler_of(config);
  if (kind == "probe") {
    check_sampler(config, {{"model", SamplerKey::String}, {"quadruples", SamplerKey::PosInt},
                           {"pool", SamplerKey::PosInt}, {"planted", SamplerKey::Bool}, {"nodes", SamplerKey::PosInt}},
                  issues);
    if (const auto dom = check_domain(config, issues)) {
      const std::string model = s.value("model", is_exact_family(*dom) ? "exact" : "surrogate");
      if (model == "exact" && !is_exact_family(*dom)) issues.add("exact probe needs a ball or polydisc");
      else if (model == "surrogate" && !(dom->homogeneous() && dom->epigraph()))
        issues.add("surrogate probe needs a homogeneous epigraph family");
      else if (model != "exact" && model != "surrogate") issues.add("sampler model must be \"exact\" or \"surrogate\"");
      if (opt(s, "pool", 16) < 4) issues.add("sampler pool needs at least 4 points");
    }
  } else if (kind == "geodesic" || kind == "sandwich") {
    check_sampler(config, {{"pairs", SamplerKey::PosInt}, {"radius", SamplerKey::Number}, {"points", SamplerKey::Points},
                           {"nodes", SamplerKey::PosInt}},
                  issues);
    if (const auto dom = check_domain(config, issues)) {
      check_points(config, *dom, issues, false);
      if (kind == "sandwich" && !metric::has_exact_model(*dom)) issues.add("sandwich needs a domain with an exact model");
    }
    if (s.contains("radius") && s.at("radius").is_number() &&
        !(s.at("radius").get<double>() > 0.0 && s.at("radius").get<double>() < 1.0))
      issues.add("sampler radius must lie in (0, 1)");
  } else if (kind == "hilbert") {
    check_sampler(config, {{"quadruples", SamplerKey::PosInt}, {"planted", SamplerKey::Bool}}, issues);
    if (!config.contains("body")) issues.add("missing \"body\"");
    else try {
        hilbert::body_from_json(config.at("body"));
      } catch (const Error& e) {
        issues.add(std::string("body: ") + e.what());
      }
  } else if (kind == "converge") {
    check_sampler(config, {{"window", SamplerKey::Number}, {"resolution", SamplerKey::PosInt},
                           {"points", SamplerKey::Points}, {"nodes", SamplerKey::PosInt}},
                  issues);
    if (const auto dom = check_domain(config, issues)) {
      check_points(config, *dom, issues, true);
      if (!is_exact_family(*dom) && !dom->epigraph())
        issues.add("converge needs a ball, polydisc or epigraph family");
    }
  } else if (kind == "flats") {
    check_sampler(config, {{"x", SamplerKey::PointArray}, {"y", SamplerKey::PointArray}, {"probe", SamplerKey::String},
                           {"strict", SamplerKey::Bool}, {"nodes", SamplerKey::PosInt}},
                  issues);
    if (const auto dom = check_domain(config, issues)) {
      for (const char* key : {"x", "y"}) {
        if (!s.contains(key)) issues.add(std::string("sampler needs boundary point \"") + key + "\"");
        else if (!parse_point(s.at(key), dom->dim()))
          issues.add(std::string("sampler \"") + key + "\" is not a list of " + std::to_string(dom->dim()) +
                     " coordinates");
      }
    }
    const std::string probe = s.value("probe", "shadowing");
    if (probe != "shadowing" && probe != "divergence") issues.add("sampler probe must be \"shadowing\" or \"divergence\"");
  }
  return issues.list;
}

RunOutput run_experiment(const json& config) {
  const auto issues = validate_config(config);
  if (!issues.empty()) throw Error(ErrorCode::InvalidSpec, issues.front());

  const auto start = std::chrono::steady_clock::now();
  const std::string kind = config.at("experiment").get<std::string>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const json& s = sampler_of(config);
  std::vector<double> schedule;
  if (config.contains("schedule")) schedule = config.at("schedule").get<std::vector<double>>();

  RunOutput out;
  std::string metric_used;

  if (kind == "probe" || kind == "hilbert") {
    hyperbolicity::ScanModel model;
    std::string subject;
    if (kind == "probe") {
      const auto dom = domains::domain_from_json(config.at("domain"));
      subject = dom.name();
      const int quads = opt(s, "quadruples", 100);
      if (s.value("model", is_exact_family(dom) ? "exact" : "surrogate") == "exact") {
        model = hyperbolicity::exact_model(dom, quads, seed, opt(s, "planted", true));
      } else {
        hyperbolicity::HomogeneousPoolOptions o;
        o.pool = opt(s, "pool", 16);
        o.quadruples = quads;
        o.settings = geodesic_settings(s, hyperbolicity::scan_geodesic_settings());
        model = hyperbolicity::homogeneous_surrogate_model(dom, o, seed);
      }
    } else {
      const auto body = hilbert::body_from_json(config.at("body"));
      subject = body.to_json().dump();
      model = hilbert::hilbert_model(body, opt(s, "quadruples", 100), seed, opt(s, "planted", true));
    }
    const auto rep = hyperbolicity::four_point_scan(model, schedule, seed);
    metric_used = rep.metric_used;
    CsvWriter csv({"scale", "delta", "witness", "metric_used", "seed", "subject", "estimator"});
    for (std::size_t i = 0; i < rep.scale_schedule.size(); ++i) {
      const auto& w = rep.witness[i];
      csv.row({num(rep.scale_schedule[i]), num(rep.delta_per_scale[i]),
               point_text(w.x) + ";" + point_text(w.y) + ";" + point_text(w.z) + ";" + point_text(w.w),
               rep.metric_used, std::to_string(seed), subject, "four-point"});
    }
    out.csv = csv.str();
  } else if (kind == "geodesic" || kind == "sandwich") {
    const auto dom = domains::domain_from_json(config.at("domain"));
    const auto pairs = pairs_of(config, dom);
    const auto settings = geodesic_settings(s, {});
    const bool exact = metric::has_exact_model(dom);
    std::vector<std::vector<std::string>> rows(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
      const auto& [p, q] = pairs[k];
      const double ex = exact ? metric::exact_distance(dom, p, q) : kNaN;
      if (kind == "geodesic") {
        const auto g = paths::optimize_geodesic(dom, p, q, settings);
        rows[k] = {std::to_string(k), point_text(p), point_text(q), num(g.length), num(metric::distance_lower(dom, p, q)),
                   num(ex), std::to_string(g.curve.size()), "khat-length", "line-and-sharp-lower",
                   exact ? "exact" : "none"};
      } else {
        const auto b = metric::distance_interval(dom, p, q, settings);
        rows[k] = {std::to_string(k), point_text(p), point_text(q), num(b.lower), num(ex), num(b.upper),
                   b.contains(ex, 1e-9) ? "1" : "0", b.lower_tag, b.upper_tag, "exact"};
      }
    });
    metric_used = kind == "geodesic" ? "khat-length" : "interval";
    CsvWriter csv(kind == "geodesic"
                      ? std::vector<std::string>{"pair", "p", "q", "upper", "lower", "exact", "nodes", "upper_tag",
                                                 "lower_tag", "exact_tag"}
                      : std::vector<std::string>{"pair", "p", "q", "lower", "exact", "upper", "contained", "lower_tag",
                                                 "upper_tag", "exact_tag"});
    for (const auto& r : rows) csv.row(r);
    out.csv = csv.str();
  } else if (kind == "converge") {
    const auto limit = domains::domain_from_json(config.at("domain"));
    const auto pairs = pairs_of(config, limit);
    std::vector<domains::DomainOracle> seq;
    for (double n : schedule) {
      if (limit.kind() == domains::FamilyKind::Ball) {
        seq.push_back(domains::make_ball(limit.dim(), *limit.bounding_radius() * (1.0 + 1.0 / n)));
      } else if (limit.kind() == domains::FamilyKind::Polydisc) {
        auto radii = limit.to_json().at("radii").get<std::vector<double>>();
        for (auto& r : radii) r *= 1.0 + 1.0 / n;
        seq.push_back(domains::make_polydisc(radii));
      } else {
        seq.push_back(convergence::perturbed_epigraph(limit, 1.0 / n));
      }
    }
    double diam = 0.0;
    for (const auto& a : pairs)
      for (const auto& b : pairs)
        for (const Point* x : {&a.first, &a.second})
          for (const Point* y : {&b.first, &b.second}) diam = std::max(diam, (*x - *y).norm());
    const double window = opt(s, "window", diam > 0.0 ? 4.0 * diam : 1.0);
    const int resolution = opt(s, "resolution", 0);
    const auto limit_set = convergence::SetSampler::from_domain(limit, window, resolution);

    convergence::ProbeOptions po;
    po.settings = geodesic_settings(s, {});
    const auto rep = convergence::metric_convergence_probe(seq, schedule, limit, pairs, po);
    metric_used = "interval";
    CsvWriter csv({"n", "hausdorff", "hausdorff_error", "pair", "lower", "upper", "khat", "interval_drift",
                   "khat_drift", "skipped", "lower_tag", "upper_tag", "hausdorff_tag"});
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto h = convergence::local_hausdorff(convergence::SetSampler::from_domain(seq[i], window, resolution),
                                                  limit_set, window);
      const auto& row = rep.rows[i];
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const bool skip = row.skipped;
        csv.row({num(schedule[i]), num(h.value), num(h.error), std::to_string(k),
                 num(skip ? kNaN : row.intervals[k].lower), num(skip ? kNaN : row.intervals[k].upper),
                 num(skip ? kNaN : row.khat[k]), num(skip ? kNaN : row.interval_drift),
                 num(skip ? kNaN : row.khat_drift), skip ? "1" : "0", skip ? "" : row.intervals[k].lower_tag,
                 skip ? "" : row.intervals[k].upper_tag, "grid-shell"});
      }
    }
    out.csv = csv.str();
  } else if (kind == "flats") {
    const auto dom = domains::domain_from_json(config.at("domain"));
    const Point x = *parse_point(s.at("x"), dom.dim());
    const Point y = *parse_point(s.at("y"), dom.dim());
    CsvWriter csv({"t", "value", "estimator", "probe"});
    if (s.value("probe", "shadowing") == "shadowing") {
      const auto rep = hyperbolicity::flat_shadowing_probe(dom, x, y, schedule, opt(s, "strict", true),
                                                           geodesic_settings(s, {}));
      for (std::size_t i = 0; i < schedule.size(); ++i)
        csv.row({num(schedule[i]), num(rep.upper[i]), "khat-length", "shadowing"});
      metric_used = "khat-length";
    } else {
      const auto rep = hyperbolicity::boundary_divergence_probe(dom, x, y, schedule);
      for (const auto& r : rep.rows) csv.row({num(r.t), num(r.lower), "lower-bound", "divergence"});
      metric_used = "lower-bound";
    }
    out.csv = csv.str();
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) hash = (hash ^ c) * 0x100000001b3ULL;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  out.manifest = {{"tool", "kobacore"},
                  {"version", version()},
                  {"experiment", kind},
                  {"seed", seed},
                  {"config", config},
                  {"config_hash", hex},
                  {"metric_used", metric_used},
                  {"threads", worker_count()},
                  {"wall_time_s", wall}};
  return out;
}

// ---------------------------------------------------------------------------
// File-level commands

namespace {

std::optional<json> load_json(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot read " << path << "\n";
    return std::nullopt;
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    err << "error: malformed JSON in " << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IncompatibleManifests, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

}  // namespace

int validate_file(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto config = load_json(path, err);
  if (!config) return kValidationError;
  const auto issues = validate_config(*config);
  if (issues.empty()) {
    out << "ok\n";
    return kOk;
  }
  for (const auto& i : issues) err << "error: " << i << "\n";
  return kValidationError;
}

int run_file(const std::string& path, const std::optional<std::string>& out_dir, std::ostream& out,
             std::ostream& err) {
  const auto config = load_json(path, err);
  if (!config) return kValidationError;
  const auto issues = validate_config(*config);
  if (!issues.empty()) {
    for (const auto& i : issues) err << "error: " << i << "\n";
    return kValidationError;
  }
  RunOutput result;
  try {
    result = run_experiment(*config);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidSpec ? kValidationError : kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }

  fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(config->value("output", std::string(".")));
  const std::string stem = fs::path(path).stem().string();
  try {
    fs::create_directories(dir);
    const fs::path csv_path = dir / (stem + ".csv");
    const fs::path manifest_path = dir / (stem + ".manifest.json");
    result.manifest["csv"] = csv_path.filename().string();
    std::ofstream csv(csv_path, std::ios::binary);
    std::ofstream manifest(manifest_path);
    csv << result.csv;
    manifest << result.manifest.dump(2) << "\n";
    if (!csv || !manifest) throw std::runtime_error("write failed in " + dir.string());
    out << csv_path.string() << "\n" << manifest_path.string() << "\n";
  } catch (const std::exception& e) {
    err << "error: cannot write results: " << e.what() << "\n";
    return kValidationError;
  }
  return kOk;
}

Report report(const std::vector<std::string>& manifest_paths) {
  if (manifest_paths.empty()) throw Error(ErrorCode::InvalidArgument, "no manifests given");
  Report rep;
  std::string header, ver;
  std::set<std::uint64_t> seeds;
  for (const auto& path : manifest_paths) {
    json m;
    try {
      m = json::parse(read_text(path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IncompatibleManifests, path + " is not a manifest: " + e.what());
    }
    if (!m.contains("csv") || !m.contains("version") || !m.contains("experiment"))
      throw Error(ErrorCode::IncompatibleManifests, path + " lacks csv/version/experiment");
    const std::string v = m.at("version").get<std::string>();
    if (ver.empty()) ver = v;
    else if (v != ver)
      throw Error(ErrorCode::IncompatibleManifests, "tool versions differ: " + ver + " vs " + v);

    const std::string text = read_text(fs::path(path).parent_path() / m.at("csv").get<std::string>());
    const auto eol = text.find('\n');
    const std::string head = text.substr(0, eol);
    if (header.empty()) {
      header = head;
      rep.merged_csv = text;
    } else if (head != header) {
      throw Error(ErrorCode::IncompatibleManifests, "CSV columns differ between " + manifest_paths.front() + " and " + path);
    } else {
      rep.merged_csv += text.substr(eol + 1);
    }

    SummaryRow row;
    row.source = path;
    row.experiment = m.at("experiment").get<std::string>();
    row.metric_used = m.value("metric_used", "");
    row.seed = m.value("seed", std::uint64_t{0});
    seeds.insert(row.seed);
    const auto cols = split_csv_line(head);
    const auto col = [&](const char* name) -> int {
      for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == name) return static_cast<int>(i);
      return -1;
    };
    const int cs = col("scale"), cd = col("delta"), csub = col("subject");
    std::vector<double> scales, deltas;
    std::istringstream lines(text.substr(eol + 1));
    for (std::string line; std::getline(lines, line);) {
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      if (cs >= 0 && cd >= 0) {
        scales.push_back(std::stod(cells.at(cs)));
        deltas.push_back(std::stod(cells.at(cd)));
      }
      if (csub >= 0) row.subject = cells.at(csub);
    }
    row.scales = static_cast<int>(scales.size());
    if (scales.size() >= 2) {
      const auto v = hyperbolicity::verdict(scales, deltas);
      row.delta_first = deltas.front();
      row.delta_last = deltas.back();
      row.growth_ratio = v.growth_ratio;
      row.exponent = v.exponent;
      row.verdict = hyperbolicity::to_string(v.verdict);
    } else {
      row.delta_first = row.delta_last = scales.empty() ? kNaN : deltas.front();
      row.growth_ratio = row.exponent = kNaN;
      row.verdict = "n/a";
    }
    rep.rows.push_back(std::move(row));
  }
  rep.mixed_seeds = seeds.size() > 1;
  if (rep.mixed_seeds) rep.warnings.push_back("inputs use different seeds");
  return rep;
}

std::string summary_csv(const Report& rep) {
  CsvWriter csv({"source", "experiment", "subject", "metric_used", "seed", "scales", "delta_first", "delta_last",
                 "growth_ratio", "exponent", "verdict", "mixed_seeds"});
  for (const auto& r : rep.rows)
    csv.row({r.source, r.experiment, r.subject, r.metric_used, std::to_string(r.seed), std::to_string(r.scales),
             num(r.delta_first), num(r.delta_last), num(r.growth_ratio), num(r.exponent), r.verdict,
             rep.mixed_seeds ? "1" : "0"});
  return csv.str();
}

int report_files(const std::vector<std::string>& manifest_paths, const std::optional<std::string>& summary_path,
                 const std::optional<std::string>& merged_path, std::ostream& out, std::ostream& err) {
  Report rep;
  try {
    rep = report(manifest_paths);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  const std::string summary = summary_csv(rep);
  out << summary;
  if (summary_path) std::ofstream(*summary_path, std::ios::binary) << summary;
  if (merged_path) std::ofstream(*merged_path, std::ios::binary) << rep.merged_csv;
  return kOk;
}

}  // namespace kobacore::cli
