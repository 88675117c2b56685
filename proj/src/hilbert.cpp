#include "kobacore/hilbert.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "kobacore/random.hpp"

namespace kobacore::hilbert {
namespace {

constexpr double kChordTol = 1e-12;

RealPoint to_vector(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const RealPoint>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json vector_json(const RealPoint& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double cross(const RealPoint& a, const RealPoint& b) { return a(0) * b(1) - a(1) * b(0); }

}  // namespace

double RealConvexBody::exit(const RealPoint& x, const RealPoint& u) const {
  double lo = 0.0;
  double hi = bounding_radius_ + x.norm() + 1.0;
  if (!(value_(x + hi * u) >= 0.0)) throw Error(ErrorCode::DegenerateChord, "chord does not leave " + name_);
  const double tol = kChordTol * std::max(1.0, hi);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (value_(x + mid * u) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<RealPoint, RealPoint> RealConvexBody::chord(const RealPoint& x, const RealPoint& y) const {
  const double L = (y - x).norm();
  if (!(L > 0.0)) throw Error(ErrorCode::DegenerateChord, "chord needs two distinct points");
  const RealPoint u = (y - x) / L;
  return {x - exit(x, -u) * u, x + exit(x, u) * u};
}

RealConvexBody disk(double radius, int dim) {
  if (!(radius > 0.0) || dim < 1) throw Error(ErrorCode::InvalidSpec, "disk needs positive radius and dimension");
  RealConvexBody b;
  b.dim_ = dim;
  b.value_ = [radius](const RealPoint& x) { return x.norm() - radius; };
  b.bounding_radius_ = radius;
  b.center_ = RealPoint::Zero(dim);
  b.name_ = "disk";
  b.json_ = {{"body", "disk"}, {"radius", radius}, {"dim", dim}};
  return b;
}

RealConvexBody polygon(std::vector<RealPoint> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw Error(ErrorCode::InvalidSpec, "polygon needs at least 3 vertices");
  for (const auto& v : vertices)
    if (v.size() != 2) throw Error(ErrorCode::InvalidSpec, "polygon vertices must be planar");

  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += cross(vertices[i], vertices[(i + 1) % n]);
  if (area < 0.0) std::reverse(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < n; ++i) {
    const RealPoint e1 = vertices[(i + 1) % n] - vertices[i];
    const RealPoint e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    if (!(cross(e1, e2) > 1e-14 * e1.norm() * e2.norm()))
      throw Error(ErrorCode::InvalidSpec, "polygon vertices are not in strictly convex position");
  }

  // Outward unit normals and offsets: inside iff n_i . x < c_i for all i.
  Eigen::MatrixXd normals(n, 2);
  RealPoint offsets(n);
  RealPoint centroid = RealPoint::Zero(2);
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const RealPoint e = vertices[(i + 1) % n] - vertices[i];
    const RealPoint nrm = RealPoint{{e(1), -e(0)}} / e.norm();
    normals.row(i) = nrm.transpose();
    offsets(i) = nrm.dot(vertices[i]);
    centroid += vertices[i] / static_cast<double>(n);
    radius = std::max(radius, vertices[i].norm());
  }

  RealConvexBody b;
  b.dim_ = 2;
  b.value_ = [normals, offsets](const RealPoint& x) { return (normals * x - offsets).maxCoeff(); };
  b.bounding_radius_ = radius;
  b.center_ = centroid;
  b.vertices_ = vertices;
  b.name_ = "polygon";
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : vertices) vs.push_back(vector_json(v));
  b.json_ = {{"body", "polygon"}, {"vertices", vs}};
  return b;
}

RealConvexBody square() {
  auto b = polygon({RealPoint{{1.0, -1.0}}, RealPoint{{1.0, 1.0}}, RealPoint{{-1.0, 1.0}}, RealPoint{{-1.0, -1.0}}});
  b.name_ = "square";
  b.json_ = {{"body", "square"}};
  return b;
}

RealConvexBody regular_polygon(int n) {
  if (n < 3) throw Error(ErrorCode::InvalidSpec, "regular polygon needs n >= 3");
  std::vector<RealPoint> vs;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    vs.push_back(RealPoint{{std::cos(a), std::sin(a)}});
  }
  auto b = polygon(std::move(vs));
  b.name_ = std::to_string(n) + "-gon";
  b.json_ = {{"body", "ngon"}, {"n", n}};
  return b;
}

RealConvexBody affine_image(const RealConvexBody& body, const Eigen::MatrixXd& A, const RealPoint& t) {
  const int d = body.dim();
  if (A.rows() != d || A.cols() != d || t.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "affine map does not match body dimension");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorCode::InvalidSpec, "affine map is singular");
  const Eigen::MatrixXd inv = lu.inverse();

  RealConvexBody b;
  b.dim_ = d;
  b.value_ = [inner = body.value_, inv, t](const RealPoint& y) { return inner(inv * (y - t)); };
  b.bounding_radius_ = A.norm() * body.bounding_radius() + t.norm();
  b.center_ = A * body.center() + t;
  for (const auto& v : body.vertices()) b.vertices_.push_back(A * v + t);
  if (A.determinant() < 0.0) std::reverse(b.vertices_.begin(), b.vertices_.end());
  b.name_ = "affine(" + body.name() + ")";
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < d; ++i) rows.push_back(vector_json(A.row(i).transpose()));
  b.json_ = {{"body", "affine"}, {"matrix", rows}, {"offset", vector_json(t)}, {"of", body.to_json()}};
  return b;
}

std::vector<std::string> supported_bodies() { return {"disk", "square", "ngon", "polygon", "affine"}; }

RealConvexBody body_from_json(const nlohmann::json& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); };
  if (!spec.is_object() || !spec.contains("body") || !spec.at("body").is_string()) fail("body spec needs a \"body\" name");
  const std::string kind = spec.at("body").get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, _] : spec.items()) {
      bool ok = k == "body";
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail("unknown field \"" + k + "\" in " + kind + " body");
    }
  };
  try {
    if (kind == "disk") {
      allow({"radius", "dim"});
      return disk(spec.value("radius", 1.0), spec.value("dim", 2));
    }
    if (kind == "square") {
      allow({});
      return square();
    }
    if (kind == "ngon") {
      allow({"n"});
      return regular_polygon(spec.at("n").get<int>());
    }
    if (kind == "polygon") {
      allow({"vertices"});
      std::vector<RealPoint> vs;
      for (const auto& v : spec.at("vertices")) vs.push_back(to_vector(v));
      return polygon(std::move(vs));
    }
    if (kind == "affine") {
      allow({"matrix", "offset", "of"});
      const auto inner = body_from_json(spec.at("of"));
      const auto rows = spec.at("matrix").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd A(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != static_cast<std::size_t>(A.cols())) fail("ragged affine matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = rows[i][j];
      }
      return affine_image(inner, A, to_vector(spec.at("offset")));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed ") + kind + " body: " + e.what());
  }
  std::string names;
  for (const auto& s : supported_bodies()) names += (names.empty() ? "" : ", ") + s;
  fail("unknown body \"" + kind + "\"; supported: " + names);
  return disk();
}

double hilbert_distance(const RealConvexBody& body, const RealPoint& x, const RealPoint& y) {
  if (x.size() != body.dim() || y.size() != body.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension does not match body");
  if (!body.contains(x) || !body.contains(y)) throw Error(ErrorCode::NotInterior, "point not inside " + body.name());
  const double L = (y - x).norm();
  if (L == 0.0) return 0.0;
  const RealPoint u = (y - x) / L;
  const double back = body.exit(x, -u);
  const double fwd = body.exit(x, u);
  if (!(fwd > L) || !(back > 0.0)) throw Error(ErrorCode::DegenerateChord, "chord endpoints collapse onto the points");
  // |a-x| = back, |a-y| = back + L, |b-x| = fwd, |b-y| = fwd - L.
  return 0.5 * (std::log1p(L / back) - std::log1p(-L / fwd));
}

Point to_point(const RealPoint& x) {
  Point p(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) p(i) = x(i);
  return p;
}

RealPoint to_real(const Point& p) { return p.real(); }

hyperbolicity::ScanModel hilbert_model(const RealConvexBody& body, int quadruples, std::uint64_t seed,
                                       bool planted) {
  if (quadruples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one quadruple");
  Rng rng(seed);
  const RealPoint c = body.center();
  std::vector<RealPoint> offsets;
  for (int k = 0; k < 4 * quadruples; ++k) {
    const RealPoint u = rng.real_unit_vector(body.dim());
    offsets.push_back(body.exit(c, u) * u);
  }
  if (planted && body.vertices().size() >= 3) {
    const RealPoint M = 0.5 * (body.vertices()[0] + body.vertices()[1]) - c;
    // -M must stay in the closed body, which fails for lopsided polygons.
    if (body.value(c - M) <= 1e-12 * body.bounding_radius()) {
      offsets[0] = body.vertices()[0] - c;
      offsets[1] = body.vertices()[1] - c;
      offsets[2] = -M;
      offsets[3] = M;
    }
  }

  hyperbolicity::ScanModel m;
  m.metric_used = "hilbert";
  m.distance = [body](const Point& a, const Point& b) { return hilbert_distance(body, to_real(a), to_real(b)); };
  m.sample = [c, offsets, quadruples](double scale) {
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    const double r = std::tanh(scale);
    hyperbolicity::ScaleSample s;
    for (const auto& o : offsets) s.points.push_back(to_point(c + r * o));
    for (int k = 0; k < quadruples; ++k) s.quadruples.push_back({4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3});
    return s;
  };
  return m;
}

hyperbolicity::FourPointReport hilbert_four_point_scan(const RealConvexBody& body, int quadruples,
                                                       const std::vector<double>& scale_schedule,
                                                       std::uint64_t seed, bool planted) {
  return hyperbolicity::four_point_scan(hilbert_model(body, quadruples, seed, planted), scale_schedule, seed);
}

}  // namespace kobacore::hilbert
