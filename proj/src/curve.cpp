#include "kobacore/curve.hpp"

namespace kobacore {

PolyCurve PolyCurve::reversed() const {
  PolyCurve out;
  out.nodes.assign(nodes.rbegin(), nodes.rend());
  out.times.reserve(times.size());
  const double t0 = times.front();
  const double t1 = times.back();
  for (auto it = times.rbegin(); it != times.rend(); ++it) out.times.push_back(t0 + (t1 - *it));
  return out;
}

void PolyCurve::validate() const {
  if (nodes.size() < 2) throw Error(ErrorCode::InvalidArgument, "a curve needs at least two nodes");
  if (times.size() != nodes.size()) throw Error(ErrorCode::InvalidArgument, "one time per node required");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw Error(ErrorCode::InvalidArgument, "times must be strictly increasing");
  }
  for (const auto& p : nodes) {
    if (p.size() != nodes.front().size()) throw Error(ErrorCode::DimensionMismatch, "nodes differ in dimension");
  }
}

PolyCurve make_curve(std::vector<Point> nodes) {
  std::vector<double> times(nodes.size());
  const double n = static_cast<double>(nodes.size()) - 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) / n;
  return make_curve(std::move(nodes), std::move(times));
}

PolyCurve make_curve(std::vector<Point> nodes, std::vector<double> times) {
  PolyCurve c{std::move(nodes), std::move(times)};
  c.validate();
  return c;
}

nlohmann::json curve_to_json(const PolyCurve& curve) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& p : curve.nodes) {
    nlohmann::json coords = nlohmann::json::array();
    for (Eigen::Index j = 0; j < p.size(); ++j) coords.push_back({p(j).real(), p(j).imag()});
    nodes.push_back(std::move(coords));
  }
  return {{"times", curve.times}, {"nodes", std::move(nodes)}};
}

PolyCurve curve_from_json(const nlohmann::json& j) {
  try {
    std::vector<Point> nodes;
    for (const auto& node : j.at("nodes")) {
      Point p(static_cast<Eigen::Index>(node.size()));
      for (std::size_t k = 0; k < node.size(); ++k) p(k) = {node[k].at(0).get<double>(), node[k].at(1).get<double>()};
      nodes.push_back(p);
    }
    if (j.contains("times")) return make_curve(std::move(nodes), j.at("times").get<std::vector<double>>());
    return make_curve(std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed curve: ") + e.what());
  }
}

}  // namespace kobacore
