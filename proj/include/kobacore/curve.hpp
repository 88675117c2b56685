#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "kobacore/types.hpp"

namespace kobacore {

/// Timestamped polyline. At least two nodes, strictly increasing times.
struct PolyCurve {
  std::vector<Point> nodes;
  std::vector<double> times;

  std::size_t size() const { return nodes.size(); }
  const Point& front() const { return nodes.front(); }
  const Point& back() const { return nodes.back(); }

  /// Same point set traversed backwards; times are mirrored so they stay increasing.
  PolyCurve reversed() const;
  /// Throws InvalidArgument when the representation invariants fail.
  void validate() const;
};

/// Nodes with uniform times on [0, 1].
PolyCurve make_curve(std::vector<Point> nodes);
PolyCurve make_curve(std::vector<Point> nodes, std::vector<double> times);

/// [[[re, im], ...], ...], one inner array per node.
nlohmann::json curve_to_json(const PolyCurve& curve);
PolyCurve curve_from_json(const nlohmann::json& j);

}  // namespace kobacore
