#include "kobacore/random.hpp"

#include <cmath>
#include <numbers>

namespace kobacore {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

Point Rng::unit_vector(int dim) {
  Point v(dim);
  double n = 0.0;
  while (n < 1e-12) {
    for (int i = 0; i < dim; ++i) v(i) = complex_normal();
    n = v.norm();
  }
  return v / n;
}

RealVector Rng::real_unit_vector(int m) {
  RealVector v(m);
  double n = 0.0;
  while (n < 1e-12) {
    for (int i = 0; i < m; ++i) v(i) = normal();
    n = v.norm();
  }
  return v / n;
}

}  // namespace kobacore
