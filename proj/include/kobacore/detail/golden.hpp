#pragma once

#include <cmath>

namespace kobacore::detail {

struct GoldenResult {
  double x;
  double f;
};

/// Golden-section minimisation of f on [a, b] seeded with an already known
/// value (x0, f0); the returned value never exceeds f0. On ties the earlier
/// candidate is kept so runs are deterministic.
template <class F>
GoldenResult golden_section_min(F&& f, double a, double b, int iterations, double x0, double f0) {
  constexpr double kInvPhi = 0.6180339887498949;
  GoldenResult best{x0, f0};
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  if (fc < best.f) best = {c, fc};
  if (fd < best.f) best = {d, fd};
  for (int i = 0; i < iterations; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc < best.f) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd < best.f) best = {d, fd};
    }
  }
  return best;
}

}  // namespace kobacore::detail
