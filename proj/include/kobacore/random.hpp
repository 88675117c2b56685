#pragma once

#include <cstdint>
#include <random>

#include "kobacore/types.hpp"

namespace kobacore {

/// SplitMix64 finaliser; used to derive independent substreams from
/// (seed, task index) so parallel work stays deterministic.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

/// Thin wrapper over mt19937_64 with portable distributions (the standard
/// library's distributions are implementation-defined, which would break
/// byte-identical reruns across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double normal();
  Complex complex_normal() {
    double re = normal();
    return {re, normal()};
  }

  /// Uniform direction on the unit sphere of C^dim (= S^{2 dim - 1}).
  Point unit_vector(int dim);
  /// Uniform on S^{m-1} in R^m.
  RealVector real_unit_vector(int m);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kobacore
