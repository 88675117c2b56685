#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kobacore {

/// Largest complex dimension a point may have. Points keep their storage
/// inline so hot loops over the defining function never touch the heap.
inline constexpr int kMaxDim = 8;

using Complex = std::complex<double>;
using Point = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using RealVector = Eigen::VectorXd;

enum class ErrorCode {
  InvalidArgument,
  InvalidSpec,
  DimensionMismatch,
  NotInterior,
  ZeroVector,
  NotOnBoundary,
  SingularBoundaryPoint,
  ReachNotFound,
  NonHomogeneousFamily,
  PoleHit,
  InsufficientInteriorSamples,
  NotCConvex,
  NodeOutsideDomain,
  ModelOnly,
  SegmentExitsDomain,
  PointsOutsideWindow,
  DegenerateChord,
  NotInFlat,
  EmptySampleCloud,
  PairExitsDomain,
  IncompatibleManifests,
  NumericalFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using DistanceFn = std::function<double(const Point&, const Point&)>;

Point make_point(std::initializer_list<Complex> coords);

}  // namespace kobacore
