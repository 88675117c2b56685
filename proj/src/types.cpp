#include "kobacore/types.hpp"

namespace kobacore {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::SingularBoundaryPoint: return "SingularBoundaryPoint";
    case ErrorCode::ReachNotFound: return "ReachNotFound";
    case ErrorCode::NonHomogeneousFamily: return "NonHomogeneousFamily";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::InsufficientInteriorSamples: return "InsufficientInteriorSamples";
    case ErrorCode::NotCConvex: return "NotCConvex";
    case ErrorCode::NodeOutsideDomain: return "NodeOutsideDomain";
    case ErrorCode::ModelOnly: return "ModelOnly";
    case ErrorCode::SegmentExitsDomain: return "SegmentExitsDomain";
    case ErrorCode::PointsOutsideWindow: return "PointsOutsideWindow";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::NotInFlat: return "NotInFlat";
    case ErrorCode::EmptySampleCloud: return "EmptySampleCloud";
    case ErrorCode::PairExitsDomain: return "PairExitsDomain";
    case ErrorCode::IncompatibleManifests: return "IncompatibleManifests";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

Point make_point(std::initializer_list<Complex> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (const auto& c : coords) p(i++) = c;
  return p;
}

}  // namespace kobacore
