#include "tca/error.hpp"

namespace tca {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankDeficientRegressors: return "RankDeficientRegressors";
    case ErrorCode::ZeroImpact: return "ZeroImpact";
    case ErrorCode::InconsistentNormalization: return "InconsistentNormalization";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::HorizonOutOfRange: return "HorizonOutOfRange";
    case ErrorCode::TermExplosion: return "TermExplosion";
    case ErrorCode::PathExplosion: return "PathExplosion";
    case ErrorCode::MixedEndpoints: return "MixedEndpoints";
    case ErrorCode::TargetTooLarge: return "TargetTooLarge";
    case ErrorCode::UnsupportedCondition: return "UnsupportedCondition";
    case ErrorCode::BootstrapUnstable: return "BootstrapUnstable";
    case ErrorCode::DecompositionViolated: return "DecompositionViolated";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tca
