#include "imufresh/error.hpp"

namespace imufresh {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InconsistentChannels: return "InconsistentChannels";
    case ErrorCode::NonUniformSampling: return "NonUniformSampling";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::InvalidKindName: return "InvalidKindName";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::OverlappingLabels: return "OverlappingLabels";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::DuplicateKind: return "DuplicateKind";
    case ErrorCode::NoPairsFound: return "NoPairsFound";
    case ErrorCode::MalformedFeatureName: return "MalformedFeatureName";
    case ErrorCode::UnknownCalculator: return "UnknownCalculator";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::NaNInFeatures: return "NaNInFeatures";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::NothingSelected: return "NothingSelected";
    case ErrorCode::FeatureSetMismatch: return "FeatureSetMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace imufresh
