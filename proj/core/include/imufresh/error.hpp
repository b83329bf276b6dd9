#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace imufresh {

/// Every failure the library reports maps to exactly one of these codes.
enum class ErrorCode {
  // ingestion / data model
  InconsistentChannels,
  NonUniformSampling,
  InvalidValue,
  InvalidKindName,
  MalformedCsv,
  WindowTooShort,
  OverlappingLabels,
  UnknownKind,
  WindowOutOfRange,
  // virtual sensors
  DuplicateKind,
  NoPairsFound,
  // calculators
  MalformedFeatureName,
  UnknownCalculator,
  BadParameters,
  // selection
  DegenerateFeature,
  DegenerateTable,
  DegenerateSplit,
  DegenerateTarget,
  // forest
  NaNInFeatures,
  ShapeMismatch,
  MalformedModel,
  // pipeline
  NothingSelected,
  FeatureSetMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace imufresh
