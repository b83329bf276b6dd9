#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imufresh/timeseries.hpp"

namespace imufresh {

enum class VirtualOp { abs_diff, diff, derivative };

std::string_view to_string(VirtualOp op) noexcept;

/// A derived channel. abs_diff and diff take two distinct inputs, derivative
/// takes one.
struct VirtualSensorSpec {
  VirtualOp op = VirtualOp::abs_diff;
  std::vector<ChannelKind> inputs;
  ChannelKind output;

  /// Single-line form used in config files and manifests:
  /// `abs_diff <kindA> <kindB> <out>` or `derivative <kind> <out>`.
  [[nodiscard]] std::string to_line() const;
  /// Throws Error(ConfigError | InvalidKindName).
  static VirtualSensorSpec parse(std::string_view line);

  friend bool operator==(const VirtualSensorSpec&, const VirtualSensorSpec&) = default;
};

/// Returns a new recording with every original channel plus one output per
/// spec, evaluated in order so later specs may consume earlier outputs.
/// Throws Error(UnknownKind | DuplicateKind | BadParameters).
Recording apply_virtual_sensors(const Recording& recording, std::span<const VirtualSensorSpec> specs);

/// One abs_diff spec per `accel_`/`gyro_` base present with both suffixes,
/// named `{base}_diff` (`accel_x_l` + `accel_x_r` -> `accel_x_diff`), ordered by base.
/// Throws Error(NoPairsFound).
std::vector<VirtualSensorSpec> default_pairing(const Recording& recording, std::string_view left_suffix,
                                               std::string_view right_suffix);

}  // namespace imufresh
