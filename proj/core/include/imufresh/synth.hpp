#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imufresh/timeseries.hpp"

namespace imufresh {

/// Synthetic gait-like recordings from two synchronized sensors. Each activity
/// has its own cadence, amplitude and posture offset per channel; the right
/// side runs half a cycle behind the left. Segments of random length switch
/// between activities and are written out as label intervals.
struct SynthConfig {
  double duration_s = 560.0;
  double rate_hz = 100.0;
  std::uint64_t seed = 1;
  std::vector<std::string> activities{"walk", "run"};
  /// Per-side channel bases; each is emitted as `{base}{suffix}`.
  std::vector<std::string> channel_bases{"accel_x", "accel_y", "gyro_z"};
  std::string left_suffix = "_l";
  std::string right_suffix = "_r";
  double noise = 0.35;
  /// Relative cadence shift applied to every activity (session drift).
  double drift = 0.0;
  /// Spread of the per-subject cadence and amplitude factors; 0 disables.
  double subject_variation = 0.0;
  double min_segment_s = 12.0;
  double max_segment_s = 40.0;
};

struct SynthData {
  Recording recording;
  std::vector<LabelInterval> labels;
};

SynthData synthesize(const SynthConfig& config);

}  // namespace imufresh
