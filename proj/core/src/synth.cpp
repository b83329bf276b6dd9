#include "imufresh/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "imufresh/error.hpp"
#include "imufresh/rng.hpp"

namespace imufresh {

SynthData synthesize(const SynthConfig& config) {
  if (!(config.duration_s > 0.0) || !(config.rate_hz > 0.0)) {
    throw Error(ErrorCode::BadParameters, "duration and rate must be positive");
  }
  if (config.activities.empty() || config.channel_bases.empty()) {
    throw Error(ErrorCode::BadParameters, "need at least one activity and one channel");
  }
  if (!(config.min_segment_s > 0.0) || config.max_segment_s < config.min_segment_s) {
    throw Error(ErrorCode::BadParameters, "segment bounds must satisfy 0 < min <= max");
  }

  SplitMix64 rng(config.seed);
  const auto n = static_cast<std::size_t>(std::llround(config.duration_s * config.rate_hz));
  const double two_pi = 2.0 * std::numbers::pi;

  // Subject-level factors.
  const double subject_cadence = 1.0 + config.subject_variation * rng.normal();
  const double subject_amplitude = 1.0 + config.subject_variation * rng.normal();

  // Segment plan: activity per interval, no immediate repeats when possible.
  std::vector<LabelInterval> labels;
  std::vector<std::size_t> activity_of_segment;
  double t = 0.0;
  std::size_t previous = config.activities.size();
  while (t < config.duration_s) {
    const double length = config.min_segment_s + (config.max_segment_s - config.min_segment_s) * rng.uniform();
    std::size_t activity = rng.below(config.activities.size());
    if (config.activities.size() > 1 && activity == previous) {
      activity = (activity + 1 + rng.below(config.activities.size() - 1)) % config.activities.size();
    }
    const double end = std::min(config.duration_s, t + length);
    labels.push_back({t, end, config.activities[activity]});
    activity_of_segment.push_back(activity);
    previous = activity;
    t = end;
  }

  Channels channels;
  const std::size_t n_bases = config.channel_bases.size();
  std::vector<std::vector<double>*> outputs;  // [side * n_bases + c]
  for (std::size_t side = 0; side < 2; ++side) {
    const std::string& suffix = side == 0 ? config.left_suffix : config.right_suffix;
    for (std::size_t c = 0; c < n_bases; ++c) {
      auto [it, inserted] = channels.emplace(ChannelKind(config.channel_bases[c] + suffix), std::vector<double>(n));
      if (!inserted) throw Error(ErrorCode::DuplicateKind, "duplicate synthetic channel " + it->first.str());
      outputs.push_back(&it->second);
    }
  }

  std::size_t segment = 0;
  double phase = two_pi * rng.uniform();
  for (std::size_t i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) / config.rate_hz;
    while (segment + 1 < labels.size() && time >= labels[segment].end_s) ++segment;
    const auto a = static_cast<double>(activity_of_segment[segment]);
    const double cadence = (0.9 + 0.6 * a) * (1.0 + config.drift) * subject_cadence;
    phase += two_pi * cadence / config.rate_hz;

    for (std::size_t side = 0; side < 2; ++side) {
      const double side_phase = phase + (side == 0 ? 0.0 : std::numbers::pi);
      for (std::size_t c = 0; c < n_bases; ++c) {
        const auto cd = static_cast<double>(c);
        const double amplitude = (1.0 + 0.6 * a) * (1.0 + 0.15 * cd) * subject_amplitude;
        const double offset = 0.5 * std::sin(1.3 * a + cd);
        const double harmonic = (0.25 + 0.1 * a) * std::sin(2.0 * side_phase + cd);
        const double value = offset + amplitude * (std::sin(side_phase + 0.4 * cd) + harmonic) +
                             config.noise * rng.normal();
        (*outputs[side * n_bases + c])[i] = value;
      }
    }
  }

  return SynthData{Recording(config.rate_hz, 0.0, std::move(channels)), std::move(labels)};
}

}  // namespace imufresh
