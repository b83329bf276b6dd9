#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imufresh {

/// Identity of one channel, physical (`gyro_z_l`) or virtual (`accel_y_diff`).
/// Names are alphanumerics joined by single underscores: the double
/// underscore is reserved as the feature-name separator.
class ChannelKind {
 public:
  /// Throws Error(InvalidKindName).
  explicit ChannelKind(std::string name);

  static bool is_valid(std::string_view name) noexcept;

  [[nodiscard]] const std::string& str() const noexcept { return name_; }

  friend auto operator<=>(const ChannelKind&, const ChannelKind&) = default;

 private:
  std::string name_;
};

using Channels = std::map<ChannelKind, std::vector<double>>;

/// Synchronized, uniformly sampled multi-channel signal. Immutable once built.
class Recording {
 public:
  /// Validates equal channel lengths (>= 1), a positive rate and finite values.
  Recording(double sample_rate_hz, double t0, Channels channels);

  [[nodiscard]] double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  [[nodiscard]] double t0() const noexcept { return t0_; }
  [[nodiscard]] std::size_t length() const noexcept { return length_; }
  [[nodiscard]] const Channels& channels() const noexcept { return channels_; }
  [[nodiscard]] bool has_kind(const ChannelKind& kind) const { return channels_.contains(kind); }
  [[nodiscard]] std::set<ChannelKind> kinds() const;

  /// Throws Error(UnknownKind).
  [[nodiscard]] std::span<const double> channel(const ChannelKind& kind) const;

  /// Time stamp of sample `index`.
  [[nodiscard]] double time_at(std::size_t index) const noexcept {
    return t0_ + static_cast<double>(index) / sample_rate_hz_;
  }

  friend bool operator==(const Recording&, const Recording&) = default;

 private:
  double sample_rate_hz_;
  double t0_;
  std::size_t length_ = 0;
  Channels channels_;
};

struct Window {
  std::int64_t window_id = 0;
  std::size_t start_index = 0;
  std::size_t length = 0;
  std::optional<std::string> label;

  friend bool operator==(const Window&, const Window&) = default;
};

struct LabelInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;
};

/// Fixed-length, disjoint segments of one recording. `windows` holds the
/// samples used for training; windows that straddle a label boundary or cover
/// unlabeled time land in `unlabeled` and are only used for prediction.
struct WindowSet {
  double sample_rate_hz = 0.0;
  double t0 = 0.0;
  std::size_t recording_length = 0;
  std::size_t window_length = 0;
  std::vector<Window> windows;
  std::vector<Window> unlabeled;
  std::set<std::string> label_domain;

  /// Labeled and unlabeled windows merged in start order.
  [[nodiscard]] std::vector<Window> all_windows() const;

  friend bool operator==(const WindowSet&, const WindowSet&) = default;
};

/// Reads long-format `time,kind,value` CSV.
/// Throws Error(InconsistentChannels | NonUniformSampling | InvalidValue |
/// InvalidKindName | MalformedCsv).
Recording load_recording_csv(std::istream& in);
Recording load_recording_csv_file(const std::string& path);

/// Writes long-format CSV sorted by (kind, time); values use the shortest
/// round-trip decimal rendering so re-ingestion is exact.
void write_recording_csv(const Recording& recording, std::ostream& out);

/// Reads `start_s,end_s,label` CSV.
std::vector<LabelInterval> load_labels_csv(std::istream& in);
std::vector<LabelInterval> load_labels_csv_file(const std::string& path);
void write_labels_csv(std::span<const LabelInterval> labels, std::ostream& out);

/// Tiles the recording into consecutive windows of round(window_seconds * rate)
/// samples starting at index 0. With an empty label list every window is kept
/// in `windows` without a label.
/// Throws Error(WindowTooShort | OverlappingLabels | InvalidValue).
WindowSet segment_fixed(const Recording& recording, double window_seconds,
                        std::span<const LabelInterval> labels);

/// Throws Error(UnknownKind | WindowOutOfRange).
std::span<const double> slice_window(const Recording& recording, const Window& window,
                                     const ChannelKind& kind);

}  // namespace imufresh
