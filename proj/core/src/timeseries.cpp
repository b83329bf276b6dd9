#include "imufresh/timeseries.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "imufresh/error.hpp"
#include "imufresh/text.hpp"

namespace imufresh {

namespace {

constexpr double kUniformTolerance = 1e-6;

std::string read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool nearly_le(double a, double b) {
  return a <= b + 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

// ---------------------------------------------------------------------------
// ChannelKind

bool ChannelKind::is_valid(std::string_view name) noexcept {
  if (name.empty() || name.front() == '_' || name.back() == '_') return false;
  char prev = '\0';
  for (const char c : name) {
    const bool alnum = std::isalnum(static_cast<unsigned char>(c)) != 0;
    if (!alnum && c != '_') return false;
    if (c == '_' && prev == '_') return false;
    prev = c;
  }
  return true;
}

ChannelKind::ChannelKind(std::string name) : name_(std::move(name)) {
  if (!is_valid(name_)) {
    throw Error(ErrorCode::InvalidKindName, "'" + name_ + "' is not a valid channel kind");
  }
}

// ---------------------------------------------------------------------------
// Recording

Recording::Recording(double sample_rate_hz, double t0, Channels channels)
    : sample_rate_hz_(sample_rate_hz), t0_(t0), channels_(std::move(channels)) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw Error(ErrorCode::InvalidValue, "sample rate must be positive and finite");
  }
  if (!std::isfinite(t0_)) throw Error(ErrorCode::InvalidValue, "t0 must be finite");
  if (channels_.empty()) throw Error(ErrorCode::InconsistentChannels, "recording has no channels");
  length_ = channels_.begin()->second.size();
  for (const auto& [kind, values] : channels_) {
    if (values.size() != length_) {
      throw Error(ErrorCode::InconsistentChannels,
                  "channel '" + kind.str() + "' has " + std::to_string(values.size()) +
                      " samples, expected " + std::to_string(length_));
    }
    for (const double v : values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidValue, "non-finite value in channel '" + kind.str() + "'");
      }
    }
  }
  if (length_ == 0) throw Error(ErrorCode::InconsistentChannels, "channels are empty");
}

std::set<ChannelKind> Recording::kinds() const {
  std::set<ChannelKind> out;
  for (const auto& [kind, values] : channels_) out.insert(kind);
  return out;
}

std::span<const double> Recording::channel(const ChannelKind& kind) const {
  const auto it = channels_.find(kind);
  if (it == channels_.end()) throw Error(ErrorCode::UnknownKind, "no channel '" + kind.str() + "'");
  return it->second;
}

std::vector<Window> WindowSet::all_windows() const {
  std::vector<Window> out = windows;
  out.insert(out.end(), unlabeled.begin(), unlabeled.end());
  std::sort(out.begin(), out.end(),
            [](const Window& a, const Window& b) { return a.start_index < b.start_index; });
  return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

Recording load_recording_csv(std::istream& in) {
  const std::string contents = read_stream(in);
  const auto lines = split_lines(contents);
  if (lines.empty() || lines.front() != "time,kind,value") {
    throw Error(ErrorCode::MalformedCsv, "recording header must be exactly 'time,kind,value'");
  }

  struct Series {
    std::vector<double> times;
    std::vector<double> values;
  };
  std::map<std::string, Series, std::less<>> by_kind;

  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto line = lines[row];
    if (line.empty() && row + 1 == lines.size()) break;
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(row + 1) + ": expected 3 fields");
    }
    const auto time = parse_double(fields[0]);
    const auto value = parse_double(fields[2]);
    if (!time || !value) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(row + 1) + ": unparseable number");
    }
    if (!std::isfinite(*value) || !std::isfinite(*time)) {
      throw Error(ErrorCode::InvalidValue, "line " + std::to_string(row + 1) + ": NaN or Inf");
    }
    if (!ChannelKind::is_valid(fields[1])) {
      throw Error(ErrorCode::InvalidKindName, "'" + std::string(fields[1]) + "' is not a valid kind");
    }
    auto& series = by_kind[std::string(fields[1])];
    series.times.push_back(*time);
    series.values.push_back(*value);
  }
  if (by_kind.empty()) throw Error(ErrorCode::MalformedCsv, "recording has no rows");

  const auto& reference = by_kind.begin()->second.times;
  for (const auto& [kind, series] : by_kind) {
    if (series.times.size() != reference.size()) {
      throw Error(ErrorCode::InconsistentChannels,
                  "kind '" + kind + "' has " + std::to_string(series.times.size()) + " rows, expected " +
                      std::to_string(reference.size()));
    }
  }
  if (reference.size() < 2) {
    throw Error(ErrorCode::NonUniformSampling, "at least two samples per kind are needed to infer the rate");
  }

  std::vector<double> steps(reference.size() - 1);
  for (std::size_t i = 0; i + 1 < reference.size(); ++i) steps[i] = reference[i + 1] - reference[i];
  std::vector<double> sorted_steps = steps;
  std::nth_element(sorted_steps.begin(), sorted_steps.begin() + sorted_steps.size() / 2, sorted_steps.end());
  double median = sorted_steps[sorted_steps.size() / 2];
  if (sorted_steps.size() % 2 == 0) {
    const double lower = *std::max_element(sorted_steps.begin(), sorted_steps.begin() + sorted_steps.size() / 2);
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw Error(ErrorCode::NonUniformSampling, "time must increase");
  for (const double step : steps) {
    if (std::abs(step - median) > kUniformTolerance * median) {
      throw Error(ErrorCode::NonUniformSampling, "time step deviates from the median step");
    }
  }
  for (const auto& [kind, series] : by_kind) {
    for (std::size_t i = 0; i < reference.size(); ++i) {
      if (std::abs(series.times[i] - reference[i]) > kUniformTolerance * median) {
        throw Error(ErrorCode::InconsistentChannels, "kind '" + kind + "' is on a different time grid");
      }
    }
  }

  double rate = 1.0 / median;
  // Snap rates such as 499.99999999999994 back to the integer the grid encodes.
  const double rounded = std::round(rate);
  if (rounded > 0.0 && std::abs(rate - rounded) <= kUniformTolerance * rate) rate = rounded;

  Channels channels;
  for (auto& [kind, series] : by_kind) channels.emplace(ChannelKind(kind), std::move(series.values));
  return Recording(rate, reference.front(), std::move(channels));
}

Recording load_recording_csv_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_recording_csv(in);
}

void write_recording_csv(const Recording& recording, std::ostream& out) {
  out << "time,kind,value\n";
  for (const auto& [kind, values] : recording.channels()) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << format_double(recording.time_at(i)) << ',' << kind.str() << ',' << format_double(values[i])
          << '\n';
    }
  }
}

std::vector<LabelInterval> load_labels_csv(std::istream& in) {
  const std::string contents = read_stream(in);
  const auto lines = split_lines(contents);
  if (lines.empty() || lines.front() != "start_s,end_s,label") {
    throw Error(ErrorCode::MalformedCsv, "labels header must be exactly 'start_s,end_s,label'");
  }
  std::vector<LabelInterval> out;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty() && row + 1 == lines.size()) break;
    const auto fields = split(lines[row], ',');
    if (fields.size() != 3) {
      throw Error(ErrorCode::MalformedCsv, "labels line " + std::to_string(row + 1) + ": expected 3 fields");
    }
    const auto start = parse_double(fields[0]);
    const auto end = parse_double(fields[1]);
    if (!start || !end || fields[2].empty()) {
      throw Error(ErrorCode::MalformedCsv, "labels line " + std::to_string(row + 1) + ": bad field");
    }
    out.push_back({*start, *end, std::string(fields[2])});
  }
  return out;
}

std::vector<LabelInterval> load_labels_csv_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_labels_csv(in);
}

void write_labels_csv(std::span<const LabelInterval> labels, std::ostream& out) {
  out << "start_s,end_s,label\n";
  for (const auto& interval : labels) {
    out << format_double(interval.start_s) << ',' << format_double(interval.end_s) << ',' << interval.label
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Segmentation

WindowSet segment_fixed(const Recording& recording, double window_seconds,
                        std::span<const LabelInterval> labels) {
  if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) {
    throw Error(ErrorCode::WindowTooShort, "window length must be positive");
  }
  const double exact = window_seconds * recording.sample_rate_hz();
  const auto width = static_cast<std::size_t>(std::llround(exact));
  if (width < 2) throw Error(ErrorCode::WindowTooShort, "window spans fewer than 2 samples");

  std::vector<LabelInterval> intervals(labels.begin(), labels.end());
  for (const auto& interval : intervals) {
    if (!std::isfinite(interval.start_s) || !std::isfinite(interval.end_s) ||
        !(interval.start_s < interval.end_s)) {
      throw Error(ErrorCode::InvalidValue, "label interval must satisfy start_s < end_s");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const LabelInterval& a, const LabelInterval& b) { return a.start_s < b.start_s; });
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (!nearly_le(intervals[i - 1].end_s, intervals[i].start_s)) {
      throw Error(ErrorCode::OverlappingLabels, "label intervals overlap at t=" +
                                                    format_double(intervals[i].start_s));
    }
  }

  WindowSet set;
  set.sample_rate_hz = recording.sample_rate_hz();
  set.t0 = recording.t0();
  set.recording_length = recording.length();
  set.window_length = width;

  const std::size_t count = recording.length() / width;
  for (std::size_t w = 0; w < count; ++w) {
    Window window{static_cast<std::int64_t>(w), w * width, width, std::nullopt};
    if (intervals.empty()) {
      set.windows.push_back(std::move(window));
      continue;
    }
    const double begin = recording.time_at(window.start_index);
    const double end = recording.time_at(window.start_index + width);
    for (const auto& interval : intervals) {
      if (nearly_le(interval.start_s, begin) && nearly_le(end, interval.end_s)) {
        window.label = interval.label;
        break;
      }
    }
    if (window.label) {
      set.label_domain.insert(*window.label);
      set.windows.push_back(std::move(window));
    } else {
      set.unlabeled.push_back(std::move(window));
    }
  }
  return set;
}

std::span<const double> slice_window(const Recording& recording, const Window& window,
                                     const ChannelKind& kind) {
  const auto channel = recording.channel(kind);
  if (window.start_index > channel.size() || window.length > channel.size() - window.start_index) {
    throw Error(ErrorCode::WindowOutOfRange, "window [" + std::to_string(window.start_index) + ", +" +
                                                 std::to_string(window.length) + ") exceeds length " +
                                                 std::to_string(channel.size()));
  }
  return channel.subspan(window.start_index, window.length);
}

}  // namespace imufresh
