#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imufresh/error.hpp"
#include "imufresh/forest.hpp"
#include "imufresh/fresh.hpp"
#include "imufresh/virtual_sensors.hpp"

namespace imufresh {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Flat `key=value` text with stable key order. Used for the config file and
/// the run manifest.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::string& path);

  void set(const std::string& key, std::string value);
  /// Appends without replacing, for repeatable keys such as `virtual_sensor`.
  void append(const std::string& key, std::string value);
  [[nodiscard]] std::optional<std::string> get(std::string_view key) const;
  [[nodiscard]] std::vector<std::string> get_all(std::string_view key) const;
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct PipelineConfig {
  std::string recording_path;
  std::string labels_path;
  double window_seconds = 4.0;
  /// Explicit specs; used when `auto_pair` is unset.
  std::vector<VirtualSensorSpec> virtual_sensors;
  /// Left/right suffixes for default_pairing.
  std::optional<std::pair<std::string, std::string>> auto_pair;
  /// Extraction settings file; empty means the default grid on every kind.
  std::string settings_path;
  double q = 0.05;
  FdrMethod fdr = FdrMethod::benjamini_yekutieli;
  ForestParams forest;
  std::size_t repeats = 100;
  std::size_t top_k = 20;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 42;
  std::size_t workers = 0;
  std::string output_dir = "imufresh_out";

  /// Reads a key=value config (see README for the keys). Relative paths are
  /// resolved against the config file's directory. Throws Error(ConfigError).
  static PipelineConfig from_file(const std::string& path);
  static PipelineConfig from_text(std::string_view text, const std::string& base_dir = "");
  /// Throws Error(ConfigError).
  void validate() const;
};

struct PipelineResult {
  KeyValueFile manifest;
  std::vector<std::string> top_features;
  double cv_mean_accuracy = 0.0;
  std::vector<std::string> warnings;
};

/// Runs the five workflow steps, persisting artifacts into config.output_dir:
///   recording.csv, windows.csv            (1) time-series engineering
///   features_full.csv                     (2) full extraction
///   selection.csv                         (3) FDR selection
///   importances.csv, settings.txt         (4) importance ranking, top-k subset
///   model.txt                             (5) specialized forest
///   manifest.txt                          rewritten after every step
/// Throws Error(NothingSelected) when step 3 keeps no feature.
PipelineResult run_full_pipeline(const PipelineConfig& config);

struct TimelineRow {
  std::int64_t window_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<double> probabilities;
  std::string predicted;
  std::optional<std::string> true_label;
};

struct PredictionTimeline {
  std::vector<std::string> classes;
  std::vector<TimelineRow> rows;

  /// Fraction of labeled rows predicted correctly; nullopt without labels.
  [[nodiscard]] std::optional<double> accuracy() const;
};

struct PredictRequest {
  std::string model_path;
  std::string settings_path;
  std::string recording_path;
  double window_seconds = 4.0;
  /// Defaults to manifest.txt next to the model.
  std::string manifest_path;
  /// Optional labels for misclassification flags.
  std::string labels_path;
  std::size_t workers = 0;
};

/// Deployment path: ingest, replay the manifest's virtual sensors, segment,
/// extract only the model's features and predict every window.
/// Throws Error(FeatureSetMismatch) when settings and model disagree.
PredictionTimeline predict(const PredictRequest& request);
PredictionTimeline predict(const ForestModel& model, const ExtractionSettings& settings, const Recording& recording,
                           std::span<const VirtualSensorSpec> virtual_sensors, double window_seconds,
                           std::span<const LabelInterval> labels = {}, std::size_t workers = 0);

/// `window_id,start_s,end_s,p_<class>...,predicted,true_label,misclassified`
void write_timeline_csv(const PredictionTimeline& timeline, std::ostream& out);

/// Virtual sensor specs stored in a manifest.
std::vector<VirtualSensorSpec> manifest_virtual_sensors(const KeyValueFile& manifest);

struct BenchmarkReport {
  std::vector<std::pair<std::string, double>> step_seconds;
  std::size_t rows = 0;
  std::size_t features = 0;
  std::size_t workers = 1;
  double rows_per_s_single = 0.0;
  double rows_per_s_parallel = 0.0;

  [[nodiscard]] std::string str() const;
};

/// Times ingestion, virtual sensors, segmentation and extraction (with
/// config.settings_path, or the full grid) at 1 and `config.workers` threads.
/// With a model, restricted extraction plus prediction is timed too.
BenchmarkReport benchmark(const PipelineConfig& config, const std::string& model_path = "");

/// Process exit code for an error: 2 config, 3 data, 4 nothing selected.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace imufresh
