#include "imufresh/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "imufresh/parallel.hpp"
#include "imufresh/text.hpp"

namespace imufresh {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// KeyValueFile

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": empty key");
    file.entries_.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::string& path) { return parse(read_file(path)); }

void KeyValueFile::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

void KeyValueFile::append(const std::string& key, std::string value) { entries_.emplace_back(key, std::move(value)); }

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out = v;
  }
  return out;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::string KeyValueFile::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

void KeyValueFile::save(const std::string& path) const { write_file(path, str()); }

// ---------------------------------------------------------------------------
// PipelineConfig

namespace {

double config_real(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v) throw Error(ErrorCode::ConfigError, key + ": '" + value + "' is not a number");
  return *v;
}

std::size_t config_count(const std::string& key, const std::string& value) {
  const auto v = parse_int(value);
  if (!v || *v < 0) throw Error(ErrorCode::ConfigError, key + ": '" + value + "' is not a non-negative integer");
  return static_cast<std::size_t>(*v);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).string();
}

}  // namespace

PipelineConfig PipelineConfig::from_text(std::string_view text, const std::string& base_dir) {
  PipelineConfig config;
  const KeyValueFile file = KeyValueFile::parse(text);
  for (const auto& [key, value] : file.entries()) {
    if (key == "recording") {
      config.recording_path = resolve(base_dir, value);
    } else if (key == "labels") {
      config.labels_path = resolve(base_dir, value);
    } else if (key == "window_seconds") {
      config.window_seconds = config_real(key, value);
    } else if (key == "virtual_sensor") {
      config.virtual_sensors.push_back(VirtualSensorSpec::parse(value));
    } else if (key == "auto_pair") {
      std::istringstream in(value);
      std::string left, right, extra;
      if (!(in >> left >> right) || (in >> extra)) {
        throw Error(ErrorCode::ConfigError, "auto_pair expects two suffixes, e.g. 'auto_pair = _l _r'");
      }
      config.auto_pair = std::make_pair(left, right);
    } else if (key == "settings") {
      config.settings_path = resolve(base_dir, value);
    } else if (key == "q") {
      config.q = config_real(key, value);
    } else if (key == "fdr") {
      if (value == "by") {
        config.fdr = FdrMethod::benjamini_yekutieli;
      } else if (value == "bh") {
        config.fdr = FdrMethod::benjamini_hochberg;
      } else {
        throw Error(ErrorCode::ConfigError, "fdr must be 'by' or 'bh'");
      }
    } else if (key == "n_trees") {
      config.forest.n_trees = config_count(key, value);
    } else if (key == "mtry") {
      config.forest.mtry = config_count(key, value);
    } else if (key == "min_leaf") {
      config.forest.min_leaf = config_count(key, value);
    } else if (key == "max_depth") {
      config.forest.max_depth = config_count(key, value);
    } else if (key == "repeats") {
      config.repeats = config_count(key, value);
    } else if (key == "top_k") {
      config.top_k = config_count(key, value);
    } else if (key == "cv_folds") {
      config.cv_folds = config_count(key, value);
    } else if (key == "seed") {
      config.seed = config_count(key, value);
    } else if (key == "workers") {
      config.workers = config_count(key, value);
    } else if (key == "output_dir") {
      config.output_dir = resolve(base_dir, value);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
  }
  return config;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  const std::string text = read_file(path);
  return from_text(text, fs::path(path).parent_path().string());
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigError, why); };
  if (recording_path.empty()) fail("recording path is required");
  if (!(window_seconds > 0.0)) fail("window_seconds must be positive");
  if (!(q > 0.0 && q < 1.0)) fail("q must lie in (0, 1)");
  if (forest.n_trees < 1) fail("n_trees must be >= 1");
  if (forest.min_leaf < 1) fail("min_leaf must be >= 1");
  if (forest.mtry && *forest.mtry < 1) fail("mtry must be >= 1");
  if (repeats < 1) fail("repeats must be >= 1");
  if (cv_folds < 2) fail("cv_folds must be >= 2");
  if (output_dir.empty()) fail("output_dir is required");
  for (const auto* path : {&recording_path, &labels_path, &settings_path}) {
    if (!path->empty() && !fs::is_regular_file(*path)) fail("cannot read '" + *path + "'");
  }
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
      return 2;
    case ErrorCode::NothingSelected:
      return 4;
    default:
      return 3;
  }
}

// ---------------------------------------------------------------------------
// Full pipeline

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double value, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << value;
  return ss.str();
}

template <typename Writer>
void write_artifact(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  write_file(path.string(), out.str());
}

void write_windows_csv(const WindowSet& windows, std::ostream& out) {
  out << "window_id,start_s,end_s,label\n";
  for (const auto& w : windows.all_windows()) {
    const double start = windows.t0 + static_cast<double>(w.start_index) / windows.sample_rate_hz;
    const double end = windows.t0 + static_cast<double>(w.start_index + w.length) / windows.sample_rate_hz;
    out << w.window_id << ',' << format_double(start) << ',' << format_double(end) << ',' << w.label.value_or("")
        << '\n';
  }
}

}  // namespace

PipelineResult run_full_pipeline(const PipelineConfig& config) {
  config.validate();
  if (config.labels_path.empty()) throw Error(ErrorCode::ConfigError, "run needs a labels file");

  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());

  PipelineResult result;
  KeyValueFile& manifest = result.manifest;
  const auto save_manifest = [&] { manifest.save((out_dir / "manifest.txt").string()); };

  ForestParams forest = config.forest;
  forest.seed = config.seed;
  forest.workers = config.workers;

  manifest.set("tool_version", std::string(kToolVersion));
  manifest.set("status", "running");
  manifest.set("seed", std::to_string(config.seed));
  manifest.set("window_seconds", format_double(config.window_seconds));
  manifest.set("q", format_double(config.q));
  manifest.set("fdr", std::string(to_string(config.fdr)));
  manifest.set("n_trees", std::to_string(forest.n_trees));
  manifest.set("mtry", forest.mtry ? std::to_string(*forest.mtry) : "sqrt");
  manifest.set("min_leaf", std::to_string(forest.min_leaf));
  manifest.set("max_depth", forest.max_depth ? std::to_string(*forest.max_depth) : "none");
  manifest.set("repeats", std::to_string(config.repeats));
  manifest.set("cv_folds", std::to_string(config.cv_folds));

  // (1) time-series engineering
  auto start = Clock::now();
  const Recording raw = load_recording_csv_file(config.recording_path);
  const auto labels = load_labels_csv_file(config.labels_path);
  const std::vector<VirtualSensorSpec> specs =
      config.auto_pair ? default_pairing(raw, config.auto_pair->first, config.auto_pair->second)
                       : config.virtual_sensors;
  const Recording recording = apply_virtual_sensors(raw, specs);
  const WindowSet windows = segment_fixed(recording, config.window_seconds, labels);
  if (windows.label_domain.size() < 2) {
    throw Error(ErrorCode::DegenerateTarget, "labeled windows cover fewer than 2 classes");
  }
  write_artifact(out_dir / "recording.csv", [&](std::ostream& o) { write_recording_csv(recording, o); });
  write_artifact(out_dir / "windows.csv", [&](std::ostream& o) { write_windows_csv(windows, o); });
  manifest.set("sample_rate_hz", format_double(recording.sample_rate_hz()));
  manifest.set("n_samples", std::to_string(recording.length()));
  manifest.set("n_kinds", std::to_string(recording.channels().size()));
  for (const auto& spec : specs) manifest.append("virtual_sensor", spec.to_line());
  manifest.set("n_windows", std::to_string(windows.windows.size()));
  manifest.set("n_windows_unlabeled", std::to_string(windows.unlabeled.size()));
  manifest.set("time_step1_s", fixed(seconds_since(start), 3));
  save_manifest();

  // (2) full extraction
  start = Clock::now();
  const ExtractionSettings settings =
      config.settings_path.empty() ? default_settings(recording.kinds()) : load_settings_file(config.settings_path);
  const FeatureMatrix full = extract(windows, recording, settings, config.workers);
  write_artifact(out_dir / "features_full.csv", [&](std::ostream& o) { write_feature_matrix_csv(full, o); });
  manifest.set("n_features_full", std::to_string(full.cols()));
  manifest.set("time_step2_s", fixed(seconds_since(start), 3));
  save_manifest();

  // (3) FDR selection
  start = Clock::now();
  const SelectionReport report = select_features(full, Target::categorical(full.labels()), config.q, config.fdr,
                                                 config.workers);
  write_artifact(out_dir / "selection.csv", [&](std::ostream& o) { write_selection_report_csv(report, o); });
  manifest.set("n_selected", std::to_string(report.selected.size()));
  manifest.set("time_step3_s", fixed(seconds_since(start), 3));
  if (report.selected.empty()) {
    manifest.set("status", "nothing_selected");
    save_manifest();
    throw Error(ErrorCode::NothingSelected, "no feature passed the FDR threshold q=" + format_double(config.q));
  }
  save_manifest();

  // (4) importance ranking over the selected columns
  start = Clock::now();
  std::vector<std::string> dropped;
  const FeatureMatrix selected = full.select_columns(report.selected_strings()).drop_nan_columns(&dropped);
  for (const auto& name : dropped) result.warnings.push_back("dropped NaN column " + name);
  manifest.set("n_nan_dropped", std::to_string(dropped.size()));
  if (selected.cols() == 0) {
    manifest.set("status", "nothing_selected");
    save_manifest();
    throw Error(ErrorCode::NothingSelected, "every selected column contains NaN");
  }
  const auto ranked = aggregate_importances(selected, selected.labels(), config.repeats, forest);
  write_artifact(out_dir / "importances.csv", [&](std::ostream& o) {
    o << "feature,mean_importance\n";
    for (const auto& r : ranked) o << encode_feature_name(r.name) << ',' << format_double(r.importance) << '\n';
  });
  std::size_t k = config.top_k;
  if (k > ranked.size()) {
    result.warnings.push_back("top_k=" + std::to_string(k) + " clamped to " + std::to_string(ranked.size()) +
                              " selected features");
    k = ranked.size();
  }
  for (const auto& name : top_k_features(ranked, k)) result.top_features.push_back(encode_feature_name(name));
  const ExtractionSettings restricted = settings_from_feature_names(result.top_features);
  write_file((out_dir / "settings.txt").string(), format_settings(restricted));
  manifest.set("top_k_requested", std::to_string(config.top_k));
  manifest.set("top_k", std::to_string(k));
  manifest.set("time_step4_s", fixed(seconds_since(start), 3));
  save_manifest();

  // (5) specialized classifier on the top-k columns only
  start = Clock::now();
  const FeatureMatrix specialized = extract(windows, recording, restricted, config.workers);
  const bool consistent = specialized == full.select_columns(result.top_features);
  const ForestModel model = train_forest(specialized, specialized.labels(), forest);
  save_forest_file(model, (out_dir / "model.txt").string());
  const std::size_t folds = std::min(config.cv_folds, specialized.rows());
  const CVReport cv = cross_validate(specialized, specialized.labels(), folds, forest);
  result.cv_mean_accuracy = cv.mean_accuracy;
  manifest.set("restriction_consistent", consistent ? "true" : "false");
  manifest.set("cv_mean_accuracy", format_double(cv.mean_accuracy));
  manifest.set("time_step5_s", fixed(seconds_since(start), 3));
  manifest.set("status", "complete");
  save_manifest();
  return result;
}

// ---------------------------------------------------------------------------
// Deployment

std::vector<VirtualSensorSpec> manifest_virtual_sensors(const KeyValueFile& manifest) {
  std::vector<VirtualSensorSpec> specs;
  for (const auto& line : manifest.get_all("virtual_sensor")) specs.push_back(VirtualSensorSpec::parse(line));
  return specs;
}

std::optional<double> PredictionTimeline::accuracy() const {
  std::size_t labeled = 0;
  std::size_t correct = 0;
  for (const auto& row : rows) {
    if (!row.true_label) continue;
    ++labeled;
    if (*row.true_label == row.predicted) ++correct;
  }
  if (labeled == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(labeled);
}

PredictionTimeline predict(const ForestModel& model, const ExtractionSettings& settings, const Recording& recording,
                           std::span<const VirtualSensorSpec> virtual_sensors, double window_seconds,
                           std::span<const LabelInterval> labels, std::size_t workers) {
  std::vector<std::string> expected;
  for (const auto& f : model.feature_names) expected.push_back(encode_feature_name(f));
  std::vector<std::string> configured;
  for (const auto& f : settings.feature_names()) configured.push_back(encode_feature_name(f));
  if (expected != configured) {
    throw Error(ErrorCode::FeatureSetMismatch, "settings list " + std::to_string(configured.size()) +
                                                   " features, model expects " + std::to_string(expected.size()));
  }

  const Recording augmented = apply_virtual_sensors(recording, virtual_sensors);
  const WindowSet windows = segment_fixed(augmented, window_seconds, labels);
  const auto all = windows.all_windows();
  const FeatureMatrix matrix = extract(all, augmented, settings, workers);

  PredictionTimeline timeline;
  timeline.classes = model.classes;
  for (std::size_t r = 0; r < all.size(); ++r) {
    TimelineRow row;
    row.window_id = all[r].window_id;
    row.start_s = augmented.time_at(all[r].start_index);
    row.end_s = augmented.time_at(all[r].start_index + all[r].length);
    row.probabilities = predict_proba(model, matrix.row(r));
    const auto best = std::max_element(row.probabilities.begin(), row.probabilities.end());
    row.predicted = model.classes[static_cast<std::size_t>(best - row.probabilities.begin())];
    row.true_label = all[r].label;
    timeline.rows.push_back(std::move(row));
  }
  return timeline;
}

PredictionTimeline predict(const PredictRequest& request) {
  const ForestModel model = load_forest_file(request.model_path);
  const ExtractionSettings settings = load_settings_file(request.settings_path);
  const std::string manifest_path = request.manifest_path.empty()
                                        ? (fs::path(request.model_path).parent_path() / "manifest.txt").string()
                                        : request.manifest_path;
  const KeyValueFile manifest = KeyValueFile::load(manifest_path);
  const auto specs = manifest_virtual_sensors(manifest);
  const Recording recording = load_recording_csv_file(request.recording_path);
  std::vector<LabelInterval> labels;
  if (!request.labels_path.empty()) labels = load_labels_csv_file(request.labels_path);
  return predict(model, settings, recording, specs, request.window_seconds, labels, request.workers);
}

void write_timeline_csv(const PredictionTimeline& timeline, std::ostream& out) {
  out << "window_id,start_s,end_s";
  for (const auto& c : timeline.classes) out << ",p_" << c;
  out << ",predicted,true_label,misclassified\n";
  for (const auto& row : timeline.rows) {
    out << row.window_id << ',' << format_double(row.start_s) << ',' << format_double(row.end_s);
    for (const double p : row.probabilities) out << ',' << format_double(p);
    out << ',' << row.predicted << ',' << row.true_label.value_or("") << ',';
    if (row.true_label) out << (*row.true_label == row.predicted ? "false" : "true");
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Benchmark

std::string BenchmarkReport::str() const {
  std::ostringstream out;
  for (const auto& [step, secs] : step_seconds) out << std::left << std::setw(28) << step << fixed(secs, 4) << " s\n";
  out << "rows=" << rows << " features=" << features << '\n';
  out << "extraction rows/s (1 worker)   " << fixed(rows_per_s_single, 1) << '\n';
  if (workers > 1) {
    out << "extraction rows/s (" << workers << " workers)  " << fixed(rows_per_s_parallel, 1) << '\n';
    out << "speedup                        " << fixed(rows_per_s_parallel / rows_per_s_single, 2) << "x\n";
  }
  return out.str();
}

BenchmarkReport benchmark(const PipelineConfig& config, const std::string& model_path) {
  BenchmarkReport report;
  report.workers = resolve_workers(config.workers);

  auto start = Clock::now();
  const Recording raw = load_recording_csv_file(config.recording_path);
  report.step_seconds.emplace_back("ingest", seconds_since(start));

  start = Clock::now();
  const auto specs = config.auto_pair ? default_pairing(raw, config.auto_pair->first, config.auto_pair->second)
                                      : config.virtual_sensors;
  const Recording recording = apply_virtual_sensors(raw, specs);
  report.step_seconds.emplace_back("virtual_sensors", seconds_since(start));

  start = Clock::now();
  const WindowSet windows = segment_fixed(recording, config.window_seconds, {});
  report.step_seconds.emplace_back("segment", seconds_since(start));

  const ExtractionSettings settings =
      config.settings_path.empty() ? default_settings(recording.kinds()) : load_settings_file(config.settings_path);
  report.rows = windows.windows.size();
  report.features = settings.size();

  start = Clock::now();
  (void)extract(windows, recording, settings, 1);
  const double single = seconds_since(start);
  report.step_seconds.emplace_back("extract_1_worker", single);

  double parallel = single;
  if (report.workers > 1) {
    start = Clock::now();
    (void)extract(windows, recording, settings, report.workers);
    parallel = seconds_since(start);
    report.step_seconds.emplace_back("extract_" + std::to_string(report.workers) + "_workers", parallel);
  }

  const auto rate = [&](double secs) { return secs > 0.0 ? static_cast<double>(report.rows) / secs : 0.0; };
  report.rows_per_s_single = rate(single);
  report.rows_per_s_parallel = rate(parallel);

  if (!model_path.empty()) {
    start = Clock::now();
    const ForestModel model = load_forest_file(model_path);
    ExtractionSettings restricted;
    for (const auto& f : model.feature_names) restricted.add(f);
    (void)predict(model, restricted, raw, specs, config.window_seconds, {}, config.workers);
    report.step_seconds.emplace_back("restricted_extract_predict", seconds_since(start));
  }
  return report;
}

}  // namespace imufresh
