// imufresh command-line tool: synth, run, predict, benchmark, inspect.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "imufresh/error.hpp"
#include "imufresh/pipeline.hpp"
#include "imufresh/synth.hpp"
#include "imufresh/text.hpp"

namespace fs = std::filesystem;
using namespace imufresh;

namespace {

struct RunOverrides {
  std::string config;
  std::optional<double> q;
  std::optional<std::size_t> top_k;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<double> window_seconds;
  std::optional<std::string> output_dir;
};

PipelineConfig load_config(const RunOverrides& o) {
  PipelineConfig cfg = PipelineConfig::from_file(o.config);
  if (o.q) cfg.q = *o.q;
  if (o.top_k) cfg.top_k = *o.top_k;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.window_seconds) cfg.window_seconds = *o.window_seconds;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  cfg.validate();
  return cfg;
}

void add_overrides(CLI::App* cmd, RunOverrides& o) {
  cmd->add_option("-c,--config", o.config, "key=value pipeline config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--q", o.q, "FDR level");
  cmd->add_option("--top-k", o.top_k, "size of the specialized feature subset");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--workers", o.workers, "threads, 0 = all cores");
  cmd->add_option("--window-seconds", o.window_seconds, "window length in seconds");
  cmd->add_option("-o,--output-dir", o.output_dir, "artifact directory");
}

int cmd_synth(const SynthConfig& sc, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const SynthData data = synthesize(sc);
  {
    std::ofstream rec(fs::path(out_dir) / "recording.csv");
    write_recording_csv(data.recording, rec);
  }
  {
    std::ofstream lab(fs::path(out_dir) / "labels.csv");
    write_labels_csv(data.labels, lab);
  }
  std::cout << "wrote " << (fs::path(out_dir) / "recording.csv").string() << " (" << data.recording.channels().size()
            << " channels, " << data.recording.length() << " samples) and " << data.labels.size()
            << " label intervals\n";
  return 0;
}

int cmd_run(const RunOverrides& o) {
  const PipelineConfig cfg = load_config(o);
  const PipelineResult res = run_full_pipeline(cfg);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "windows            " << res.manifest.get("n_windows").value_or("?") << '\n'
            << "features (full)    " << res.manifest.get("n_features_full").value_or("?") << '\n'
            << "selected           " << res.manifest.get("n_selected").value_or("?") << '\n'
            << "top_k              " << res.top_features.size() << '\n'
            << "cv mean accuracy   " << format_double(res.cv_mean_accuracy) << '\n'
            << "artifacts          " << cfg.output_dir << '\n';
  return 0;
}

int cmd_predict(PredictRequest req, const std::string& out) {
  if (req.settings_path.empty()) {
    req.settings_path = (fs::path(req.model_path).parent_path() / "settings.txt").string();
  }
  const PredictionTimeline tl = predict(req);
  if (out.empty() || out == "-") {
    write_timeline_csv(tl, std::cout);
  } else {
    std::ostringstream buf;
    write_timeline_csv(tl, buf);
    write_file(out, buf.str());
  }
  if (const auto acc = tl.accuracy()) std::cerr << "accuracy " << format_double(*acc) << '\n';
  return 0;
}

int cmd_benchmark(const RunOverrides& o, const std::string& model) {
  const PipelineConfig cfg = load_config(o);
  std::cout << benchmark(cfg, model).str();
  return 0;
}

void print_table(const std::vector<std::vector<std::string>>& rows, std::size_t limit) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows[0].size(), 0);
  const std::size_t shown = std::min(rows.size(), limit + 1);
  for (std::size_t r = 0; r < shown; ++r) {
    for (std::size_t c = 0; c < rows[r].size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], rows[r][c].size());
    }
  }
  for (std::size_t r = 0; r < shown; ++r) {
    for (std::size_t c = 0; c < rows[r].size() && c < width.size(); ++c) {
      std::cout << std::left << std::setw(static_cast<int>(width[c]) + 2) << rows[r][c];
    }
    std::cout << '\n';
  }
  if (rows.size() > shown) std::cout << "... " << rows.size() - shown << " more rows\n";
}

int cmd_inspect(const std::string& path, std::size_t limit) {
  std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (!lines.empty() && lines[0].find(',') != std::string::npos) {
    std::vector<std::vector<std::string>> rows;
    std::size_t selected = 0;
    const bool report = lines[0] == "feature,p_value,test_kind,selected";
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto fields = split(lines[i], ',');
      rows.emplace_back(fields.begin(), fields.end());
      if (report && i > 0 && rows.back().back() == "true") ++selected;
    }
    if (report) std::cout << rows.size() - 1 << " tests, " << selected << " selected\n";
    print_table(rows, limit);
    return 0;
  }
  const KeyValueFile kv = KeyValueFile::parse(text);
  std::size_t width = 0;
  for (const auto& [k, v] : kv.entries()) width = std::max(width, k.size());
  for (const auto& [k, v] : kv.entries()) {
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imufresh: feature extraction, FDR selection and forest classification for IMU recordings"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  SynthConfig sc;
  std::string synth_out = ".";
  auto* synth = app.add_subcommand("synth", "generate a labeled two-sensor recording");
  synth->add_option("-o,--output-dir", synth_out, "directory for recording.csv and labels.csv");
  synth->add_option("--duration", sc.duration_s, "seconds")->capture_default_str();
  synth->add_option("--rate", sc.rate_hz, "sample rate in Hz")->capture_default_str();
  synth->add_option("--seed", sc.seed)->capture_default_str();
  synth->add_option("--activities", sc.activities, "activity labels")->delimiter(',')->capture_default_str();
  synth->add_option("--channels", sc.channel_bases, "per-side channel bases")->delimiter(',')->capture_default_str();
  synth->add_option("--noise", sc.noise, "Gaussian noise standard deviation")->capture_default_str();
  synth->add_option("--drift", sc.drift, "relative cadence shift")->capture_default_str();
  synth->add_option("--subject-variation", sc.subject_variation)->capture_default_str();

  RunOverrides run_opts;
  auto* run = app.add_subcommand("run", "run the five pipeline steps and persist artifacts");
  add_overrides(run, run_opts);

  PredictRequest req;
  std::string predict_out;
  auto* pred = app.add_subcommand("predict", "classify every window of a recording with a trained model");
  pred->add_option("-m,--model", req.model_path, "model.txt from a run")->required()->check(CLI::ExistingFile);
  pred->add_option("-s,--settings", req.settings_path, "restricted settings (default: settings.txt next to the model)");
  pred->add_option("-r,--recording", req.recording_path, "recording CSV")->required()->check(CLI::ExistingFile);
  pred->add_option("--manifest", req.manifest_path, "run manifest (default: manifest.txt next to the model)");
  pred->add_option("-l,--labels", req.labels_path, "optional labels for misclassification flags");
  pred->add_option("--window-seconds", req.window_seconds)->capture_default_str();
  pred->add_option("--workers", req.workers, "threads, 0 = all cores")->capture_default_str();
  pred->add_option("-o,--output", predict_out, "timeline CSV (default: stdout)");

  RunOverrides bench_opts;
  std::string bench_model;
  auto* bench = app.add_subcommand("benchmark", "time each pipeline step");
  add_overrides(bench, bench_opts);
  bench->add_option("-m,--model", bench_model, "also time restricted extraction and prediction");

  std::string inspect_path;
  std::size_t inspect_limit = 30;
  auto* inspect = app.add_subcommand("inspect", "pretty-print a manifest or a CSV artifact");
  inspect->add_option("path", inspect_path)->required()->check(CLI::ExistingFile);
  inspect->add_option("-n,--rows", inspect_limit, "rows to show for CSV files")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(sc, synth_out);
    if (*run) return cmd_run(run_opts);
    if (*pred) return cmd_predict(req, predict_out);
    if (*bench) return cmd_benchmark(bench_opts, bench_model);
    if (*inspect) return cmd_inspect(inspect_path, inspect_limit);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
