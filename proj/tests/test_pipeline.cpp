#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "imufresh/error.hpp"
#include "imufresh/pipeline.hpp"
#include "imufresh/synth.hpp"
#include "imufresh/text.hpp"

using namespace imufresh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("imufresh_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_synth(const fs::path& dir, std::uint64_t seed, double duration = 160.0) {
  SynthConfig sc;
  sc.duration_s = duration;
  sc.rate_hz = 50.0;
  sc.seed = seed;
  const SynthData data = synthesize(sc);
  std::ofstream rec(dir / "recording.csv");
  write_recording_csv(data.recording, rec);
  std::ofstream lab(dir / "labels.csv");
  write_labels_csv(data.labels, lab);
}

PipelineConfig small_config(const fs::path& dir) {
  return PipelineConfig::from_text(
      "recording=recording.csv\nlabels=labels.csv\nwindow_seconds=4\nauto_pair=_l _r\n"
      "n_trees=15\nrepeats=3\ntop_k=5\ncv_folds=3\nseed=7\nworkers=2\noutput_dir=out\n",
      dir.string());
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an imufresh::Error";
  return ErrorCode::IoError;
}

}  // namespace

TEST(KeyValueFile, ParseAndRender) {
  auto kv = KeyValueFile::parse("# c\na=1\n\nb = two words \nv=x\nv=y\n");
  EXPECT_EQ(kv.get("a"), "1");
  EXPECT_EQ(kv.get("b"), "two words");
  EXPECT_EQ(kv.get_all("v"), (std::vector<std::string>{"x", "y"}));
  EXPECT_FALSE(kv.get("zz").has_value());
  kv.set("a", "3");
  EXPECT_EQ(KeyValueFile::parse(kv.str()).entries(), kv.entries());
  EXPECT_EQ(code_of([] { KeyValueFile::parse("novalue\n"); }), ErrorCode::ConfigError);
}

TEST(PipelineConfig, DefaultsAndErrors) {
  const auto cfg = PipelineConfig::from_text("recording=/r.csv\nlabels=/l.csv\n");
  EXPECT_EQ(cfg.window_seconds, 4.0);
  EXPECT_EQ(cfg.q, 0.05);
  EXPECT_EQ(cfg.top_k, 20u);
  EXPECT_EQ(cfg.cv_folds, 10u);
  EXPECT_EQ(cfg.fdr, FdrMethod::benjamini_yekutieli);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("recording=/r.csv\nlabels=/l.csv\nbogus=1\n"); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("recording=/r.csv\nlabels=/l.csv\nq=2\n").validate(); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { PipelineConfig::from_text("recording=/r.csv\nlabels=/l.csv\nfdr=xx\n"); }),
            ErrorCode::ConfigError);
  const auto rel = PipelineConfig::from_text("recording=r.csv\nlabels=l.csv\n", "/base");
  EXPECT_EQ(fs::path(rel.recording_path), fs::path("/base/r.csv"));
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::ConfigError), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::IoError), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::MalformedCsv), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::NothingSelected), 4);
}

TEST(Pipeline, EndToEndSmall) {
  const fs::path dir = scratch("e2e");
  write_synth(dir, 5);
  const PipelineConfig cfg = small_config(dir);
  const PipelineResult res = run_full_pipeline(cfg);
  EXPECT_EQ(res.top_features.size(), 5u);
  EXPECT_GE(res.cv_mean_accuracy, 0.9);
  for (const char* f : {"recording.csv", "windows.csv", "features_full.csv", "selection.csv", "importances.csv",
                        "settings.txt", "model.txt", "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const auto manifest = KeyValueFile::load((dir / "out" / "manifest.txt").string());
  EXPECT_EQ(manifest.get("status"), "complete");
  EXPECT_EQ(manifest.get("restriction_consistent"), "true");
  EXPECT_EQ(manifest_virtual_sensors(manifest).size(), 3u);

  PredictRequest req;
  req.model_path = (dir / "out" / "model.txt").string();
  req.settings_path = (dir / "out" / "settings.txt").string();
  req.recording_path = (dir / "recording.csv").string();
  req.labels_path = (dir / "labels.csv").string();
  req.workers = 1;
  const PredictionTimeline tl = predict(req);
  EXPECT_EQ(tl.rows.size(), 40u);
  ASSERT_TRUE(tl.accuracy().has_value());
  EXPECT_GE(*tl.accuracy(), 0.9);
  std::ostringstream out;
  write_timeline_csv(tl, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "window_id,start_s,end_s,p_run,p_walk,predicted,true_label,misclassified");
}

TEST(Pipeline, ArtifactsDeterministic) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  write_synth(a, 6, 100.0);
  write_synth(b, 6, 100.0);
  run_full_pipeline(small_config(a));
  auto cfg = small_config(b);
  cfg.workers = 1;
  cfg.forest.workers = 1;
  run_full_pipeline(cfg);
  for (const char* f : {"features_full.csv", "selection.csv", "importances.csv", "settings.txt", "model.txt"}) {
    EXPECT_EQ(read_file((a / "out" / f).string()), read_file((b / "out" / f).string())) << f;
  }
}

TEST(Pipeline, NothingSelectedAtTinyQ) {
  const fs::path dir = scratch("nothing");
  write_synth(dir, 7, 60.0);
  auto cfg = small_config(dir);
  cfg.q = 1e-300;
  EXPECT_EQ(code_of([&] { run_full_pipeline(cfg); }), ErrorCode::NothingSelected);
  EXPECT_EQ(exit_code_for(ErrorCode::NothingSelected), 4);
}

TEST(Pipeline, TopKClampedWithWarning) {
  const fs::path dir = scratch("clamp");
  write_synth(dir, 8, 80.0);
  auto cfg = small_config(dir);
  cfg.top_k = 100000;
  const PipelineResult res = run_full_pipeline(cfg);
  EXPECT_FALSE(res.warnings.empty());
  EXPECT_LT(res.top_features.size(), 100000u);
}

TEST(Predict, FeatureSetMismatch) {
  const fs::path dir = scratch("mismatch");
  write_synth(dir, 9, 80.0);
  run_full_pipeline(small_config(dir));
  std::ofstream(dir / "other_settings.txt") << "accel_x_l__minimum\n";
  PredictRequest req;
  req.model_path = (dir / "out" / "model.txt").string();
  req.settings_path = (dir / "other_settings.txt").string();
  req.recording_path = (dir / "recording.csv").string();
  EXPECT_EQ(code_of([&] { predict(req); }), ErrorCode::FeatureSetMismatch);
}

TEST(Synth, DeterministicAndLabeled) {
  SynthConfig sc;
  sc.duration_s = 120;
  sc.rate_hz = 50;
  const SynthData a = synthesize(sc);
  const SynthData b = synthesize(sc);
  EXPECT_EQ(a.recording, b.recording);
  EXPECT_EQ(a.recording.channels().size(), 6u);
  EXPECT_EQ(a.recording.length(), 6000u);
  ASSERT_FALSE(a.labels.empty());
  EXPECT_EQ(a.labels.front().start_s, 0.0);
  EXPECT_EQ(a.labels.back().end_s, 120.0);
  for (std::size_t i = 1; i < a.labels.size(); ++i) {
    EXPECT_EQ(a.labels[i].start_s, a.labels[i - 1].end_s);
    EXPECT_NE(a.labels[i].label, a.labels[i - 1].label);
  }
}
