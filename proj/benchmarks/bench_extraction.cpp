#include <benchmark/benchmark.h>

#include "imufresh/calculators.hpp"
#include "imufresh/extraction.hpp"
#include "imufresh/synth.hpp"
#include "imufresh/virtual_sensors.hpp"

using namespace imufresh;

namespace {

struct Fixture {
  Recording recording;
  WindowSet windows;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    SynthConfig sc;
    sc.duration_s = 120.0;
    sc.rate_hz = 100.0;
    const SynthData data = synthesize(sc);
    Recording rec = apply_virtual_sensors(data.recording, default_pairing(data.recording, "_l", "_r"));
    WindowSet ws = segment_fixed(rec, 4.0, data.labels);
    return Fixture{std::move(rec), std::move(ws)};
  }();
  return f;
}

void BM_ComputeFeature(benchmark::State& state, const char* calculator, ParamList params) {
  const auto x = fixture().recording.channel(ChannelKind("accel_x_l")).first(400);
  for (auto _ : state) benchmark::DoNotOptimize(compute_feature(x, calculator, params));
}
BENCHMARK_CAPTURE(BM_ComputeFeature, mean, "mean", ParamList{});
BENCHMARK_CAPTURE(BM_ComputeFeature, change_quantiles, "change_quantiles",
                  ParamList{{"f_agg", std::string("var")}, {"isabs", true}, {"qh", 1.0}, {"ql", 0.4}});
BENCHMARK_CAPTURE(BM_ComputeFeature, agg_linear_trend, "agg_linear_trend",
                  ParamList{{"f_agg", std::string("max")}, {"chunk_len", 10LL}, {"attr", std::string("stderr")}});
BENCHMARK_CAPTURE(BM_ComputeFeature, binned_entropy, "binned_entropy", ParamList{{"bins", 10LL}});

void BM_ExtractFullGrid(benchmark::State& state) {
  const auto& f = fixture();
  const auto settings = default_settings(f.recording.kinds());
  const auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract(f.windows, f.recording, settings, workers));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.windows.windows.size()));
}
BENCHMARK(BM_ExtractFullGrid)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ExtractRestricted(benchmark::State& state) {
  const auto& f = fixture();
  const std::vector<std::string> names{
      "accel_x_diff__change_quantiles__f_agg_\"var\"__isabs_True__qh_1.0__ql_0.0",
      "accel_y_r__agg_linear_trend__f_agg_\"min\"__chunk_len_10__attr_\"stderr\"",
      "gyro_z_l__change_quantiles__f_agg_\"var\"__isabs_False__qh_0.6__ql_0.4",
      "accel_x_r__minimum",
  };
  const auto settings = settings_from_feature_names(names);
  for (auto _ : state) benchmark::DoNotOptimize(extract(f.windows, f.recording, settings, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.windows.windows.size()));
}
BENCHMARK(BM_ExtractRestricted)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
