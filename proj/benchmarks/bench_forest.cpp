#include <benchmark/benchmark.h>

#include <random>

#include "imufresh/forest.hpp"
#include "imufresh/fresh.hpp"

using namespace imufresh;

namespace {

struct Data {
  FeatureMatrix matrix;
  std::vector<std::string> labels;
};

Data make_data(std::size_t rows, std::size_t cols) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> dist;
  std::vector<FeatureName> names;
  for (std::size_t c = 0; c < cols; ++c) names.push_back({ChannelKind("f" + std::to_string(1000 + c)), "mean", {}});
  std::vector<std::int64_t> ids(rows);
  std::vector<std::string> labels(rows);
  std::vector<double> cells(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    ids[r] = static_cast<std::int64_t>(r);
    labels[r] = r % 2 == 0 ? "walk" : "run";
    for (std::size_t c = 0; c < cols; ++c) cells[r * cols + c] = dist(gen) + (c % 10 == 0 ? (r % 2) * 1.5 : 0.0);
  }
  return {FeatureMatrix(names, ids, {}, cells), labels};
}

void BM_TrainForest(benchmark::State& state) {
  const Data d = make_data(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  ForestParams p;
  p.n_trees = 100;
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(d.matrix, d.labels, p));
}
BENCHMARK(BM_TrainForest)->Args({140, 20})->Args({140, 1000})->Args({1000, 100})->Unit(benchmark::kMillisecond);

void BM_PredictRow(benchmark::State& state) {
  const Data d = make_data(140, 20);
  ForestParams p;
  p.n_trees = 100;
  const ForestModel model = train_forest(d.matrix, d.labels, p);
  std::size_t r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_proba(model, d.matrix.row(r)));
    r = (r + 1) % d.matrix.rows();
  }
}
BENCHMARK(BM_PredictRow);

void BM_SelectFeatures(benchmark::State& state) {
  const Data d = make_data(140, static_cast<std::size_t>(state.range(0)));
  const Target target = Target::categorical(d.labels);
  for (auto _ : state) benchmark::DoNotOptimize(select_features(d.matrix, target, 0.05));
}
BENCHMARK(BM_SelectFeatures)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
