// Parallel kernels against their serial references. Thread count follows
// OMP_NUM_THREADS; the reference variants always run on one thread.

#include "gaitsom/config.hpp"
#include "gaitsom/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace gaitsom;

namespace {

const std::vector<LabeledFeatures>& features(std::size_t per_class) {
  static std::map<std::size_t, std::vector<LabeledFeatures>> cache;
  auto it = cache.find(per_class);
  if (it == cache.end()) {
    RunConfig cfg;
    cfg.synth = presets::normal_vs_spastic(per_class, 1);
    const auto subjects = generate(*cfg.synth);
    it = cache.emplace(per_class, dataset_features(subjects, cfg.parts, cfg.scale_grid(), cfg.cwt_options(), cfg.split,
                                                    cfg.features))
             .first;
  }
  return it->second;
}

}  // namespace

static void BM_Cwt(benchmark::State& state) {
  const auto subject = generate(presets::normal_vs_spastic(1, 1))[1];
  const auto samples = subject.at({Joint::Hip, Side::Right}).samples();
  const auto grid = ScaleGrid::log_spaced(1.0, 25.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cwt_samples(samples, grid));
}

static void BM_CwtReference(benchmark::State& state) {
  const auto subject = generate(presets::normal_vs_spastic(1, 1))[1];
  const auto samples = subject.at({Joint::Hip, Side::Right}).samples();
  const auto grid = ScaleGrid::log_spaced(1.0, 25.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::cwt_samples(samples, grid));
}

static void BM_Train(benchmark::State& state) {
  const auto values = feature_values(features(20));
  TrainSchedule s;
  s.epochs = 50;
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto init = init_map(side, side, values.front().size(), s, values);
  for (auto _ : state) benchmark::DoNotOptimize(train(init, values));
}

static void BM_TrainReference(benchmark::State& state) {
  const auto values = feature_values(features(20));
  TrainSchedule s;
  s.epochs = 50;
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto init = init_map(side, side, values.front().size(), s, values);
  for (auto _ : state) benchmark::DoNotOptimize(reference::train(init, values));
}

static void BM_Loocv(benchmark::State& state) {
  const auto& data = features(6);
  TrainSchedule s;
  s.epochs = 50;
  for (auto _ : state) benchmark::DoNotOptimize(loocv(data, {10, 10}, s));
}

static void BM_LoocvReference(benchmark::State& state) {
  const auto& data = features(6);
  TrainSchedule s;
  s.epochs = 50;
  for (auto _ : state) benchmark::DoNotOptimize(reference::loocv(data, {10, 10}, s));
}

BENCHMARK(BM_Cwt)->Arg(12)->Arg(48)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CwtReference)->Arg(12)->Arg(48)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Train)->Arg(6)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainReference)->Arg(6)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Loocv)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LoocvReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
