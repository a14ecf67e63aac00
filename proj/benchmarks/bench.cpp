#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "driftstream/arf.hpp"
#include "driftstream/config.hpp"
#include "driftstream/drift.hpp"
#include "driftstream/featurization.hpp"
#include "driftstream/ks.hpp"
#include "driftstream/pipeline.hpp"
#include "driftstream/synth.hpp"

using namespace driftstream;

namespace {

const SampleStream& stream() {
  static const SampleStream s = [] {
    SynthStreamSpec spec;
    spec.n_samples = 10000;
    spec.drift_points = {5000};
    return generate_synth_stream(spec);
  }();
  return s;
}

void BM_FitExtractor(benchmark::State& state) {
  const auto docs = stream().samples().subspan(0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_extractor(stream().schema(), docs, 100));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitExtractor)->Arg(1000)->Arg(5000);

void BM_Transform(benchmark::State& state) {
  const auto model = fit_extractor(stream().schema(), stream().samples().subspan(0, 1000), 100);
  std::vector<double> out(model.dim());
  std::size_t i = 0;
  for (auto _ : state) {
    model.transform_into(stream()[i++ % stream().size()], out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Transform);

const std::vector<std::uint8_t>& error_bits() {
  static const auto bits = generate_error_bits(100000, 50000, 0.05, 0.45, 1);
  return bits;
}

template <DetectorKind Kind>
void BM_Detector(benchmark::State& state) {
  const auto& bits = error_bits();
  DetectorConfig cfg;
  cfg.kind = Kind;
  for (auto _ : state) {
    auto d = make_detector(cfg, 1);
    std::size_t drifts = 0;
    for (auto b : bits) drifts += d->update(b) == DriftLevel::drift;
    benchmark::DoNotOptimize(drifts);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(bits.size()));
}
BENCHMARK_TEMPLATE(BM_Detector, DetectorKind::ddm);
BENCHMARK_TEMPLATE(BM_Detector, DetectorKind::eddm);
BENCHMARK_TEMPLATE(BM_Detector, DetectorKind::adwin);
BENCHMARK_TEMPLATE(BM_Detector, DetectorKind::kswin);

void BM_KsStatistic(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(70), b(30);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic(a, b));
}
BENCHMARK(BM_KsStatistic);

void BM_ForestStep(benchmark::State& state) {
  const auto model = fit_extractor(stream().schema(), stream().samples().subspan(0, 1000), 100);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < 2000; ++i) rows.push_back(model.transform(stream()[i]).values);
  AdaptiveRandomForest forest(model.dim());
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& x = rows[i % rows.size()];
    const Label y = *stream()[i % rows.size()].label;
    benchmark::DoNotOptimize(forest.predict(x));
    forest.partial_fit(x, y);
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForestStep);

void BM_RunFnfRetrain(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.classifier.kind = static_cast<ClassifierKind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_fnf(stream(), cfg).timeline.steps());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(stream().size()));
}
BENCHMARK(BM_RunFnfRetrain)
    ->Arg(static_cast<int>(ClassifierKind::sgd))
    ->Arg(static_cast<int>(ClassifierKind::arf))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
