#include <benchmark/benchmark.h>

#include "ceal/distance.hpp"
#include "ceal/predictor.hpp"
#include "ceal/synthdata.hpp"
#include "ceal/uncertainty.hpp"

namespace {

using namespace ceal;

BinaryMask lesion_contour(std::size_t size) {
  SynthParams p;
  p.image_size = size;
  p.empty_fraction = 0.0;
  p.max_axis = static_cast<double>(size) / 3.0;
  const auto s = generate_sample(p, 1, 0);
  return extract_contour(s.mask);
}

void BM_EdtExact(benchmark::State& state) {
  const auto contour = lesion_contour(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(edt_exact_squared(contour));
}
BENCHMARK(BM_EdtExact)->Arg(32)->Arg(128)->Arg(512);

void BM_EdtBrute(benchmark::State& state) {
  const auto contour = lesion_contour(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(edt_brute_squared(contour));
}
BENCHMARK(BM_EdtBrute)->Arg(32)->Arg(128);

void BM_VarianceUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ProbMap p(n, n, 0.3);
  VarianceAccumulator acc(n, n);
  for (auto _ : state) acc.update(p);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_VarianceUpdate)->Arg(32)->Arg(256);

void BM_Features(benchmark::State& state) {
  SynthParams p;
  p.image_size = static_cast<std::size_t>(state.range(0));
  const auto s = generate_sample(p, 2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(s.image));
}
BENCHMARK(BM_Features)->Arg(32)->Arg(256);

void BM_McPassesRef(benchmark::State& state) {
  const auto s = generate_sample(SynthParams{}, 3, 0);
  RefPredictor::Weights w{};
  w.fill(0.1);
  const RefPredictor model(w, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_passes(s.image, 10, 0.5, 9));
}
BENCHMARK(BM_McPassesRef);

}  // namespace

BENCHMARK_MAIN();
