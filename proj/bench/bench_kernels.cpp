#include <benchmark/benchmark.h>

#include "explab/adaptive.hpp"
#include "explab/channel.hpp"
#include "explab/quantum.hpp"
#include "explab/simplex_oracle.hpp"

using namespace explab;

namespace {

// Arg 0 runs the serial reference, arg 1 the OpenMP path.
Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

const ChannelPair& sec4() {
  static const ChannelPair pair = sec4_example(100.0, 1.5, 1e-4, 0.65);
  return pair;
}

void BM_Hoeffding(benchmark::State& state) {
  const Distribution p{0.2, 0.3, 0.1, 0.4};
  const Distribution q{0.4, 0.1, 0.3, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(hoeffding(0.05, p, q, exec_of(state)).value);
}
BENCHMARK(BM_Hoeffding)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_HkBestPair(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hk_best_pair(0.6, sec4(), exec_of(state)).value);
}
BENCHMARK(BM_HkBestPair)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_HoeffdingOracle(benchmark::State& state) {
  const Distribution p{0.2, 0.3, 0.1, 0.4};
  const Distribution q{0.4, 0.1, 0.3, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(hoeffding_oracle(0.05, p, q, exec_of(state)).value);
}
BENCHMARK(BM_HoeffdingOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AdaptiveBayes(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimal_adaptive_bayes(10, sec4(), 0.5, exec_of(state)).error);
}
BENCHMARK(BM_AdaptiveBayes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExactErrors(benchmark::State& state) {
  const Policy policy(PolicyTree::fixed_input(1, 2, 2, 10));
  const auto test = TestFunction::likelihood_ratio(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(exact_errors(policy, test, 10, sec4(), exec_of(state)).alpha);
}
BENCHMARK(BM_ExactErrors)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const Policy policy(PolicyTree::fixed_input(1, 2, 2, 10));
  const auto test = TestFunction::likelihood_ratio(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo_errors(policy, test, 10, sec4(), 100000, 1, exec_of(state)).alpha);
  }
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MeasuredDivergence(benchmark::State& state) {
  const auto rho = DensityMatrix::from_bloch(0, 0, 0.9);
  const auto sigma = DensityMatrix::from_bloch(0.9, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(max_measured_divergence(rho, sigma, {}, exec_of(state)).value);
}
BENCHMARK(BM_MeasuredDivergence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
