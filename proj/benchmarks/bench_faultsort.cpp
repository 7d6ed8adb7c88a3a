#include <benchmark/benchmark.h>

#include "faultsort/basket_sort.hpp"
#include "faultsort/fault_model.hpp"
#include "faultsort/harness.hpp"
#include "faultsort/noisy_search.hpp"
#include "faultsort/riffle_sort.hpp"
#include "faultsort/rng.hpp"

namespace {

using namespace faultsort;

void BM_Observe(benchmark::State& state) {
  FaultModel model(0.05, 0.05, 1);
  std::int64_t x = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.observe(x, x + 1));
    x = (x + 1) & 0xFFFFF;
    if (x == 0) x = 1;
  }
}
BENCHMARK(BM_Observe);

void BM_BasketRound(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const std::int64_t w = 64;
  FaultModel model(0.05, 0.05, 2);
  SplitRng rng(3);
  const Sequence input = near_sorted_permutation(n, w, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(basket_round(model, input, w));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BasketRound)->Arg(1 << 12)->Arg(1 << 14);

void BM_NoisySearch(benchmark::State& state) {
  const std::int64_t m = state.range(0);
  std::vector<std::int64_t> items(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) items[static_cast<std::size_t>(i)] = 2 * (i + 1);
  const Sequence seq{std::move(items)};
  seq.ensure_index();
  FaultModel model(0.1, 0.1, 4);
  const std::int64_t d = ceil_ln(m);
  const WalkParams params = build_params(m, model.p(), d, RunMode::practical);
  SplitRng rng(5);
  for (auto _ : state) {
    const std::int64_t x = 2 * static_cast<std::int64_t>(sample_uniform_int(rng, m + 1)) + 1;
    benchmark::DoNotOptimize(noisy_search(model, seq, x, d, params));
  }
}
BENCHMARK(BM_NoisySearch)->Arg(1 << 14)->Arg(1 << 17);

void BM_RiffleSort(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  FaultModel model(0.05, 0.05, 6);
  RiffleConfig config;
  config.rng_seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(riffle_sort(model, Sequence::identity(n), config));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RiffleSort)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
