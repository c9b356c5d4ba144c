#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "excl/dataset.hpp"
#include "excl/greedy.hpp"
#include "excl/pipeline.hpp"
#include "excl/union_test.hpp"

namespace {

excl::AlterationMatrix random_matrix(int m, int n, int groups, std::uint64_t seed) {
  excl::NullSpec spec;
  for (int g = 0; g < groups; ++g)
    spec.groups.emplace_back("g" + std::to_string(g), n / groups);
  std::mt19937_64 rng(seed);
  const int per_group = n / groups;
  for (int i = 0; i < m; ++i) {
    std::vector<int> margins;
    for (int g = 0; g < groups; ++g)
      margins.push_back(per_group / 10 + static_cast<int>(rng() % (per_group / 3)));
    spec.margins.push_back(std::move(margins));
  }
  return excl::simulate_null(spec, seed);
}

void BM_CoverageQuery(benchmark::State& state) {
  auto mat = random_matrix(100, static_cast<int>(state.range(0)), 4, 1);
  const excl::AlterationSet members = {3, 17, 42, 71};
  for (auto _ : state) benchmark::DoNotOptimize(mat.coverage(members));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CoverageQuery)->Arg(500)->Arg(5000)->Arg(50000);

void BM_PairTail(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int covs[] = {n / 5, n / 4};
  for (auto _ : state)
    benchmark::DoNotOptimize(excl::upper_p(n, covs, n / 5 + n / 4 - n / 20));
}
BENCHMARK(BM_PairTail)->Arg(100)->Arg(1000)->Arg(10000);

void BM_UnionConvolution(benchmark::State& state) {
  const int n = 500;
  const int size = static_cast<int>(state.range(0));
  std::vector<int> covs(size);
  for (int i = 0; i < size; ++i) covs[i] = 60 + 10 * i;
  int gamma = 0;
  for (int c : covs) gamma += c;
  gamma = std::min(n, gamma) - size;  // near-perfect exclusivity
  for (auto _ : state) benchmark::DoNotOptimize(excl::upper_p(n, covs, gamma));
}
BENCHMARK(BM_UnionConvolution)->DenseRange(3, 8);

void BM_GreedyCandidates(benchmark::State& state) {
  auto mat = random_matrix(static_cast<int>(state.range(0)), 400, 2, 2);
  for (auto _ : state) {
    auto pool = excl::generate_candidates(mat, {100, 4});
    benchmark::DoNotOptimize(pool.sets.size());
  }
}
BENCHMARK(BM_GreedyCandidates)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_FullPipeline(benchmark::State& state) {
  auto mat = random_matrix(30, 200, 2, 3);
  excl::RunConfig cfg;
  cfg.k_max = 5;
  cfg.max_iter = 200;
  cfg.seed = 1;
  for (auto _ : state) {
    auto report = excl::run_on_matrix(mat, cfg);
    benchmark::DoNotOptimize(report.scored.size());
  }
}
BENCHMARK(BM_FullPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
