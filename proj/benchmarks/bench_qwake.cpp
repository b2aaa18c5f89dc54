#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>

#include "qwake/advice.hpp"
#include "qwake/lowerbound.hpp"
#include "qwake/qsearch.hpp"
#include "qwake/scheduler.hpp"

using namespace qwake;

namespace {

void BM_QuantumSearchOneMarked(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  SearchSpec spec;
  spec.range.resize(size);
  std::iota(spec.range.begin(), spec.range.end(), Port{1});
  spec.marked = [](Port p) { return p == 1; };
  spec.n_global = size;
  Rng rng(1);
  std::uint64_t calls = 0;
  for (auto _ : state) {
    const auto t = quantum_search(spec, rng);
    calls += t.oracle_calls;
    benchmark::DoNotOptimize(t.result);
  }
  state.counters["calls"] = benchmark::Counter(static_cast<double>(calls), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_QuantumSearchOneMarked)->RangeMultiplier(4)->Range(16, 4096);

void BM_WakeupClique(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int alpha = static_cast<int>(state.range(1));
  const auto net = complete_graph(n, 7);
  const WakeConfig wake({0}, n);
  WakeupParams params;
  params.keep_round_ledger = false;
  std::uint64_t seed = 0, messages = 0;
  for (auto _ : state) {
    const auto t = run_with_oracle(net, wake, alpha, params, ++seed);
    messages += t.ledger.total();
  }
  state.counters["messages"] =
      benchmark::Counter(static_cast<double>(messages), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_WakeupClique)
    ->ArgsProduct({{32, 128, 512}, {0, 5}})
    ->Unit(benchmark::kMillisecond);

void BM_WakeupRandomGraph(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = random_connected_graph(n, 8.0 / static_cast<double>(n), 3);
  const WakeConfig wake({0}, n);
  WakeupParams params;
  params.keep_round_ledger = false;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_with_oracle(net, wake, 3, params, ++seed));
}
BENCHMARK(BM_WakeupRandomGraph)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_Flood(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = complete_graph(n);
  for (auto _ : state) benchmark::DoNotOptimize(baseline_flood(net, WakeConfig({0}, n)));
}
BENCHMARK(BM_Flood)->RangeMultiplier(4)->Range(32, 512);

void BM_EpochPlanAndAdvice(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = random_connected_graph(n, 0.05, 11);
  const WakeConfig wake({0}, n);
  for (auto _ : state) {
    const auto plan = compute_epoch_plan(net, wake);
    benchmark::DoNotOptimize(assign_advice(net, plan, 7));
  }
}
BENCHMARK(BM_EpochPlanAndAdvice)->RangeMultiplier(4)->Range(64, 4096);

void BM_RoutingRound(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mu = static_cast<std::uint32_t>(state.range(1));
  const auto inst = build_hidden_matching_graph(n, random_perfect_matching(n, 5), complete_graph(n, 6));
  const lb::RegisterLayout layout(inst.network, mu);
  // Two branches, each with mu sends from distinct centers.
  const double half = 1.0 / std::sqrt(2.0);
  std::vector<lb::Branch> branches(2);
  for (std::size_t b = 0; b < 2; ++b) {
    branches[b].amplitude = half;
    branches[b].memory = {{0, static_cast<std::int32_t>(b)}};
    for (std::uint32_t t = 0; t < mu; ++t)
      branches[b].sends.push_back({static_cast<Node>(t), static_cast<Port>(1 + b),
                                   lb::make_token(static_cast<int>(t + 1), false)});
  }
  const auto prepared = lb::prepare_round(layout, branches);
  const std::vector<bool> asleep(2 * n, false);
  for (auto _ : state) {
    lb::PermutationOracle oracle(inst.matching);
    benchmark::DoNotOptimize(lb::simulate_routing_round(layout, prepared, oracle, inst.clique, asleep));
  }
}
BENCHMARK(BM_RoutingRound)->ArgsProduct({{6, 16, 32}, {1, 3}});

}  // namespace

BENCHMARK_MAIN();
