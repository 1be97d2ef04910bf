#include <benchmark/benchmark.h>

#include "rmm/explorer.hpp"
#include "rmm/litmus.hpp"

namespace {

using namespace rmm;

const char* kTests[] = {"sb", "wrc", "own_early"};
const char* kModels[] = {"sc", "tso", "relaxed", "power"};

void BM_Explore(benchmark::State& state) {
  LitmusTest t = corpus_test(kTests[state.range(0)]);
  MemoryModel m = resolve_model(t, kModels[state.range(1)]);
  ExploreOptions o = options_for(t, {});
  std::size_t states = 0;
  for (auto _ : state) {
    ExplorationResult r = explore(t.initial_config(), m, o);
    states = r.stats.states_visited;
    benchmark::DoNotOptimize(r.outcomes.size());
  }
  state.SetLabel(t.name + "/" + m.name);
  state.counters["states"] = static_cast<double>(states);
  state.counters["states/s"] =
      benchmark::Counter(static_cast<double>(states) * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Explore)
    ->ArgsProduct({{0}, {0, 1, 2, 3}})
    ->Args({1, 0})
    ->Args({1, 3})
    ->Args({2, 1})
    ->Unit(benchmark::kMillisecond);

void BM_Strategy(benchmark::State& state) {
  LitmusTest t = corpus_test("sb");
  MemoryModel m = resolve_model(t, "relaxed");
  ExploreOptions o = state.range(0) == 0 ? ExploreOptions::brute() : options_for(t, {});
  if (state.range(0) == 2) o.strategy = Strategy::kPartitioned;
  for (auto _ : state) benchmark::DoNotOptimize(explore(t.initial_config(), m, o).stats.states_visited);
  state.SetLabel(state.range(0) == 0 ? "brute" : to_string(o.strategy));
}
BENCHMARK(BM_Strategy)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

// Canonical keys of configurations from the middle of an IRIW run.
void BM_Canonicalize(benchmark::State& state) {
  LitmusTest t = corpus_test("iriw");
  ClosureResult c = eager_local_closure(t.initial_config());
  std::vector<RelaxedConfig> configs;
  for (const ClosureItem& item : c.maximal) configs.push_back(item.config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(canonicalize(configs[i]));
    i = (i + 1) % configs.size();
  }
}
BENCHMARK(BM_Canonicalize);

void BM_StepAll(benchmark::State& state) {
  LitmusTest t = corpus_test("iriw");
  MemoryModel m = resolve_model(t, "power");
  RelaxedConfig c = eager_local_closure(t.initial_config()).maximal.front().config;
  for (auto _ : state) benchmark::DoNotOptimize(step_all(c, m).size());
}
BENCHMARK(BM_StepAll);

void BM_ValidateModel(benchmark::State& state) {
  MemoryModel m = builtin_model("power");
  for (auto _ : state) benchmark::DoNotOptimize(validate_model(m, 1000).passed());
}
BENCHMARK(BM_ValidateModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
