// Serial reference vs OpenMP replication runner over the same seeds.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "portsim/experiments.hpp"

using namespace portsim;

namespace {

const char* const kPresets[] = {"baseline", "opt1_p20", "opt2_cars100_k2"};

void run_set(benchmark::State& state, Execution exec) {
  const ScenarioSpec spec = preset(kPresets[state.range(0)]);
  const auto seeds = parse_seed_list("1..20");
  for (auto _ : state) {
    auto summaries = run_replications(spec, seeds, exec);
    benchmark::DoNotOptimize(summaries.data());
  }
  state.SetLabel(spec.label);
  state.counters["runs/s"] =
      benchmark::Counter(static_cast<double>(seeds.size()), benchmark::Counter::kIsIterationInvariantRate);
  state.counters["threads"] = exec == Execution::Parallel ? omp_get_max_threads() : 1;
}

void BM_Serial(benchmark::State& state) { run_set(state, Execution::Serial); }
void BM_Parallel(benchmark::State& state) { run_set(state, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_Serial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
