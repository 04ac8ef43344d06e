#include <benchmark/benchmark.h>

#include "treeload/ensemble.hpp"
#include "treeload/oracle.hpp"
#include "treeload/table.hpp"

using namespace treeload;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

void set_label(benchmark::State& st) { st.SetLabel(st.range(0) == 0 ? "serial" : "parallel"); }

void BM_Ensemble(benchmark::State& st) {
  EnsembleConfig c;
  c.params.alpha = 0.5;
  c.size = static_cast<std::uint64_t>(st.range(1));
  c.reps = 8;
  c.seed = 3;
  for (auto _ : st) benchmark::DoNotOptimize(run_ensemble(c, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.size * c.reps));
  set_label(st);
}
BENCHMARK(BM_Ensemble)->ArgsProduct({{0, 1}, {100000, 1000000}})->Unit(benchmark::kMillisecond);

void BM_TabulateJoint(benchmark::State& st) {
  ModelParams p;
  p.alpha = 0.5;
  TableRange r;
  for (auto _ : st)
    benchmark::DoNotOptimize(tabulate(DistKind::joint, p, NetworkTime::finite(st.range(1)), r, exec_of(st)));
  set_label(st);
}
BENCHMARK(BM_TabulateJoint)->ArgsProduct({{0, 1}, {100, 200}})->Unit(benchmark::kMillisecond);

void BM_Enumerate(benchmark::State& st) {
  const ModelParams p = ModelParams::from_ratio(1, 3);
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_histories(p, st.range(1), exec_of(st)));
  set_label(st);
}
BENCHMARK(BM_Enumerate)->ArgsProduct({{0, 1}, {6, 7}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
