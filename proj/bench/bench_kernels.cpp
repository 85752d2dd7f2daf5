// Serial reference kernel against its OpenMP twin, plus the BDD fold that
// follows them in a traversal.
#include <benchmark/benchmark.h>

#include "relsynth/abstraction.hpp"
#include "relsynth/systems.hpp"

using namespace relsynth;

namespace {

struct Fixture {
  System sys;
  ComponentLayout lay;
  std::vector<SampleBox> boxes;

  Fixture(int bits, std::size_t component, const TraversalPlan& plan)
      : sys(make_dubins({.bits = {bits, bits, bits}})),
        lay(layout(*sys.space, sys.components.at(component))),
        boxes(plan_samples(lay, plan)) {}
};

void BM_evaluate_serial(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), 0, TraversalPlan::exhaustive());
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_samples_serial(f.sys.components[0], f.lay, f.boxes));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.boxes.size()));
}

void BM_evaluate_parallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), 0, TraversalPlan::exhaustive());
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_samples_parallel(f.sys.components[0], f.lay, f.boxes));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.boxes.size()));
}

void BM_random_rects_parallel(benchmark::State& state) {
  Fixture f(7, 0, TraversalPlan::random_rects(static_cast<std::size_t>(state.range(0)), 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_samples_parallel(f.sys.components[0], f.lay, f.boxes));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.boxes.size()));
}

void BM_traverse(benchmark::State& state) {
  System sys = make_dubins({.bits = {6, 6, 6}});
  TraversalPlan plan = TraversalPlan::exhaustive();
  plan.parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(traverse(*sys.space, sys.components[0], plan));
    sys.space->manager().collect_garbage();
  }
}

}  // namespace

BENCHMARK(BM_evaluate_serial)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_parallel)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_random_rects_parallel)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_traverse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
