// Micro-benchmarks: TT(1), TT(k) and TT(full) of the enumerator, and the
// join-first baseline, on generated instances.
//
//   anyk_benchmarks --benchmark_filter=Path4

#include <benchmark/benchmark.h>

#include "anyk/bench.hpp"
#include "anyk/engine.hpp"

namespace {

using namespace anyk;

Instance path4(std::int64_t tuples, const char* spec = "sum") {
  auto inst = uniform_instance(Shape::Path, 4, static_cast<std::size_t>(tuples), static_cast<std::size_t>(tuples / 5));
  apply_spec(inst, spec);
  return inst;
}

void BM_Path4_TTk(benchmark::State& state) {
  const auto inst = path4(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  std::size_t emitted = 0;
  for (auto _ : state) {
    auto s = enumerate(inst.query, inst.db, k);
    while (s.advance()) {
    }
    emitted = s.emitted();
  }
  state.counters["answers"] = static_cast<double>(emitted);
}
BENCHMARK(BM_Path4_TTk)
    ->ArgsProduct({{1000, 4000}, {1, 1000, 1 << 30}})
    ->Unit(benchmark::kMillisecond);

void BM_Path4_JoinFirst(benchmark::State& state) {
  const auto inst = path4(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(join_first(inst.query, inst.db));
}
BENCHMARK(BM_Path4_JoinFirst)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Path4_Lex(benchmark::State& state) {
  const auto inst = path4(state.range(0), "lex");
  for (auto _ : state) {
    auto s = enumerate(inst.query, inst.db);
    while (s.advance()) {
    }
  }
}
BENCHMARK(BM_Path4_Lex)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_WorstCase3_TT1(benchmark::State& state) {
  const auto inst = worst_case_path3(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = enumerate(inst.query, inst.db);
    benchmark::DoNotOptimize(s.advance());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WorstCase3_TT1)->RangeMultiplier(2)->Range(1 << 12, 1 << 15)->Complexity()->Unit(benchmark::kMicrosecond);

void BM_WorstCase3_Full(benchmark::State& state) {
  const auto inst = worst_case_path3(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = enumerate(inst.query, inst.db);
    while (s.advance()) {
    }
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WorstCase3_Full)->RangeMultiplier(2)->Range(1 << 9, 1 << 12)->Complexity()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
