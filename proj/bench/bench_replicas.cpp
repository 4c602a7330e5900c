// Serial reference against OpenMP replicas on the same workloads. Arg 0 runs
// the serial path; Arg n > 0 runs the parallel path on n threads.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "ffgrad/oracle.hpp"
#include "ffgrad/random_cluster.hpp"
#include "ffgrad/replicas.hpp"
#include "ffgrad/rng.hpp"
#include "ffgrad/superimposed.hpp"

using namespace ffgrad;

namespace {

constexpr long kReplicas = 64;

void set_threads(const benchmark::State& state) {
  if (state.range(0) > 0) omp_set_num_threads(static_cast<int>(state.range(0)));
}

void BM_FkCftp(benchmark::State& state) {
  set_threads(state);
  WindowPtr w = Window::box({16, 16}, Shell::Wired);
  const FkParams params{0.55, 2.0};
  for (auto _ : state) {
    auto out = run_replicas(
        kReplicas, [&](long i) { return fk_cftp(w, params, derive_seed(7, uint64_t(i))).num_open(); },
        state.range(0) > 0);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * kReplicas);
}

void BM_SiCftp(benchmark::State& state) {
  set_threads(state);
  SiDomainPtr dom = SiDomain::diamond(diamond(Coord{0, 0}, 6), SiBoundary::WiredWired);
  const SiParams params{4.5, 2.0};
  for (auto _ : state) {
    auto out = run_replicas(
        kReplicas, [&](long i) { return si_open_crosses(si_cftp(dom, params, derive_seed(7, uint64_t(i)))); },
        state.range(0) > 0);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * kReplicas);
}

// Prefix-partitioned enumeration against its serial reference.
void BM_EnumerateSpin(benchmark::State& state) {
  set_threads(state);
  DiamondDomain dom = diamond(Coord{0, 0}, 4);
  for (auto _ : state) {
    auto t = enumerate_spin(dom, 1, 1, Rational(5), state.range(0) > 0);
    benchmark::DoNotOptimize(t.Z);
  }
}

}  // namespace

BENCHMARK(BM_FkCftp)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SiCftp)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnumerateSpin)->Arg(0)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);

BENCHMARK_MAIN();
