#include <benchmark/benchmark.h>

#include "churnkit/churnkit.hpp"

namespace {

churnkit::Cohort make_cohort(int n, std::uint64_t seed, bool censored) {
  churnkit::SimSpec spec;
  spec.family = churnkit::make_weibull(0.5, 1.3);
  spec.n = n;
  spec.seed = seed;
  if (censored) spec.censor_time = 3.0;
  return churnkit::simulate_cohort(spec);
}

void BM_BuildEventTable(benchmark::State& state) {
  const churnkit::Cohort cohort = make_cohort(static_cast<int>(state.range(0)), 1, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(churnkit::build_event_table(cohort));
  }
}
BENCHMARK(BM_BuildEventTable)->Arg(1000)->Arg(100000);

void BM_KaplanMeier(benchmark::State& state) {
  const churnkit::Cohort cohort = make_cohort(static_cast<int>(state.range(0)), 2, true);
  const auto table = churnkit::build_event_table(cohort);
  for (auto _ : state) {
    benchmark::DoNotOptimize(churnkit::kaplan_meier(table, 0.95));
  }
}
BENCHMARK(BM_KaplanMeier)->Arg(1000)->Arg(100000);

void BM_FitWeibull(benchmark::State& state) {
  const churnkit::Cohort cohort = make_cohort(static_cast<int>(state.range(0)), 3, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(churnkit::fit_mle(churnkit::FamilyKind::Weibull, cohort, 0.95));
  }
}
BENCHMARK(BM_FitWeibull)->Arg(1000)->Arg(20000);

void BM_LogRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const churnkit::Cohort control = make_cohort(n, 4, true);
  const churnkit::Cohort test = make_cohort(n, 5, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(churnkit::logrank(control, test));
  }
}
BENCHMARK(BM_LogRank)->Arg(1000)->Arg(50000);

void BM_KernelHazard(benchmark::State& state) {
  const churnkit::Cohort cohort = make_cohort(10000, 6, true);
  const auto table = churnkit::build_event_table(cohort);
  churnkit::KernelSpec spec;
  spec.kind = churnkit::KernelKind::Epanechnikov;
  spec.bandwidth = churnkit::default_bandwidth(table);
  const auto grid = churnkit::default_grid(table, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(churnkit::kernel_hazard(table, spec, grid));
  }
}
BENCHMARK(BM_KernelHazard)->Arg(256);

void BM_SimulateCohort(benchmark::State& state) {
  churnkit::SimSpec spec;
  spec.family = churnkit::make_lognormal(0.5, 1.2);
  spec.n = static_cast<int>(state.range(0));
  spec.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(churnkit::simulate_cohort(spec));
  }
}
BENCHMARK(BM_SimulateCohort)->Arg(10000);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
