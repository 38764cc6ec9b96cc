#include <benchmark/benchmark.h>

#include <cstdint>

#include "invsamp/bernoulli_exact.hpp"
#include "invsamp/scalar_kernels.hpp"
#include "invsamp/sim_harness.hpp"
#include "invsamp/thresholds.hpp"

namespace {

void BM_phi(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::phi(x));
    x = x == 0.1 ? 0.2 : 0.1;
  }
}
BENCHMARK(BM_phi);

void BM_q_tilde(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::q_tilde(0.1, 800.0));
  }
}
BENCHMARK(BM_q_tilde);

void BM_solve_gamma_tilde(benchmark::State& state) {
  const invsamp::PrecisionSpec spec{0.1, 0.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::solve_gamma_tilde(spec));
  }
}
BENCHMARK(BM_solve_gamma_tilde);

void BM_negbin_cdf(benchmark::State& state) {
  const invsamp::NegBinomialParams params{758, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::negbin_cdf(params, 7000));
  }
}
BENCHMARK(BM_negbin_cdf);

void BM_coverage_probability(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::coverage_probability(
        758, 0.1, 0.1, invsamp::Estimator::mvue));
  }
}
BENCHMARK(BM_coverage_probability);

void BM_candidate_set(benchmark::State& state) {
  const invsamp::CoverageQuery query{50, 0.2, invsamp::Estimator::mvue, 0.1, 0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::candidate_set(query));
  }
}
BENCHMARK(BM_candidate_set);

void BM_min_coverage(benchmark::State& state) {
  const invsamp::CoverageQuery query{50, 0.2, invsamp::Estimator::mvue, 0.1, 0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::min_coverage(query));
  }
}
BENCHMARK(BM_min_coverage);

void BM_run_batch(benchmark::State& state) {
  const invsamp::BoundedDistribution dist = invsamp::Bernoulli{0.5};
  const invsamp::PrecisionSpec spec{0.1, 0.05};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invsamp::run_batch(
        dist, 20.0, spec, invsamp::Estimator::mvue, 200, seed++));
  }
}
BENCHMARK(BM_run_batch);

}  // namespace

BENCHMARK_MAIN();
