#include "invsamp/sim_harness.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "invsamp/bernoulli_exact.hpp"
#include "invsamp/scalar_kernels.hpp"
#include "invsamp/seq_engine.hpp"
#include "invsamp/thresholds.hpp"
#include "support/oracles.hpp"

using invsamp::Bernoulli;
using invsamp::BetaLike;
using invsamp::BoundedDistribution;
using invsamp::DiscreteOnUnit;
using invsamp::Estimator;
using invsamp::PrecisionSpec;
using invsamp::RunOptions;
using invsamp::ScaledBinomial;
using invsamp::TailSide;
using invsamp::TrialBatchResult;

namespace {

double mc_sigma(double prob, double trials) {
  return std::sqrt(prob * (1.0 - prob) / trials);
}

double hist_sd(const TrialBatchResult& result) {
  double var = 0.0;
  for (const auto& [n, count] : result.histogram) {
    const double d = static_cast<double>(n) - result.n_mean;
    var += d * d * static_cast<double>(count);
  }
  return std::sqrt(var / static_cast<double>(result.trials));
}

std::uint64_t hist_total(const TrialBatchResult& result) {
  std::uint64_t total = 0;
  for (const auto& [n, count] : result.histogram) total += count;
  return total;
}

bool same_result(const TrialBatchResult& a, const TrialBatchResult& b) {
  return a.trials == b.trials && a.successes == b.successes &&
         a.coverage == b.coverage && a.n_mean == b.n_mean &&
         a.n_min == b.n_min && a.n_max == b.n_max && a.seed == b.seed &&
         a.histogram == b.histogram;
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(invsamp::validate(BoundedDistribution{Bernoulli{0.0}}));
  CHECK_NOTHROW(invsamp::validate(BoundedDistribution{Bernoulli{1.0}}));
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{Bernoulli{-0.1}}),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{Bernoulli{1.1}}),
                  std::domain_error);

  CHECK_NOTHROW(invsamp::validate(BoundedDistribution{ScaledBinomial{2, 0.5}}));
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{ScaledBinomial{1, 0.5}}),
                  std::domain_error);
  CHECK_THROWS_AS(
      invsamp::validate(BoundedDistribution{ScaledBinomial{8, 1.2}}),
      std::domain_error);

  CHECK_NOTHROW(invsamp::validate(
      BoundedDistribution{DiscreteOnUnit{{0.0, 1.0}, {0.5, 0.5}}}));
  CHECK_THROWS_AS(
      invsamp::validate(BoundedDistribution{DiscreteOnUnit{{}, {}}}),
      std::domain_error);
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{
                      DiscreteOnUnit{{0.5}, {0.5, 0.5}}}),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{
                      DiscreteOnUnit{{-0.1, 0.5}, {0.5, 0.5}}}),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{
                      DiscreteOnUnit{{0.1, 0.5}, {-0.2, 1.2}}}),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{
                      DiscreteOnUnit{{0.1, 0.5}, {0.3, 0.3}}}),
                  std::domain_error);

  CHECK_NOTHROW(invsamp::validate(BoundedDistribution{BetaLike{2.0, 3.0}}));
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{BetaLike{0.0, 3.0}}),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::validate(BoundedDistribution{BetaLike{2.0, -1.0}}),
                  std::domain_error);
}

TEST_CASE("mean_of all families") {
  CHECK(invsamp::mean_of(BoundedDistribution{Bernoulli{0.37}}) == 0.37);
  CHECK(invsamp::mean_of(BoundedDistribution{ScaledBinomial{8, 0.05}}) == 0.05);
  CHECK(invsamp::mean_of(BoundedDistribution{
            DiscreteOnUnit{{0.2, 0.8}, {0.5, 0.5}}}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(invsamp::mean_of(BoundedDistribution{BetaLike{2.0, 3.0}}) ==
        doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("run_batch: input validation") {
  const PrecisionSpec spec{0.1, 0.05};
  CHECK_THROWS_AS(invsamp::run_batch(BoundedDistribution{Bernoulli{0.5}}, 10.0,
                                     spec, Estimator::mvue, 0, 1),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::run_batch(BoundedDistribution{Bernoulli{0.5}}, 1.0,
                                     spec, Estimator::mvue, 10, 1),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::run_batch(BoundedDistribution{Bernoulli{1.5}}, 10.0,
                                     spec, Estimator::mvue, 10, 1),
                  std::domain_error);
  CHECK_THROWS_AS(invsamp::run_batch(BoundedDistribution{Bernoulli{0.5}}, 10.0,
                                     PrecisionSpec{0.0, 0.05}, Estimator::mvue,
                                     10, 1),
                  std::domain_error);
}

TEST_CASE("run_batch: coverage at the solved two-sided threshold") {
  const PrecisionSpec spec{0.1, 0.05};
  REQUIRE(std::ceil(invsamp::solve_gamma_hat(spec)) == 758.0);
  const auto result = invsamp::run_batch(BoundedDistribution{Bernoulli{0.5}},
                                         758.0, spec, Estimator::mvue, 20000, 1);
  CHECK(result.trials == 20000);
  CHECK(result.seed == 1);
  CHECK(result.coverage ==
        static_cast<double>(result.successes) / 20000.0);
  CHECK(result.coverage >= 0.95 - 3.0 * mc_sigma(0.95, 20000.0));
  CHECK(result.n_min >= 758);
  CHECK(result.n_max >= result.n_min);
  CHECK(hist_total(result) == result.trials);

  const double exact =
      invsamp::coverage_probability(758, 0.1, 0.5, Estimator::mvue);
  CHECK(exact > 0.95);
  CHECK(std::fabs(result.coverage - exact) <= 4.0 * mc_sigma(exact, 20000.0));

  const auto bracket = invsamp::expected_n_bracket(758.0, 0.5);
  const double se = hist_sd(result) / std::sqrt(20000.0);
  CHECK(result.n_mean >= bracket.first - 3.0 * se);
  CHECK(result.n_mean <= bracket.second + 3.0 * se);
}

TEST_CASE("run_batch: deterministic replay, including a single trial") {
  const PrecisionSpec spec{0.2, 0.1};
  const BoundedDistribution dist{Bernoulli{0.3}};
  const auto single_a =
      invsamp::run_batch(dist, 7.0, spec, Estimator::mle, 1, 99);
  const auto single_b =
      invsamp::run_batch(dist, 7.0, spec, Estimator::mle, 1, 99);
  CHECK(same_result(single_a, single_b));
  CHECK(single_a.n_min == single_a.n_max);
  CHECK(single_a.n_mean == static_cast<double>(single_a.n_min));

  const auto batch_a =
      invsamp::run_batch(dist, 20.0, spec, Estimator::mvue, 20000, 7);
  const auto batch_b =
      invsamp::run_batch(dist, 20.0, spec, Estimator::mvue, 20000, 7);
  CHECK(same_result(batch_a, batch_b));

  const auto other_seed =
      invsamp::run_batch(dist, 20.0, spec, Estimator::mvue, 20000, 8);
  CHECK_FALSE(same_result(batch_a, other_seed));
}

TEST_CASE("run_batch: thread count never changes the aggregate") {
  const PrecisionSpec spec{0.1, 0.05};
  const BoundedDistribution dist{Bernoulli{0.3}};
  const auto base = invsamp::run_batch(dist, 50.0, spec, Estimator::mvue, 5000,
                                       42, RunOptions{});
  for (const unsigned threads : {2u, 5u, 8u}) {
    const auto alt = invsamp::run_batch(dist, 50.0, spec, Estimator::mvue, 5000,
                                        42, RunOptions{.threads = threads});
    CHECK(same_result(base, alt));
  }
}

TEST_CASE("run_batch: mean stopping time sits in the unit bracket") {
  const PrecisionSpec spec{0.1, 0.05};
  const auto result = invsamp::run_batch(BoundedDistribution{Bernoulli{0.1}},
                                         10.0, spec, Estimator::mle, 20000, 11);
  const double se = hist_sd(result) / std::sqrt(20000.0);
  CHECK(result.n_mean >= 100.0 - 3.0 * se);
  CHECK(result.n_mean <= 101.0 + 3.0 * se);
}

TEST_CASE("run_batch: empirical coverage tracks the exact coverage") {
  const PrecisionSpec spec{0.2, 0.1};
  const auto result = invsamp::run_batch(BoundedDistribution{Bernoulli{0.1}},
                                         10.0, spec, Estimator::mvue, 1000000,
                                         314159);
  const double exact =
      invsamp::coverage_probability(10, 0.2, 0.1, Estimator::mvue);
  CHECK(std::fabs(result.coverage - exact) <=
        4.0 * mc_sigma(exact, 1000000.0));
}

TEST_CASE("run_batch: minimum thresholds deliver their guarantee per cell") {
  struct Cell {
    double p;
    double eps;
    double delta;
    std::int64_t want_gamma;
  };
  const std::vector<Cell> cells = {
      {0.02, 0.1, 0.05, 377}, {0.1, 0.1, 0.05, 347}, {0.5, 0.1, 0.05, 194},
      {0.02, 0.2, 0.1, 66},   {0.1, 0.2, 0.1, 61},   {0.5, 0.2, 0.1, 35},
  };
  std::uint64_t seed = 101;
  for (const auto& cell : cells) {
    const std::int64_t gamma = invsamp::minimum_gamma(
        cell.eps, cell.delta, cell.p, cell.p, Estimator::mvue);
    CHECK(gamma == cell.want_gamma);
    const double exact = invsamp::coverage_probability(gamma, cell.eps, cell.p,
                                                       Estimator::mvue);
    CHECK(exact > 1.0 - cell.delta);

    const auto result = invsamp::run_batch(
        BoundedDistribution{Bernoulli{cell.p}}, static_cast<double>(gamma),
        PrecisionSpec{cell.eps, cell.delta}, Estimator::mvue, 20000, seed++);
    CHECK(std::fabs(result.coverage - exact) <=
          4.0 * mc_sigma(exact, 20000.0));

    const auto bracket =
        invsamp::expected_n_bracket(static_cast<double>(gamma), cell.p);
    const double se = hist_sd(result) / std::sqrt(20000.0);
    CHECK(result.n_mean >= bracket.first - 3.0 * se);
    CHECK(result.n_mean <= bracket.second + 3.0 * se);
  }
}

TEST_CASE("run_batch: solved threshold covers the block-mean family") {
  for (const auto& spec : {PrecisionSpec{0.1, 0.05}, PrecisionSpec{0.2, 0.1}}) {
    const double gamma = std::ceil(invsamp::solve_gamma_hat(spec));
    const auto result =
        invsamp::run_batch(BoundedDistribution{ScaledBinomial{8, 0.05}}, gamma,
                           spec, Estimator::mvue, 20000, 2024);
    CHECK(result.coverage >=
          1.0 - spec.delta - 3.0 * mc_sigma(1.0 - spec.delta, 20000.0));
    const auto bracket = invsamp::expected_n_bracket(gamma, 0.05);
    const double se = hist_sd(result) / std::sqrt(20000.0);
    CHECK(result.n_mean >= bracket.first - 3.0 * se);
    CHECK(result.n_mean <= bracket.second + 3.0 * se);
  }
}

TEST_CASE("run_batch: endpoint-valued samples are legal") {
  const auto result = invsamp::run_batch(
      BoundedDistribution{DiscreteOnUnit{{0.0, 1.0}, {0.5, 0.5}}}, 5.0,
      PrecisionSpec{0.5, 0.2}, Estimator::mvue, 100, 5);
  CHECK(result.trials == 100);
  CHECK(result.n_min >= 5);
}

TEST_CASE("run_batch: beta-like stream at the solved threshold") {
  const PrecisionSpec spec{0.2, 0.1};
  const double gamma = std::ceil(invsamp::solve_gamma_hat(spec));
  const auto result = invsamp::run_batch(BoundedDistribution{BetaLike{2.0, 3.0}},
                                         gamma, spec, Estimator::mvue, 5000,
                                         77);
  CHECK(result.coverage >=
        1.0 - spec.delta - 3.0 * mc_sigma(1.0 - spec.delta, 5000.0));
  const auto bracket = invsamp::expected_n_bracket(gamma, 0.4);
  const double se = hist_sd(result) / std::sqrt(5000.0);
  CHECK(result.n_mean >= bracket.first - 3.0 * se);
  CHECK(result.n_mean <= bracket.second + 3.0 * se);
}

TEST_CASE("ber_demo: explicit-threshold guarantee at the pinned block size") {
  const PrecisionSpec spec{0.1, 0.05};
  const auto result = invsamp::ber_demo(8, 0.01, spec, 5000, 4242);
  CHECK(result.coverage >= 0.95 - 3.0 * mc_sigma(0.95, 5000.0));
  CHECK(result.n_min >= 839);
  const auto bracket =
      invsamp::expected_n_bracket(invsamp::explicit_gamma(spec), 0.01);
  const double se = hist_sd(result) / std::sqrt(5000.0);
  CHECK(result.n_mean >= bracket.first - 3.0 * se);
  CHECK(result.n_mean <= bracket.second + 3.0 * se);
}

TEST_CASE("ber_demo: small blocks and input checks") {
  const PrecisionSpec spec{0.1, 0.05};
  const auto result = invsamp::ber_demo(2, 0.5, spec, 20000, 99);
  CHECK(result.coverage >= 0.95 - 3.0 * mc_sigma(0.95, 20000.0));
  CHECK_THROWS_AS(invsamp::ber_demo(1, 0.5, spec, 100, 1), std::domain_error);

  bool caught = false;
  try {
    invsamp::ber_demo(8, 0.0, spec, 1, 1, RunOptions{.cap = 2000});
  } catch (const invsamp::cap_exceeded_error& e) {
    caught = true;
    CHECK(e.cap() == 2000);
    REQUIRE(e.trial_index().has_value());
    CHECK(*e.trial_index() == 0);
  }
  CHECK(caught);
}

TEST_CASE("tail_empirics: validation") {
  const BoundedDistribution dist{Bernoulli{0.1}};
  const std::array<double, 1> bad_rho = {0.0};
  CHECK_THROWS_AS(
      invsamp::tail_empirics(dist, 20.0, bad_rho, TailSide::upper, 100, 1),
      std::domain_error);
  const std::array<double, 1> neg_rho = {-0.5};
  CHECK_THROWS_AS(
      invsamp::tail_empirics(dist, 20.0, neg_rho, TailSide::upper, 100, 1),
      std::domain_error);
  const std::array<double, 1> ok_rho = {0.5};
  CHECK_THROWS_AS(
      invsamp::tail_empirics(dist, 20.0, ok_rho, TailSide::upper, 0, 1),
      std::domain_error);
  CHECK_THROWS_AS(
      invsamp::tail_empirics(dist, 1.0, ok_rho, TailSide::upper, 100, 1),
      std::domain_error);
  const std::array<double, 0> empty{};
  CHECK(invsamp::tail_empirics(dist, 20.0, empty, TailSide::upper, 100, 1)
            .empty());
}

TEST_CASE("tail_empirics: Bernoulli upper tail against bound and exact") {
  const BoundedDistribution dist{Bernoulli{0.1}};
  const std::array<double, 3> rhos = {0.2, 0.5, 1.0};
  const auto points =
      invsamp::tail_empirics(dist, 20.0, rhos, TailSide::upper, 100000, 6001);
  REQUIRE(points.size() == 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].rho == rhos[i]);
    CHECK(points[i].bound ==
          invsamp::bernoulli_sample_size_tails(20, 0.1, rhos[i],
                                               TailSide::upper));
    CHECK(points[i].empirical <=
          points[i].bound + 3.0 * mc_sigma(points[i].bound, 100000.0));
    // Smallest integer n with n >= gamma*(1+rho)/p, as failures past gamma.
    const auto n_lo = static_cast<std::int64_t>(
        std::ceil(20.0 * (1.0 + rhos[i]) / 0.1));
    const double exact = 1.0 - invsamp::negbin_cdf({20, 0.1}, n_lo - 20 - 1);
    CHECK(std::fabs(points[i].empirical - exact) <=
          4.0 * mc_sigma(exact, 100000.0) + 1e-9);
    CHECK(points[i].bound >= exact - 1e-12);
  }
}

TEST_CASE("tail_empirics: Bernoulli lower tail against bound and exact") {
  const BoundedDistribution dist{Bernoulli{0.1}};
  const std::array<double, 2> rhos = {0.2, 0.4};
  const auto points =
      invsamp::tail_empirics(dist, 20.0, rhos, TailSide::lower, 100000, 6002);
  REQUIRE(points.size() == 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].bound ==
          invsamp::bernoulli_sample_size_tails(20, 0.1, rhos[i],
                                               TailSide::lower));
    CHECK(points[i].empirical <=
          points[i].bound + 3.0 * mc_sigma(points[i].bound, 100000.0));
    // Largest integer n with n <= gamma*(1-rho)/p, as failures past gamma.
    const auto n_hi = static_cast<std::int64_t>(
        std::floor(20.0 * (1.0 - rhos[i]) / 0.1));
    const double exact = invsamp::negbin_cdf({20, 0.1}, n_hi - 20);
    CHECK(std::fabs(points[i].empirical - exact) <=
          4.0 * mc_sigma(exact, 100000.0) + 1e-9);
    CHECK(points[i].bound >= exact - 1e-12);
  }
}

TEST_CASE("tail_empirics: lower-tail bound degenerates to one at rho >= 1-p") {
  const BoundedDistribution dist{Bernoulli{0.5}};
  const std::array<double, 2> rhos = {0.4, 0.5};
  const auto points =
      invsamp::tail_empirics(dist, 10.0, rhos, TailSide::lower, 20000, 6003);
  REQUIRE(points.size() == 2);
  CHECK(points[0].bound ==
        invsamp::bernoulli_sample_size_tails(10, 0.5, 0.4, TailSide::lower));
  CHECK(points[0].empirical <=
        points[0].bound + 3.0 * mc_sigma(points[0].bound, 20000.0));
  CHECK(points[1].bound == 1.0);
  CHECK(points[1].empirical <= 1.0);
}

TEST_CASE("tail_empirics: general bounds govern non-Bernoulli streams") {
  const BoundedDistribution dist{DiscreteOnUnit{{0.04, 0.36}, {0.5, 0.5}}};
  const double mu = invsamp::mean_of(dist);
  REQUIRE(mu == doctest::Approx(0.2).epsilon(1e-14));

  const std::array<double, 2> up_rhos = {0.3, 0.5};
  const auto up = invsamp::tail_empirics(dist, 50.0, up_rhos, TailSide::upper,
                                         100000, 6004);
  REQUIRE(up.size() == 2);
  for (std::size_t i = 0; i < up.size(); ++i) {
    CHECK(up[i].bound ==
          invsamp::sample_size_upper_tail(50.0, mu, up_rhos[i]));
    CHECK(up[i].empirical <=
          up[i].bound + 3.0 * mc_sigma(up[i].bound, 100000.0));
  }

  const std::array<double, 1> dn_rhos = {0.3};
  const auto dn = invsamp::tail_empirics(dist, 50.0, dn_rhos, TailSide::lower,
                                         100000, 6005);
  REQUIRE(dn.size() == 1);
  CHECK(dn[0].bound == invsamp::sample_size_lower_tail(50.0, mu, 0.3));
  CHECK(dn[0].empirical <= dn[0].bound + 3.0 * mc_sigma(dn[0].bound, 100000.0));
}

TEST_CASE("tail_empirics: non-integer threshold takes the general bound") {
  const BoundedDistribution dist{Bernoulli{0.1}};
  const std::array<double, 1> rhos = {0.5};
  const auto points = invsamp::tail_empirics(dist, 100.5, rhos, TailSide::upper,
                                             100000, 6006);
  REQUIRE(points.size() == 1);
  CHECK(points[0].bound == invsamp::sample_size_upper_tail(100.5, 0.1, 0.5));
  CHECK(points[0].empirical <=
        points[0].bound + 3.0 * mc_sigma(points[0].bound, 100000.0));
}

TEST_CASE("tail_empirics: thread count never changes the counts") {
  const BoundedDistribution dist{Bernoulli{0.2}};
  const std::array<double, 2> rhos = {0.3, 0.6};
  const auto one = invsamp::tail_empirics(dist, 15.0, rhos, TailSide::upper,
                                          20000, 6007, RunOptions{});
  const auto four =
      invsamp::tail_empirics(dist, 15.0, rhos, TailSide::upper, 20000, 6007,
                             RunOptions{.threads = 4});
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].empirical == four[i].empirical);
    CHECK(one[i].bound == four[i].bound);
  }
}

TEST_CASE("stopping-time histogram passes a chi-square fit") {
  const auto result = invsamp::run_batch(BoundedDistribution{Bernoulli{0.3}},
                                         5.0, PrecisionSpec{0.2, 0.1},
                                         Estimator::mvue, 100000, 271828);
  const auto gof = oracle::chi_square_gof(result.histogram, 5, 0.3, 100000, 1e-3);
  CHECK(gof.pass);
  CHECK(gof.bins >= 10);

  // Per-count agreement over the bulk, four-sigma bands.
  for (std::int64_t k = 0; k <= 30; ++k) {
    const double pk = oracle::negbin_pmf(5, 0.3, k);
    const double expected = pk * 100000.0;
    double observed = 0.0;
    for (const auto& [n, count] : result.histogram) {
      if (static_cast<std::int64_t>(n) == 5 + k)
        observed = static_cast<double>(count);
    }
    CHECK(std::fabs(observed - expected) <=
          4.0 * std::sqrt(100000.0 * pk * (1.0 - pk)) + 5.0);
  }
}
