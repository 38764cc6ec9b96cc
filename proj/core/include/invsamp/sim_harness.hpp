#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "invsamp/bernoulli_exact.hpp"
#include "invsamp/seq_engine.hpp"
#include "invsamp/thresholds.hpp"

namespace invsamp {

// [0,1]-supported source distributions for Monte Carlo runs.
struct Bernoulli {
  double p;
};

// Mean of L coin flips: values k/L for k in 0..L.
struct ScaledBinomial {
  std::int64_t L;  // >= 2
  double rate;
};

struct DiscreteOnUnit {
  std::vector<double> points;   // in [0, 1]
  std::vector<double> weights;  // nonnegative, summing to 1
};

struct BetaLike {
  double alpha;  // > 0
  double beta;   // > 0
};

using BoundedDistribution =
    std::variant<Bernoulli, ScaledBinomial, DiscreteOnUnit, BetaLike>;

// Shape checks only; a zero-mean distribution passes and later surfaces as a
// cap overrun when sampled.
void validate(const BoundedDistribution& dist);

double mean_of(const BoundedDistribution& dist);

struct RunOptions {
  std::uint64_t cap = StoppingState::kDefaultCap;
  unsigned threads = 1;
};

struct TrialBatchResult {
  std::uint64_t trials;
  std::uint64_t successes;  // |estimate - mean| < epsilon * mean, strictly
  double coverage;
  double n_mean;
  std::uint64_t n_min;
  std::uint64_t n_max;
  std::uint64_t seed;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> histogram;  // (n, count)
};

// Runs independent stopped trials and aggregates them. Byte-identical output
// for a given (seed, trials) whatever options.threads is; a trial exceeding
// options.cap raises cap_exceeded_error carrying the trial index.
TrialBatchResult run_batch(const BoundedDistribution& dist, double gamma,
                           const PrecisionSpec& spec, Estimator estimator,
                           std::uint64_t trials, std::uint64_t seed,
                           const RunOptions& options = {});

// Block-mean demo: ScaledBinomial(L, rate) samples stopped at the explicit
// threshold for spec, scored with the (gamma-1)/(n-1) estimate.
TrialBatchResult ber_demo(std::int64_t L, double rate,
                          const PrecisionSpec& spec, std::uint64_t trials,
                          std::uint64_t seed, const RunOptions& options = {});

struct TailPoint {
  double rho;
  double empirical;
  double bound;
};

// Empirical stopping-time tail frequencies against the analytic bounds, one
// point per rho. Bernoulli inputs at integer gamma get the sharper Bernoulli
// bound; outside a bound's rho domain the bound is reported as 1.
std::vector<TailPoint> tail_empirics(const BoundedDistribution& dist,
                                     double gamma, std::span<const double> rhos,
                                     TailSide side, std::uint64_t trials,
                                     std::uint64_t seed,
                                     const RunOptions& options = {});

}  // namespace invsamp
