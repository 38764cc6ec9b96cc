#pragma once

#include <cmath>
#include <cstdint>

namespace invsamp {

// Natural-log-scale probability; exp(value) is in [0,1], value may be -inf.
struct LogProb {
  double value;

  double prob() const { return std::exp(value); }
};

// Number of required successes and per-trial success probability for the
// stopped-sum distribution k = n - gamma (failures before the gamma-th success).
struct NegBinomialParams {
  std::int64_t gamma;  // >= 1
  double p;            // in (0,1)
};

// ln(1+x) - x/(1+x) for |x| < 1. Positive for x != 0, zero at 0; the rate
// kernel behind every exponential bound in this library.
double phi(double x);

// ln(mu/z) + (1/z - 1) ln((1-mu)/(1-z)) for z, mu in (0,1). Zero at z = mu,
// strictly negative elsewhere.
double hoeffding_m(double z, double mu);

// ln C(n,k) via log-gamma. Requires 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

// Log of Pr{k failures before the gamma-th success} = C(gamma+k-1,k) p^gamma q^k.
LogProb negbin_pmf(const NegBinomialParams& params, std::int64_t k);

// Pr{failures <= k}, by direct pmf summation with geometric tail cutoff.
double negbin_cdf(const NegBinomialParams& params, std::int64_t k);

}  // namespace invsamp
