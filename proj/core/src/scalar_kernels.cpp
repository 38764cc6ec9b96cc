#include "invsamp/scalar_kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace invsamp {

namespace {

void check_negbin(const NegBinomialParams& params) {
  if (params.gamma < 1)
    throw std::domain_error("negbin: gamma must be a positive integer, got " +
                            std::to_string(params.gamma));
  if (!(params.p > 0.0 && params.p < 1.0))
    throw std::domain_error("negbin: p must lie in (0,1), got " +
                            std::to_string(params.p));
}

}  // namespace

double phi(double x) {
  if (!(std::fabs(x) < 1.0))
    throw std::domain_error("phi: |x| must be < 1, got " + std::to_string(x));
  return std::log1p(x) - x / (1.0 + x);
}

double hoeffding_m(double z, double mu) {
  if (!(z > 0.0 && z < 1.0))
    throw std::domain_error("hoeffding_m: z must lie in (0,1), got " +
                            std::to_string(z));
  if (!(mu > 0.0 && mu < 1.0))
    throw std::domain_error("hoeffding_m: mu must lie in (0,1), got " +
                            std::to_string(mu));
  return std::log(mu / z) + (1.0 / z - 1.0) * std::log((1.0 - mu) / (1.0 - z));
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n)
    throw std::domain_error("log_binomial: need 0 <= k <= n, got n=" +
                            std::to_string(n) + " k=" + std::to_string(k));
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

LogProb negbin_pmf(const NegBinomialParams& params, std::int64_t k) {
  check_negbin(params);
  if (k < 0) throw std::domain_error("negbin_pmf: k must be >= 0");
  const double g = static_cast<double>(params.gamma);
  return LogProb{log_binomial(params.gamma + k - 1, k) +
                 g * std::log(params.p) +
                 static_cast<double>(k) * std::log1p(-params.p)};
}

double negbin_cdf(const NegBinomialParams& params, std::int64_t k) {
  check_negbin(params);
  if (k < 0) throw std::domain_error("negbin_cdf: k must be >= 0");
  const double q = 1.0 - params.p;
  const double g = static_cast<double>(params.gamma);

  // Kahan summation of exponentiated terms; each successive term comes from
  // the ratio pmf(i+1)/pmf(i) = q(gamma+i)/(i+1).
  double term = negbin_pmf(params, 0).prob();
  double sum = 0.0, comp = 0.0;
  for (std::int64_t i = 0;; ++i) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (i == k) break;
    const double ratio = q * (g + static_cast<double>(i)) /
                         (static_cast<double>(i) + 1.0);
    // Past the mode the ratios decrease, so the remaining mass up to k is
    // bounded by the geometric series term*ratio/(1-ratio).
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-15) break;
    term *= ratio;
  }
  return sum < 1.0 ? sum : 1.0;
}

}  // namespace invsamp
