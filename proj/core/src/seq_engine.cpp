#include "invsamp/seq_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace invsamp {
namespace {

void check_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0))
    throw std::domain_error("stream mean must lie in (0, 1)");
}

}  // namespace

StoppingState::StoppingState(double gamma) : gamma_(gamma) {
  if (!(gamma > 1.0))
    throw std::domain_error("stopping threshold gamma must exceed 1");
}

void StoppingState::ingest(double sample) {
  if (stopped_)
    throw std::logic_error("ingest after the stopping rule has fired");
  if (!(sample >= 0.0 && sample <= 1.0))
    throw std::domain_error("sample must lie in [0, 1]");
  sum_ += sample;
  ++count_;
  stopped_ = sum_ >= gamma_;
}

StoppingState::StreamOutcome StoppingState::ingest_stream(
    std::span<const double> samples) {
  for (double s : samples) {
    ingest(s);
    if (stopped_) return StreamOutcome::stopped;
  }
  return stopped_ ? StreamOutcome::stopped : StreamOutcome::exhausted;
}

EstimateReport estimates(const StoppingState& state) {
  if (!state.stopped())
    throw std::logic_error("estimates require a stopped state");
  const double n = static_cast<double>(state.count());
  if (!(state.count() >= 2))
    throw std::logic_error("stopped state must hold at least two samples");
  return {state.gamma() / n, (state.gamma() - 1.0) / (n - 1.0), state.count(),
          state.gamma()};
}

double sample_size_upper_tail(double gamma, double mu, double rho) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  check_mu(mu);
  if (!(rho > mu / gamma))
    throw std::domain_error("upper tail requires rho > mu / gamma");
  const double a = 1.0 + rho - mu / gamma;
  const double log_bound =
      (gamma / mu) *
      (a * std::log(a) + (a - mu) * std::log((1.0 - mu) / (a - mu)));
  return log_bound < 0.0 ? std::exp(log_bound) : 1.0;
}

double sample_size_lower_tail(double gamma, double mu, double rho) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  check_mu(mu);
  if (!(rho > 0.0 && rho < 1.0 - mu))
    throw std::domain_error("lower tail requires 0 < rho < 1 - mu");
  const double log_bound =
      (gamma / mu) * ((1.0 - rho) * std::log1p(-rho) +
                      (1.0 - rho - mu) * std::log((1.0 - mu) / (1.0 - rho - mu)));
  return log_bound < 0.0 ? std::exp(log_bound) : 1.0;
}

double bernoulli_sample_size_tails(std::int64_t gamma, double p, double rho,
                                   TailSide side) {
  if (gamma < 1) throw std::domain_error("gamma must be a positive integer");
  check_mu(p);
  const double g = static_cast<double>(gamma);
  const double q = 1.0 - p;
  double log_bound;
  if (side == TailSide::upper) {
    if (!(rho > 0.0)) throw std::domain_error("upper tail requires rho > 0");
    log_bound = (g / p) * ((q + rho) * std::log(q / (q + rho)) +
                           (1.0 + rho) * std::log1p(rho));
  } else {
    if (!(rho > 0.0 && rho < q))
      throw std::domain_error("lower tail requires 0 < rho < 1 - p");
    log_bound = (g / p) * ((q - rho) * std::log(q / (q - rho)) +
                           (1.0 - rho) * std::log1p(-rho));
  }
  return log_bound < 0.0 ? std::exp(log_bound) : 1.0;
}

std::pair<double, double> expected_n_bracket(double gamma, double mu) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  check_mu(mu);
  return {gamma / mu, gamma / mu + 1.0};
}

}  // namespace invsamp
