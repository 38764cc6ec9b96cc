#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "invsamp/errors.hpp"

namespace invsamp {

// Accumulates [0,1]-bounded samples until the running sum reaches gamma.
class StoppingState {
 public:
  static constexpr std::uint64_t kDefaultCap = 100'000'000;

  enum class StreamOutcome { stopped, exhausted };

  explicit StoppingState(double gamma);

  // Adds one sample; rejects values outside [0,1] and any ingest after the
  // rule has stopped.
  void ingest(double sample);

  // Ingests in order until the rule stops or the stream runs out.
  StreamOutcome ingest_stream(std::span<const double> samples);

  double gamma() const noexcept { return gamma_; }
  double sum() const noexcept { return sum_; }
  std::uint64_t count() const noexcept { return count_; }
  bool stopped() const noexcept { return stopped_; }

 private:
  double gamma_;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
  bool stopped_ = false;
};

struct EstimateReport {
  double mu_tilde;  // gamma / n
  double mu_hat;    // (gamma - 1) / (n - 1)
  std::uint64_t n;
  double gamma;
};

// Point estimates for a stopped state; throws if the rule has not stopped.
EstimateReport estimates(const StoppingState& state);

// Drives the stopping rule from a sample generator, refusing to draw more
// than `cap` samples.
template <typename Gen>
std::uint64_t run_until_stopped(StoppingState& state, Gen&& draw,
                                std::uint64_t cap = StoppingState::kDefaultCap) {
  while (!state.stopped()) {
    if (state.count() >= cap) throw cap_exceeded_error(cap);
    state.ingest(draw());
  }
  return state.count();
}

enum class TailSide { upper, lower };

// Tail bounds on the stopping time N for a mean-mu bounded stream:
// Pr{N >= gamma(1+rho)/mu} for the upper side (rho > mu/gamma) and
// Pr{N <= gamma(1-rho)/mu} for the lower side (0 < rho < 1 - mu).
double sample_size_upper_tail(double gamma, double mu, double rho);
double sample_size_lower_tail(double gamma, double mu, double rho);

// Sharper tails for Bernoulli streams at integer gamma; upper needs rho > 0,
// lower needs 0 < rho < 1 - p.
double bernoulli_sample_size_tails(std::int64_t gamma, double p, double rho,
                                   TailSide side);

// E[N] lies in [gamma/mu, gamma/mu + 1).
std::pair<double, double> expected_n_bracket(double gamma, double mu);

}  // namespace invsamp
