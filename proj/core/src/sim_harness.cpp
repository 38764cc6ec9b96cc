#include "invsamp/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>

#include "invsamp/rng.hpp"

namespace invsamp {
namespace {

void validate_one(const Bernoulli& d) {
  if (!(d.p >= 0.0 && d.p <= 1.0))
    throw std::domain_error("Bernoulli p must lie in [0, 1]");
}

void validate_one(const ScaledBinomial& d) {
  if (d.L < 2) throw std::domain_error("ScaledBinomial L must be at least 2");
  if (!(d.rate >= 0.0 && d.rate <= 1.0))
    throw std::domain_error("ScaledBinomial rate must lie in [0, 1]");
}

void validate_one(const DiscreteOnUnit& d) {
  if (d.points.empty() || d.points.size() != d.weights.size())
    throw std::domain_error(
        "DiscreteOnUnit needs matching nonempty points and weights");
  double total = 0.0;
  for (double x : d.points)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::domain_error("DiscreteOnUnit points must lie in [0, 1]");
  for (double w : d.weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::domain_error("DiscreteOnUnit weights must be nonnegative");
    total += w;
  }
  if (!(std::fabs(total - 1.0) <= 1e-12))
    throw std::domain_error("DiscreteOnUnit weights must sum to 1");
}

void validate_one(const BetaLike& d) {
  if (!(d.alpha > 0.0 && d.beta > 0.0))
    throw std::domain_error("BetaLike shapes must be positive");
}

// Draw adaptor holding any per-distribution tables.
class Sampler {
 public:
  explicit Sampler(const BoundedDistribution& dist) : dist_(&dist) {
    if (const auto* d = std::get_if<DiscreteOnUnit>(&dist)) {
      cum_.reserve(d->weights.size());
      double run = 0.0;
      for (double w : d->weights) {
        run += w;
        cum_.push_back(run);
      }
    }
  }

  double draw(TrialRng& rng) const {
    return std::visit([&](const auto& d) { return draw_one(d, rng); }, *dist_);
  }

 private:
  double draw_one(const Bernoulli& d, TrialRng& rng) const {
    return rng.bernoulli(d.p);
  }

  double draw_one(const ScaledBinomial& d, TrialRng& rng) const {
    double k = 0.0;
    for (std::int64_t i = 0; i < d.L; ++i) k += rng.bernoulli(d.rate);
    return k / static_cast<double>(d.L);
  }

  double draw_one(const DiscreteOnUnit& d, TrialRng& rng) const {
    const double u = rng.uniform() * cum_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cum_.begin()), d.points.size() - 1);
    return d.points[idx];
  }

  double draw_one(const BetaLike& d, TrialRng& rng) const {
    return rng.beta(d.alpha, d.beta);
  }

  const BoundedDistribution* dist_;
  std::vector<double> cum_;
};

// Runs trials [0, trials) in contiguous per-thread chunks. Each trial's draws
// come from its own (seed, trial) stream and land in the owning thread's
// accumulator, so the merged result is schedule-independent. The smallest
// trial index that overran the cap wins error reporting.
template <typename Acc, typename Visit>
std::vector<Acc> run_trials(const Sampler& sampler, double gamma,
                            std::uint64_t trials, std::uint64_t seed,
                            const RunOptions& options, Visit visit) {
  const unsigned T = static_cast<unsigned>(std::min<std::uint64_t>(
      std::max(1u, options.threads), trials));
  std::vector<Acc> parts(T);
  std::vector<std::optional<std::uint64_t>> cap_hits(T);
  std::vector<std::exception_ptr> errors(T);
  std::atomic<bool> abort{false};
  const std::uint64_t chunk = (trials + T - 1) / T;
  auto work = [&](unsigned tid) {
    const std::uint64_t t0 = static_cast<std::uint64_t>(tid) * chunk;
    const std::uint64_t t1 = std::min<std::uint64_t>(trials, t0 + chunk);
    for (std::uint64_t t = t0; t < t1; ++t) {
      if (abort.load(std::memory_order_relaxed)) return;
      TrialRng rng(seed, t);
      StoppingState state(gamma);
      try {
        run_until_stopped(
            state, [&] { return sampler.draw(rng); }, options.cap);
      } catch (const cap_exceeded_error&) {
        cap_hits[tid] = t;
        abort.store(true, std::memory_order_relaxed);
        return;
      } catch (...) {
        errors[tid] = std::current_exception();
        abort.store(true, std::memory_order_relaxed);
        return;
      }
      visit(parts[tid], state.count());
    }
  };
  if (T == 1) {
    work(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(T);
    for (unsigned tid = 0; tid < T; ++tid) workers.emplace_back(work, tid);
    for (auto& w : workers) w.join();
  }
  std::optional<std::uint64_t> first_cap;
  for (const auto& hit : cap_hits)
    if (hit && (!first_cap || *hit < *first_cap)) first_cap = hit;
  if (first_cap) throw cap_exceeded_error(options.cap, *first_cap);
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return parts;
}

double tail_bound(const BoundedDistribution& dist, double gamma, double mu,
                  double rho, TailSide side) {
  if (!(mu > 0.0 && mu < 1.0)) return 1.0;
  const auto* bern = std::get_if<Bernoulli>(&dist);
  if (bern && std::floor(gamma) == gamma && gamma <= 9.0e15) {
    const auto g = static_cast<std::int64_t>(gamma);
    if (side == TailSide::upper)
      return bernoulli_sample_size_tails(g, bern->p, rho, side);
    return rho < 1.0 - bern->p
               ? bernoulli_sample_size_tails(g, bern->p, rho, side)
               : 1.0;
  }
  if (side == TailSide::upper)
    return rho > mu / gamma ? sample_size_upper_tail(gamma, mu, rho) : 1.0;
  return rho < 1.0 - mu ? sample_size_lower_tail(gamma, mu, rho) : 1.0;
}

}  // namespace

void validate(const BoundedDistribution& dist) {
  std::visit([](const auto& d) { validate_one(d); }, dist);
}

double mean_of(const BoundedDistribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return d.p;
        } else if constexpr (std::is_same_v<T, ScaledBinomial>) {
          return d.rate;
        } else if constexpr (std::is_same_v<T, DiscreteOnUnit>) {
          double dot = 0.0;
          double total = 0.0;
          for (std::size_t i = 0; i < d.points.size(); ++i) {
            dot += d.weights[i] * d.points[i];
            total += d.weights[i];
          }
          return dot / total;
        } else {
          return d.alpha / (d.alpha + d.beta);
        }
      },
      dist);
}

TrialBatchResult run_batch(const BoundedDistribution& dist, double gamma,
                           const PrecisionSpec& spec, Estimator estimator,
                           std::uint64_t trials, std::uint64_t seed,
                           const RunOptions& options) {
  validate(dist);
  validate(spec);
  if (trials == 0) throw std::domain_error("trials must be positive");
  if (!(gamma > 1.0))
    throw std::domain_error("stopping threshold gamma must exceed 1");
  const double mu = mean_of(dist);
  const Sampler sampler(dist);
  struct Acc {
    std::uint64_t successes = 0;
    std::uint64_t n_sum = 0;
    std::uint64_t n_min = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t n_max = 0;
    std::map<std::uint64_t, std::uint64_t> hist;
  };
  auto visit = [&](Acc& acc, std::uint64_t n) {
    const double nd = static_cast<double>(n);
    const double est = estimator == Estimator::mvue
                           ? (gamma - 1.0) / (nd - 1.0)
                           : gamma / nd;
    // Landing within rounding error of the window edge means an exact
    // boundary hit, which the strict inequality excludes.
    const double edge = spec.epsilon * mu;
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * edge;
    if (std::fabs(est - mu) < edge - tol) ++acc.successes;
    acc.n_sum += n;
    acc.n_min = std::min(acc.n_min, n);
    acc.n_max = std::max(acc.n_max, n);
    ++acc.hist[n];
  };
  const auto parts =
      run_trials<Acc>(sampler, gamma, trials, seed, options, visit);
  TrialBatchResult out{};
  out.trials = trials;
  out.seed = seed;
  out.n_min = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n_sum = 0;
  std::map<std::uint64_t, std::uint64_t> hist;
  for (const auto& p : parts) {
    out.successes += p.successes;
    n_sum += p.n_sum;
    out.n_min = std::min(out.n_min, p.n_min);
    out.n_max = std::max(out.n_max, p.n_max);
    for (const auto& [n, c] : p.hist) hist[n] += c;
  }
  out.coverage =
      static_cast<double>(out.successes) / static_cast<double>(trials);
  out.n_mean = static_cast<double>(n_sum) / static_cast<double>(trials);
  out.histogram.assign(hist.begin(), hist.end());
  return out;
}

TrialBatchResult ber_demo(std::int64_t L, double rate,
                          const PrecisionSpec& spec, std::uint64_t trials,
                          std::uint64_t seed, const RunOptions& options) {
  return run_batch(ScaledBinomial{L, rate}, explicit_gamma(spec), spec,
                   Estimator::mvue, trials, seed, options);
}

std::vector<TailPoint> tail_empirics(const BoundedDistribution& dist,
                                     double gamma, std::span<const double> rhos,
                                     TailSide side, std::uint64_t trials,
                                     std::uint64_t seed,
                                     const RunOptions& options) {
  validate(dist);
  if (trials == 0) throw std::domain_error("trials must be positive");
  if (!(gamma > 1.0))
    throw std::domain_error("stopping threshold gamma must exceed 1");
  for (double r : rhos)
    if (!(r > 0.0))
      throw std::domain_error("tail offsets rho must be positive");
  const std::size_t m = rhos.size();
  if (m == 0) return {};
  const double mu = mean_of(dist);
  const Sampler sampler(dist);
  std::vector<double> cut(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double scale =
        side == TailSide::upper ? 1.0 + rhos[j] : 1.0 - rhos[j];
    cut[j] = mu > 0.0 ? gamma * scale / mu
                      : std::numeric_limits<double>::infinity();
  }
  using Acc = std::vector<std::uint64_t>;
  auto visit = [&](Acc& acc, std::uint64_t n) {
    if (acc.empty()) acc.assign(m, 0);
    const double nd = static_cast<double>(n);
    for (std::size_t j = 0; j < m; ++j) {
      const bool in_tail =
          side == TailSide::upper ? nd >= cut[j] : nd <= cut[j];
      if (in_tail) ++acc[j];
    }
  };
  const auto parts =
      run_trials<Acc>(sampler, gamma, trials, seed, options, visit);
  std::vector<std::uint64_t> counts(m, 0);
  for (const auto& p : parts)
    for (std::size_t j = 0; j < p.size(); ++j) counts[j] += p[j];
  std::vector<TailPoint> out(m);
  for (std::size_t j = 0; j < m; ++j)
    out[j] = {rhos[j],
              static_cast<double>(counts[j]) / static_cast<double>(trials),
              tail_bound(dist, gamma, mu, rhos[j], side)};
  return out;
}

}  // namespace invsamp
