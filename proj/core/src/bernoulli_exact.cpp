#include "invsamp/bernoulli_exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "invsamp/scalar_kernels.hpp"
#include "invsamp/thresholds.hpp"

namespace invsamp {
namespace {

constexpr double kEndpointMergeTol = 1e-14;
constexpr double kExactIntegerLimit = 9.0e15;

void check_gamma_epsilon(std::int64_t gamma, double epsilon,
                         Estimator estimator) {
  const std::int64_t min_gamma = estimator == Estimator::mvue ? 2 : 1;
  if (gamma < min_gamma)
    throw std::domain_error("coverage gamma below estimator minimum");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("coverage epsilon must lie in (0, 1)");
}

void check_window_args(std::int64_t gamma, double epsilon, double p,
                       Estimator estimator) {
  check_gamma_epsilon(gamma, epsilon, estimator);
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("coverage p must lie in (0, 1)");
}

// Collapses values within 8 ulp-scaled units of an integer onto it, so the
// floor/ceil window cuts land where exact rational arithmetic would put them.
double snap_to_integer(double y) {
  const double r = std::nearbyint(y);
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() *
                     std::fmax(1.0, std::fabs(y));
  return std::fabs(y - r) <= tol ? r : y;
}

struct WindowMass {
  double mass;
  bool completed;  // false iff the partial sum crossed stop_above early
};

// Kahan sum of the stopped-sum pmf over k in [g, h], growing each term by the
// ratio q*(gamma+k)/(k+1). Underflowed leading terms are skipped; once the
// partial sum exceeds stop_above the scan aborts.
WindowMass window_mass(std::int64_t gamma, double p, std::int64_t g,
                       std::int64_t h, double stop_above) {
  if (g > h) return {0.0, true};
  const NegBinomialParams params{gamma, p};
  std::int64_t k = g;
  double term = 0.0;
  while (k <= h) {
    term = negbin_pmf(params, k).prob();
    if (term > 0.0) break;
    ++k;
  }
  if (k > h) return {0.0, true};
  const double q = 1.0 - p;
  double sum = 0.0;
  double comp = 0.0;
  for (;;) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (sum > stop_above) return {sum, false};
    if (k == h) break;
    term *= q * static_cast<double>(gamma + k) / static_cast<double>(k + 1);
    ++k;
  }
  return {sum, true};
}

// Breakpoint parameters num/(factor*(l+num)) inside (a, b), ascending in p.
// Points within kEndpointMergeTol of an endpoint merge into it.
std::vector<double> family_points(double num, double factor, double a,
                                  double b) {
  const double cut = num / (factor * a);
  if (!(cut < kExactIntegerLimit))
    throw std::domain_error(
        "interval lower endpoint too small for exact candidate enumeration");
  auto point = [&](std::int64_t l) {
    return num / (factor * (static_cast<double>(l) + num));
  };
  std::int64_t l = static_cast<std::int64_t>(std::floor(cut - num));
  if (l < -1) l = -1;
  while (l >= 0 && !(point(l) > a)) --l;
  while (point(l + 1) > a) ++l;
  std::vector<double> out;
  if (l >= 0) out.reserve(static_cast<std::size_t>(l) + 1);
  for (; l >= 0; --l) {
    const double p = point(l);
    if (!(p - a > kEndpointMergeTol)) continue;
    if (!(b - p > kEndpointMergeTol)) break;
    out.push_back(p);
  }
  return out;
}

void atomic_min(std::atomic<double>& best, double v) {
  double cur = best.load(std::memory_order_relaxed);
  while (v < cur &&
         !best.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

template <typename Fn>
void run_on_threads(unsigned count, Fn&& fn) {
  if (count <= 1) {
    fn();
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(count);
  for (unsigned i = 0; i < count; ++i) workers.emplace_back(fn);
  for (auto& w : workers) w.join();
}

// True iff some candidate's coverage is <= floor_cov. Scans ascending in p so
// that the small-p region, where the minimum concentrates, is probed first.
bool any_candidate_at_or_below(const CoverageQuery& query, double floor_cov,
                               unsigned threads) {
  const auto pts = candidate_set(query);
  const std::size_t n = pts.size();
  constexpr std::size_t kBlock = 128;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  const unsigned T = static_cast<unsigned>(std::min<std::size_t>(
      std::max(1u, threads), nblocks));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> found{false};
  auto work = [&]() {
    while (!found.load(std::memory_order_relaxed)) {
      const std::size_t bi = next.fetch_add(1, std::memory_order_relaxed);
      if (bi >= nblocks) return;
      const std::size_t lo = bi * kBlock;
      const std::size_t hi = std::min(n, lo + kBlock);
      for (std::size_t i = lo; i < hi; ++i) {
        const auto w = coverage_window(query.gamma, query.epsilon, pts[i],
                                       query.estimator);
        const auto m = window_mass(query.gamma, pts[i], w.g, w.h, floor_cov);
        if (m.completed && m.mass <= floor_cov) {
          found.store(true, std::memory_order_relaxed);
          return;
        }
      }
    }
  };
  run_on_threads(T, work);
  return found.load();
}

}  // namespace

void validate(const CoverageQuery& query) {
  check_gamma_epsilon(query.gamma, query.epsilon, query.estimator);
  if (!(query.a > 0.0 && query.a <= query.b && query.b < 1.0))
    throw std::domain_error("coverage interval requires 0 < a <= b < 1");
}

CoverageWindow coverage_window(std::int64_t gamma, double epsilon, double p,
                               Estimator estimator) {
  check_window_args(gamma, epsilon, p, estimator);
  const double num =
      static_cast<double>(estimator == Estimator::mvue ? gamma - 1 : gamma);
  const double ylo = snap_to_integer(num / ((1.0 + epsilon) * p));
  const double yhi = snap_to_integer(num / ((1.0 - epsilon) * p));
  if (!(yhi < kExactIntegerLimit))
    throw std::domain_error(
        "coverage window exceeds exact integer range; p is too small");
  std::int64_t g;
  std::int64_t h;
  if (estimator == Estimator::mvue) {
    g = static_cast<std::int64_t>(std::floor(ylo)) - gamma + 2;
    h = static_cast<std::int64_t>(std::ceil(yhi)) - gamma;
  } else {
    g = static_cast<std::int64_t>(std::floor(ylo)) - gamma + 1;
    h = static_cast<std::int64_t>(std::ceil(yhi)) - gamma - 1;
  }
  if (g < 0) g = 0;
  return {g, h};
}

double coverage_probability(std::int64_t gamma, double epsilon, double p,
                            Estimator estimator) {
  const auto w = coverage_window(gamma, epsilon, p, estimator);
  const auto m = window_mass(gamma, p, w.g, w.h,
                             std::numeric_limits<double>::infinity());
  return m.mass < 1.0 ? m.mass : 1.0;
}

std::vector<double> candidate_set(const CoverageQuery& query) {
  validate(query);
  const double num = static_cast<double>(
      query.estimator == Estimator::mvue ? query.gamma - 1 : query.gamma);
  const auto lo_pts = family_points(num, 1.0 + query.epsilon, query.a, query.b);
  const auto hi_pts = family_points(num, 1.0 - query.epsilon, query.a, query.b);
  std::vector<double> out;
  out.reserve(lo_pts.size() + hi_pts.size() + 2);
  out.push_back(query.a);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < lo_pts.size() || j < hi_pts.size()) {
    double v;
    if (j == hi_pts.size() ||
        (i < lo_pts.size() && lo_pts[i] <= hi_pts[j]))
      v = lo_pts[i++];
    else
      v = hi_pts[j++];
    if (v != out.back()) out.push_back(v);
  }
  if (query.b != out.back()) out.push_back(query.b);
  return out;
}

MinCoverage min_coverage(const CoverageQuery& query, unsigned threads) {
  const auto pts = candidate_set(query);
  const std::size_t n = pts.size();
  constexpr std::size_t kBlock = 128;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  const unsigned T = static_cast<unsigned>(std::min<std::size_t>(
      std::max(1u, threads), nblocks));
  std::vector<MinCoverage> per_block(
      nblocks, MinCoverage{std::numeric_limits<double>::infinity(), 0.0});
  std::atomic<double> best{std::numeric_limits<double>::infinity()};
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t bi = next.fetch_add(1, std::memory_order_relaxed);
      if (bi >= nblocks) return;
      MinCoverage local{std::numeric_limits<double>::infinity(), 0.0};
      const std::size_t lo = bi * kBlock;
      const std::size_t hi = std::min(n, lo + kBlock);
      for (std::size_t i = lo; i < hi; ++i) {
        const auto w = coverage_window(query.gamma, query.epsilon, pts[i],
                                       query.estimator);
        // A candidate whose partial sum already exceeds the running best
        // cannot be the minimum; candidates tied with the true minimum are
        // never cut short, so the smallest-p tie break stays exact.
        const auto m = window_mass(query.gamma, pts[i], w.g, w.h,
                                   best.load(std::memory_order_relaxed));
        if (!m.completed) continue;
        const double cov = m.mass < 1.0 ? m.mass : 1.0;
        if (cov < local.coverage) local = {cov, pts[i]};
        atomic_min(best, cov);
      }
      per_block[bi] = local;
    }
  };
  run_on_threads(T, work);
  MinCoverage out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& pb : per_block)
    if (pb.coverage < out.coverage) out = pb;
  return out;
}

std::int64_t minimum_gamma(double epsilon, double delta, double a, double b,
                           Estimator estimator, unsigned threads) {
  const PrecisionSpec spec{epsilon, delta};
  validate(spec);
  if (!(a > 0.0 && a <= b && b < 1.0))
    throw std::domain_error("minimum_gamma requires 0 < a <= b < 1");
  const double cap_real =
      std::fmax(solve_gamma_hat(spec), solve_gamma_star(spec));
  const std::int64_t cap = static_cast<std::int64_t>(std::ceil(cap_real)) + 1;
  const double floor_cov = 1.0 - delta;
  for (std::int64_t gamma = 2; gamma <= cap; ++gamma) {
    const CoverageQuery query{gamma, epsilon, estimator, a, b};
    if (!any_candidate_at_or_below(query, floor_cov, threads)) return gamma;
  }
  throw std::logic_error(
      "minimum_gamma failed to terminate within its theoretical bound");
}

}  // namespace invsamp
