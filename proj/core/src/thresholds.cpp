#include "invsamp/thresholds.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "invsamp/errors.hpp"
#include "invsamp/scalar_kernels.hpp"

namespace invsamp {

namespace {

struct BisectResult {
  double root;
  double residual;
  double lo;
  double hi;
};

// Bisection for a strictly decreasing f on [lo, hi] with f(lo) > target > f(hi).
// The bracket is narrowed to adjacent doubles so nearby roots of different
// curves keep their strict order; the best point must satisfy |f - target| <= tol.
BisectResult bisect_decreasing(const std::function<double(double)>& f,
                               double target, double lo, double hi, double tol,
                               const char* what) {
  const double flo = f(lo), fhi = f(hi);
  if (flo < target || fhi > target)
    throw root_not_bracketed_error(std::string(what) +
                                   ": no sign change on the initial bracket");
  const double lo0 = lo, hi0 = hi;
  double best = lo, best_res = std::fabs(flo - target);
  if (std::fabs(fhi - target) < best_res) {
    best = hi;
    best_res = std::fabs(fhi - target);
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = f(mid);
    const double res = std::fabs(fm - target);
    if (res < best_res) {
      best = mid;
      best_res = res;
    }
    if (fm > target)
      lo = mid;
    else
      hi = mid;
  }
  if (best_res > tol)
    throw convergence_error(std::string(what) + ": residual tolerance unreached");
  return {best, best_res, lo0, hi0};
}

double offset_endpoint(double x) { return x * (1.0 + 1e-9) + 1e-9; }

double cheng_lhs(double ds, double eps) {
  const double half = 0.5 * ds;
  const double t1 = 1.0 - ds;
  const double t2 =
      (1.0 - 2.0 * std::pow(half, (1.0 + eps) / (1.0 + 2.0 * eps))) * half;
  const double t3 =
      (1.0 - 2.0 * std::pow(half, (1.0 + eps) / (1.0 + 3.0 * eps))) * half * half;
  return (1.0 - half) * (t1 + t2 + t3);
}

struct ChengRoot {
  double delta_s;
  double residual;
};

ChengRoot solve_cheng_delta_s(const PrecisionSpec& spec) {
  const double eps = spec.epsilon, delta = spec.delta;
  // Log-spaced scan toward both ends of (0,1); the root equation is not
  // accompanied by a uniqueness argument, so demand exactly one sign change.
  std::vector<double> grid;
  const int half_n = 600;
  const double lo = 1e-15, mid = 0.5;
  for (int i = 0; i < half_n; ++i)
    grid.push_back(std::exp(std::log(lo) +
                            (std::log(mid) - std::log(lo)) * i / (half_n - 1)));
  for (int i = half_n - 2; i >= 0; --i)
    grid.push_back(1.0 - grid[static_cast<std::size_t>(i)]);

  std::size_t cell = 0;
  int changes = 0;
  double prev = cheng_lhs(grid[0], eps) - delta;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = cheng_lhs(grid[i], eps) - delta;
    if ((prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0)) {
      ++changes;
      cell = i - 1;
    }
    prev = cur;
  }
  if (changes != 1)
    throw root_not_bracketed_error(
        "cheng_alpha: expected exactly one sign change of the auxiliary "
        "equation, found " +
        std::to_string(changes));

  double a = grid[cell], b = grid[cell + 1];
  double fa = cheng_lhs(a, eps) - delta;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = cheng_lhs(m, eps) - delta;
    if (std::fabs(fm) <= 1e-12) return {m, std::fabs(fm)};
    if ((fa > 0.0) == (fm > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  throw convergence_error("cheng_alpha: residual 1e-12 unreached in 200 iterations");
}

BisectResult solve_tilde_full(const PrecisionSpec& spec) {
  validate(spec);
  const double lo = offset_endpoint((1.0 - spec.epsilon) / spec.epsilon);
  const double hi = explicit_gamma(spec);
  return bisect_decreasing([&](double g) { return q_tilde(spec.epsilon, g); },
                           spec.delta, lo, hi, 1e-10 * spec.delta,
                           "solve_gamma_tilde");
}

BisectResult solve_hat_full(const PrecisionSpec& spec) {
  validate(spec);
  const double lo = offset_endpoint(1.0 / spec.epsilon);
  const double hi = explicit_gamma(spec);
  return bisect_decreasing([&](double g) { return q_hat(spec.epsilon, g); },
                           spec.delta, lo, hi, 1e-10 * spec.delta,
                           "solve_gamma_hat");
}

BisectResult solve_star_full(const PrecisionSpec& spec) {
  validate(spec);
  const double eps = spec.epsilon;
  const double lo = std::fmax(std::log(1.0 / spec.delta) / phi(eps),
                              std::log(2.0 / spec.delta) / phi(-eps));
  const double hi = solve_tilde_full(spec).root;
  return bisect_decreasing([&](double g) { return q_bernoulli(eps, g); },
                           spec.delta, lo, hi, 1e-10 * spec.delta,
                           "solve_gamma_star");
}

}  // namespace

void validate(const PrecisionSpec& spec) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0,1), got " +
                            std::to_string(spec.epsilon));
  if (!(spec.delta > 0.0 && spec.delta < 1.0))
    throw std::domain_error("delta must lie in (0,1), got " +
                            std::to_string(spec.delta));
}

AuxiliaryPrecision auxiliary_precision(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("auxiliary_precision: epsilon must lie in (0,1)");
  if (!(gamma > 1.0 / epsilon))
    throw std::domain_error("auxiliary_precision: gamma must exceed 1/epsilon");
  const double eta = (epsilon * gamma - 1.0) / (gamma - 1.0);
  const double zeta =
      (epsilon * (gamma + 1.0) - 1.0) / (gamma - 1.0 + epsilon);
  return {eta, zeta, gamma};
}

double q_tilde(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("q_tilde: epsilon must lie in (0,1)");
  if (!(gamma > (1.0 - epsilon) / epsilon))
    throw std::domain_error("q_tilde: gamma must exceed (1-eps)/eps = " +
                            std::to_string((1.0 - epsilon) / epsilon));
  const double zeta =
      (epsilon * (gamma + 1.0) - 1.0) / (gamma - 1.0 + epsilon);
  return std::exp(-gamma * phi(epsilon)) + std::exp(-gamma * phi(-zeta));
}

double q_hat(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("q_hat: epsilon must lie in (0,1)");
  if (!(gamma > 1.0 / epsilon))
    throw std::domain_error("q_hat: gamma must exceed 1/eps = " +
                            std::to_string(1.0 / epsilon));
  const double eta = (epsilon * gamma - 1.0) / (gamma - 1.0);
  return std::exp(-gamma * phi(epsilon)) + std::exp(-gamma * phi(-eta));
}

double q_bernoulli(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("q_bernoulli: epsilon must lie in (0,1)");
  if (!(gamma > 0.0))
    throw std::domain_error("q_bernoulli: gamma must be positive");
  return std::exp(-gamma * phi(epsilon)) + std::exp(-gamma * phi(-epsilon));
}

double explicit_gamma(const PrecisionSpec& spec) {
  validate(spec);
  return std::log(2.0 / spec.delta) / phi(spec.epsilon);
}

double dagum_upsilon1(const PrecisionSpec& spec) {
  validate(spec);
  const double e = std::exp(1.0);
  return 1.0 + 4.0 * (e - 2.0) * (1.0 + spec.epsilon) /
                   (spec.epsilon * spec.epsilon) * std::log(2.0 / spec.delta);
}

double solve_gamma_tilde(const PrecisionSpec& spec) {
  return solve_tilde_full(spec).root;
}

double solve_gamma_hat(const PrecisionSpec& spec) {
  return solve_hat_full(spec).root;
}

double solve_gamma_star(const PrecisionSpec& spec) {
  return solve_star_full(spec).root;
}

double cheng_alpha(const PrecisionSpec& spec) {
  validate(spec);
  return std::log(2.0 / solve_cheng_delta_s(spec).delta_s) / phi(spec.epsilon);
}

ThresholdReport compute_thresholds(const PrecisionSpec& spec,
                                   const ThresholdSelection& select) {
  validate(spec);
  ThresholdReport report;
  if (select.explicit_bound) report.explicit_gamma = explicit_gamma(spec);
  if (select.tilde) {
    const BisectResult r = solve_tilde_full(spec);
    report.gamma_tilde = r.root;
    report.tilde_diag = SolverDiag{r.residual, r.lo, r.hi};
  }
  if (select.hat) {
    const BisectResult r = solve_hat_full(spec);
    report.gamma_hat = r.root;
    report.hat_diag = SolverDiag{r.residual, r.lo, r.hi};
  }
  if (select.star) {
    const BisectResult r = solve_star_full(spec);
    report.gamma_star = r.root;
    report.star_diag = SolverDiag{r.residual, r.lo, r.hi};
  }
  if (select.dagum) report.dagum_upsilon1 = dagum_upsilon1(spec);
  if (select.cheng) {
    const ChengRoot root = solve_cheng_delta_s(spec);
    report.cheng_delta_s = root.delta_s;
    report.cheng_residual = root.residual;
    report.cheng_alpha = std::log(2.0 / root.delta_s) / phi(spec.epsilon);
  }
  return report;
}

}  // namespace invsamp
