#pragma once

#include <cstdint>
#include <vector>

namespace invsamp {

// Point-estimate forms for the stopped Bernoulli scheme: gamma/n and
// (gamma-1)/(n-1). The latter is exactly unbiased for integer-gamma streams.
enum class Estimator { mle, mvue };

// Exact-coverage query over a parameter interval [a, b].
struct CoverageQuery {
  std::int64_t gamma;   // >= 2 for mvue, >= 1 for mle
  double epsilon;       // in (0,1)
  Estimator estimator;
  double a;             // 0 < a <= b < 1
  double b;
};

void validate(const CoverageQuery& query);

// Integer window of k = n - gamma values whose estimate lies strictly inside
// (p(1-eps), p(1+eps)); empty iff g > h. g is clamped to >= 0.
struct CoverageWindow {
  std::int64_t g;
  std::int64_t h;

  bool empty() const { return g > h; }
};

CoverageWindow coverage_window(std::int64_t gamma, double epsilon, double p,
                               Estimator estimator);

// Pr{|estimate - p| < eps*p} for the stopped scheme at threshold gamma:
// the stopped-sum pmf summed over the window.
double coverage_probability(std::int64_t gamma, double epsilon, double p,
                            Estimator estimator);

// Interval endpoints plus the two harmonic families of window-breakpoint
// parameters inside (a,b), ascending and distinct. The coverage minimum over
// [a,b] is attained on this finite set.
std::vector<double> candidate_set(const CoverageQuery& query);

struct MinCoverage {
  double coverage;
  double p;  // smallest achieving parameter
};

// Minimum of coverage_probability over candidate_set(query); candidates may be
// evaluated concurrently (threads > 1), ties resolve to the smallest p.
MinCoverage min_coverage(const CoverageQuery& query, unsigned threads = 1);

// Smallest integer gamma >= 2 whose minimum coverage over [a,b] strictly
// exceeds 1 - delta. Termination is guaranteed by the Q-function bounds.
std::int64_t minimum_gamma(double epsilon, double delta, double a, double b,
                           Estimator estimator, unsigned threads = 1);

}  // namespace invsamp
