#pragma once

#include <optional>

namespace invsamp {

// Target relative-error margin and confidence risk.
struct PrecisionSpec {
  double epsilon;  // in (0,1)
  double delta;    // in (0,1)
};

// Throws std::domain_error unless both fields lie in (0,1).
void validate(const PrecisionSpec& spec);

// The auxiliary margins of the two-sided bound decomposition at a given
// threshold: eta = (eps*gamma - 1)/(gamma - 1) and zeta solving
// 1/(1-eps) = 1/(1-zeta) + 1/gamma. Defined for gamma > 1/eps, where
// 0 < eta < zeta < eps < 1.
struct AuxiliaryPrecision {
  double eta;
  double zeta;
  double gamma;
};

AuxiliaryPrecision auxiliary_precision(double epsilon, double gamma);

// Upper bound on Pr{|mu_tilde - mu|/mu >= eps} for the general [0,1] scheme;
// strictly decreasing in gamma on gamma > (1-eps)/eps.
double q_tilde(double epsilon, double gamma);

// Same for mu_hat; domain gamma > 1/eps.
double q_hat(double epsilon, double gamma);

// Two-sided bound for the Bernoulli case with integer thresholds; defined
// for all gamma > 0 (callers round to integers where the exact theory needs it).
double q_bernoulli(double epsilon, double gamma);

// Closed-form threshold ln(2/delta)/phi(eps): sums above it give the
// (eps, delta) guarantee for mu_tilde.
double explicit_gamma(const PrecisionSpec& spec);

// The earlier stopping-rule threshold 1 + 4(e-2)(1+eps)/eps^2 * ln(2/delta);
// provably larger than explicit_gamma, kept for comparison.
double dagum_upsilon1(const PrecisionSpec& spec);

// Unique roots of Q-function = delta, by bisection to |Q - delta| <= 1e-10*delta.
double solve_gamma_tilde(const PrecisionSpec& spec);
double solve_gamma_hat(const PrecisionSpec& spec);
double solve_gamma_star(const PrecisionSpec& spec);

// Comparison-only threshold ln(2/delta_s)/phi(eps) where delta_s is the root of
// a published auxiliary equation; its correctness guarantee is unproven, so
// reports carry kChengNote and it is never auto-selected.
double cheng_alpha(const PrecisionSpec& spec);

struct SolverDiag {
  double residual;
  double bracket_lo;
  double bracket_hi;
};

struct ThresholdReport {
  std::optional<double> explicit_gamma;
  std::optional<double> gamma_tilde;
  std::optional<double> gamma_hat;
  std::optional<double> gamma_star;
  std::optional<double> dagum_upsilon1;
  std::optional<double> cheng_alpha;
  std::optional<double> cheng_delta_s;
  std::optional<SolverDiag> tilde_diag;
  std::optional<SolverDiag> hat_diag;
  std::optional<SolverDiag> star_diag;
  std::optional<double> cheng_residual;

  static constexpr const char* kChengNote =
      "comparison only; correctness guarantee unproven";
};

struct ThresholdSelection {
  bool explicit_bound = false;
  bool tilde = false;
  bool hat = false;
  bool star = false;
  bool dagum = false;
  bool cheng = false;

  static ThresholdSelection all() { return {true, true, true, true, true, true}; }
};

ThresholdReport compute_thresholds(const PrecisionSpec& spec,
                                   const ThresholdSelection& select);

}  // namespace invsamp
