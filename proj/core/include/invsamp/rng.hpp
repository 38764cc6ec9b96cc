#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace invsamp {

// Avalanching mix used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-trial random stream: the engine seed depends only on (root_seed, trial),
// so results are identical however trials are scheduled across threads. The
// variate transforms are spelled out here instead of using std:: distribution
// adaptors, whose algorithms differ between standard libraries.
class TrialRng {
 public:
  TrialRng(std::uint64_t root_seed, std::uint64_t trial)
      : engine_(splitmix64(splitmix64(root_seed) + trial)) {}

  // [0, 1), 53-bit resolution
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

  // Box-Muller pair, one value cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * kPi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Marsaglia-Tsang squeeze; shapes below 1 use the boost step
  // gamma(a) = gamma(a + 1) * U^(1/a).
  double gamma_draw(double shape) {
    if (shape < 1.0) {
      double u;
      do {
        u = uniform();
      } while (u == 0.0);
      return gamma_draw(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v;
    }
  }

  double beta(double alpha, double beta_shape) {
    for (;;) {
      const double x = gamma_draw(alpha);
      const double y = gamma_draw(beta_shape);
      if (x + y > 0.0) return x / (x + y);
    }
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace invsamp
