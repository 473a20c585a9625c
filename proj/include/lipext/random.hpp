#ifndef LIPEXT_RANDOM_HPP
#define LIPEXT_RANDOM_HPP

#include "lipext/metric.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lipext {

/// Seeded generator with hand-rolled transforms, so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Standard normal by Box–Muller (cosine branch only).
  double normal() {
    const double u = 1.0 - uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::uint64_t next() { return engine_(); }

  Vector uniform_vector(Index d, double a, double b) {
    Vector v(d);
    for (Index k = 0; k < d; ++k) v(k) = uniform(a, b);
    return v;
  }
  /// Direction with unit p-norm.
  Vector direction(Index d, double p) {
    Vector v(d);
    do {
      for (Index k = 0; k < d; ++k) v(k) = normal();
    } while (v.squaredNorm() == 0.0);
    return v / p_norm(v, p);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lipext

#endif  // LIPEXT_RANDOM_HPP
