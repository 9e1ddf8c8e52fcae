#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace voxgs::detail {

// Seeded generator with distributions written out by hand, so that streams
// do not depend on the standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

  double laplace(double scale)
  {
    const double u = uniform() - 0.5;
    const double mag = -scale * std::log1p(-2.0 * std::fabs(u));
    return u < 0 ? -mag : mag;
  }

  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t bits() { return engine_(); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n; }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace voxgs::detail
