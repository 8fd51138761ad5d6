#ifndef WDRO_RNG_HPP
#define WDRO_RNG_HPP

#include <cmath>
#include <cstdint>

namespace wdro {

// Splitmix64 generator. The synthetic-returns generator below is part of the
// file-format contract: identical seeds must reproduce identical atom sets
// across builds, so the whole chain is fixed-point exact u64 arithmetic plus
// one documented double conversion.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1): ((z >> 11) + 0.5) / 2^53.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller pair; draws exactly two uniforms.
  void next_gaussian_pair(double& g0, double& g1) {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    g0 = r * std::cos(t);
    g1 = r * std::sin(t);
  }

  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double g0, g1;
    next_gaussian_pair(g0, g1);
    spare_ = g1;
    have_spare_ = true;
    return g0;
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wdro

#endif
