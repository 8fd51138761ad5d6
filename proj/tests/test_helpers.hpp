#ifndef WDRO_TEST_HELPERS_HPP
#define WDRO_TEST_HELPERS_HPP

#include <cmath>

#include "measure.hpp"
#include "rng.hpp"
#include "utility.hpp"

namespace wdro::test {

// Small seed-fixed instances for the solver suites. Atoms are clamped so the
// wealth stays in the regime where the block worst case is exactly tight
// (wealth <= 2 for log_linear, small budgets elsewhere).
struct Instance {
  DiscreteMeasure P;
  UtilityFn u;
  double p;
  double k;
  double x0;
  Vec w;
};

inline DiscreteMeasure random_measure(SplitMix64& rng, int n, int d, double scale) {
  std::vector<double> atoms(static_cast<std::size_t>(n) * d);
  for (auto& a : atoms) {
    double g = rng.next_gaussian() * scale;
    a = std::clamp(g, -2.5 * scale, 2.5 * scale);
  }
  return DiscreteMeasure::uniform(d, std::move(atoms));
}

inline Vec random_direction(SplitMix64& rng, int d, double norm) {
  Vec w(d);
  double nn = 0.0;
  do {
    for (auto& x : w) x = rng.next_gaussian();
    nn = norm2(w);
  } while (nn < 1e-6);
  for (auto& x : w) x *= norm / nn;
  return w;
}

// Instance family used by the oracle-agreement and saturation suites.
// p = 1 instances put all wealth on the affine tail (x0 = -1), where the
// budget ties water-fill exactly; p > 1 instances keep k small enough that
// optimal moves stay inside the strictly convex region of each utility.
inline Instance make_instance(std::uint64_t seed, int which_u, double p, int n, int d) {
  SplitMix64 rng(seed);
  DiscreteMeasure P = random_measure(rng, n, d, 0.35);
  Vec w = random_direction(rng, d, 0.25 + 0.25 * rng.next_uniform());
  const double x0 = p == 1.0 ? -1.0 : 1.0;
  const double k = p == 1.0 ? 0.5 + rng.next_uniform() : 0.1 + 0.15 * rng.next_uniform();

  UtilityFn u = [&] {
    switch (which_u % 3) {
      case 0:
        return UtilityFn::log_linear(p, 1.0, 1.0);
      case 1:
        return UtilityFn::bounded_exp_power(p, p, 0.0, 1.0);
      default: {
        const double q = p == 1.0 ? 1.0 : 1.0 + (p - 1.0) / 2.0;
        return UtilityFn::linear_power(q, p, std::max(1.0, std::pow(2.0, q) / q), 1.0);
      }
    }
  }();
  return Instance{std::move(P), std::move(u), p, k, x0, std::move(w)};
}

}  // namespace wdro::test

#endif
