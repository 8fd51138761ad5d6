#ifndef WDRO_INNER_HPP
#define WDRO_INNER_HPP

#include <optional>

#include "measure.hpp"
#include "utility.hpp"

namespace wdro {

// Per-scenario radial perturbation magnitudes |Z| with their L^p(mu) size.
struct RadialBudget {
  Vec z;
  double budget_norm = 0.0;
};

struct InnerSolution {
  double value = 0.0;
  RadialBudget budget;
  double dual_lambda = 0.0;
  bool saturated = false;
  double duality_gap = 0.0;
  Vec wealth;  // a_i = x0 + x0 <w, x_i>
  std::optional<DiscreteMeasure> worst_measure;
};

struct InnerOptions {
  int max_lambda_iters = 200;
  double gap_tol = 1e-8;
  bool build_worst_measure = true;
  bool certify_ball = false;      // exact-LP membership check of worst_measure
  double lambda_hint = 0.0;       // bracket seed from a previous nearby solve
};

// a_i = x0 + x0 <w, x_i> per atom.
Vec scenario_wealth(double x0, std::span<const double> w, const DiscreteMeasure& P);

// u(k,w) = inf over the radial budget of sum_i mu_i U(a_i - |x0| z_i |w|),
// solved through the scalar dual: bisection on the budget residual of
// lambda -> argmin_z [U(a_i - c z) + lambda z^p]. The duality gap against the
// assembled primal point is verified on every solve.
InnerSolution inner_value(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                          std::span<const double> w, const InnerOptions& opts = {});

// Brute-force validator: grid over the budget allocations (n <= 6).
double inner_oracle(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                    std::span<const double> w, int grid);

// Direction-grid check that the worst perturbation points against
// sign(x0) w / |w|; true when no per-atom direction assignment beats the
// radial value by more than 1e-9.
bool radial_check(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                  std::span<const double> w, int directions);

// Pushforward of P under <w/|w|, .>, coincident projections merged.
DiscreteMeasure reduce_1d(const DiscreteMeasure& P, std::span<const double> w);

// Analytic bound U(x0 + |x0||w| E_P|X| - k |x0||w|).
double shift_upper_bound(const UtilityFn& u, const DiscreteMeasure& P, double x0,
                         std::span<const double> w, double k);

// Explicit members of growing balls driving E[U] below `target`; for
// bounded-below utilities the target may be unreachable and the best value
// found is reported instead.
struct WitnessResult {
  DiscreteMeasure measure;
  double k_used = 0.0;
  double expectation = 0.0;
  bool reached = false;
};

WitnessResult divergence_witness(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                                 std::span<const double> w, double target);

// Danskin supergradient of w -> u(k,w) at the inner optimizer.
Vec envelope_supergradient(const UtilityFn& u, const DiscreteMeasure& P, double x0,
                           std::span<const double> w, const InnerSolution& sol);

// eq:finim a-priori lower bound for u(k,w); also asserted inside inner_value.
double finim_lower_bound(const UtilityFn& u, const DiscreteMeasure& P, double x0,
                         std::span<const double> w, double p, double k);

}  // namespace wdro

#endif
