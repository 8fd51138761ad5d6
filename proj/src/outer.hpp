#ifndef WDRO_OUTER_HPP
#define WDRO_OUTER_HPP

#include <optional>

#include "constraint.hpp"
#include "inner.hpp"

namespace wdro {

// Constituents of the a-priori weight bound, logged for diagnostics.
struct KBoundLog {
  double eta = 0.0;
  double x_star = 0.0;
  double lambda_star = 0.0;
  double envelope_c = 0.0;
  double k0 = 0.0;
  double k1 = 0.0;
  double beta = 0.0;
  double l_star = 0.0;
  double sup_minus = 0.0;
};

// Explicit radius K = max(K0(x0), K1(x0,w*), |w*|) such that restricting the
// outer search to |w| <= K loses nothing; only for the RAE cases
// (bounded-above utilities use a doubling search instead).
double weight_bound_K(const UtilityFn& u, const AeReport& meta, double x0,
                      std::span<const double> w_star, double beta, double l_star,
                      double sup_minus, KBoundLog* log = nullptr);

// E_{P*}[U^+(1+|X|)] with the P* mixing weight alpha = min(1,(k/(2(C_P+1)))^p).
double duracell_l_star(const UtilityFn& u, const DiscreteMeasure& P, double p, double k);

struct SolveOptions {
  double eta0 = 0.0;  // 0 -> 1/(1 + |x0| C_P)
  int max_iterations = 5000;
  double grad_tol = 1e-6;
  int stall_window = 250;
  double stall_rel = 1e-9;
  double gap_tol = 1e-8;
  int threads = 1;
  std::optional<Vec> warm_start;
};

struct OuterSolution {
  Vec w_k;
  double value = 0.0;
  int iterations = 0;
  int piece_tag = 0;
  double k_bound_used = 0.0;
  // diagnostics from the final inner solve
  double dual_lambda = 0.0;
  bool saturated = false;
  double duality_gap = 0.0;
  double inner_budget_norm = 0.0;
};

// argmax_{w in D} u(k,w): projected supergradient ascent per convex piece,
// boxed by the weight bound, followed by a local pattern refinement.
OuterSolution maximize(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                       const ConstraintSet& D, const SolveOptions& opts = {});

}  // namespace wdro

#endif
