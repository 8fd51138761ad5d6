#include "outer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wdro {

namespace {

// Smallest lambda >= 1 with U(-lambda x_lower) <= -(1+C), doubling then bisection.
double locate_lambda_star(const UtilityFn& u, double envelope_c) {
  const double target = -(1.0 + envelope_c);
  const double xl = u.x_lower();
  if (u.value(-xl) <= target) return 1.0;
  double hi = 1.0;
  bool found = false;
  for (int i = 0; i < 300; ++i) {
    hi *= 2.0;
    if (u.value(-hi * xl) <= target) {
      found = true;
      break;
    }
  }
  require(found, Errc::inconsistent_metadata,
          "weight_bound_K: U(-lambda x_lower) never reaches -(1+C)");
  double lo = hi / 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (u.value(-mid * xl) <= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

double weight_bound_K(const UtilityFn& u, const AeReport& meta, double x0,
                      std::span<const double> w_star, double beta, double l_star,
                      double sup_minus, KBoundLog* log) {
  require(meta.case_tag == AeCase::rae_minus || meta.case_tag == AeCase::rae_plus,
          Errc::not_applicable,
          "weight_bound_K: only the RAE cases use the explicit bound (bounded-above utilities "
          "take the doubling search)");
  require(beta > 0.0 && beta <= 1.0, Errc::invalid_argument, "weight_bound_K: beta in (0,1]");
  require(std::isfinite(sup_minus) && sup_minus >= 0.0, Errc::invalid_argument,
          "weight_bound_K: sup_minus must be finite");
  require(x0 != 0.0, Errc::invalid_argument, "weight_bound_K: x0 must be nonzero");

  const double gl = meta.gamma_lower, gu = meta.gamma_upper;
  require(gl < gu, Errc::inconsistent_metadata, "weight_bound_K: gamma_lower < gamma_upper");
  const double eta = 0.5 * (gl / gu + 1.0);  // gl < eta*gu and eta < 1
  const double C = meta.envelope_c;
  const double lam = locate_lambda_star(u, C);
  const double x_star = lam * u.x_lower();
  const double ax0 = std::fabs(x0);

  const double k0 = std::max({1.0, std::pow(ax0, -1.0 / eta),
                              (1.0 / beta) * (1.0 + x_star / ax0),
                              std::pow((1.0 + x_star) / beta, 1.0 / (1.0 - eta))});
  const double k1 = std::max(
      std::pow(2.0 * (l_star + C) / (beta * std::pow(ax0, gu - gl)), 1.0 / (eta * gu - gl)),
      std::pow(2.0 * sup_minus / (beta * std::pow(ax0, gu)), 1.0 / (eta * gu)));
  const double K = std::max({k0, k1, norm2(w_star)});

  if (log) {
    log->eta = eta;
    log->x_star = x_star;
    log->lambda_star = lam;
    log->envelope_c = C;
    log->k0 = k0;
    log->k1 = k1;
    log->beta = beta;
    log->l_star = l_star;
    log->sup_minus = sup_minus;
  }
  return K;
}

double duracell_l_star(const UtilityFn& u, const DiscreteMeasure& P, double p, double k) {
  const double cp = moment_cp(P, p);
  const double alpha = std::min(1.0, pow_p(k / (2.0 * (cp + 1.0)), p));
  double e_plus = 0.0;
  for (int i = 0; i < P.size(); ++i)
    e_plus += P.weight(i) * std::max(0.0, u.value(1.0 + norm2(P.atom(i))));
  return (1.0 - alpha) * e_plus + alpha * std::max(0.0, u.value(2.0));
}

namespace {

// Dykstra alternating projections onto piece & norm ball.
Vec project_piece_ball(const ConstraintSet& D, int piece, double radius,
                       std::span<const double> w0) {
  Vec x(w0.begin(), w0.end());
  const int d = static_cast<int>(x.size());
  Vec p_corr(d, 0.0), q_corr(d, 0.0);
  for (int it = 0; it < 128; ++it) {
    Vec y(d);
    for (int j = 0; j < d; ++j) y[j] = x[j] + p_corr[j];
    Vec yp = D.project_piece(piece, y);
    for (int j = 0; j < d; ++j) p_corr[j] = y[j] - yp[j];
    Vec z(d);
    for (int j = 0; j < d; ++j) z[j] = yp[j] + q_corr[j];
    Vec zp = z;
    const double nn = norm2(z);
    if (nn > radius)
      for (int j = 0; j < d; ++j) zp[j] = z[j] * radius / nn;
    for (int j = 0; j < d; ++j) q_corr[j] = z[j] - zp[j];
    double moved = 0.0;
    for (int j = 0; j < d; ++j) moved += (zp[j] - x[j]) * (zp[j] - x[j]);
    x = std::move(zp);
    if (moved < 1e-28) break;
  }
  return x;
}

struct PieceOutcome {
  Vec w;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  double K = 0.0;
  InnerSolution inner;
};

struct Evaluator {
  const UtilityFn& u;
  const AmbiguitySpec& spec;
  double x0;
  double gap_tol;
  double lambda_hint = 0.0;

  InnerSolution eval(std::span<const double> w, bool final_solve = false) {
    InnerOptions io;
    io.gap_tol = gap_tol;
    io.build_worst_measure = final_solve;
    io.lambda_hint = final_solve ? 0.0 : lambda_hint;
    InnerSolution s = inner_value(u, spec, x0, w, io);
    lambda_hint = s.dual_lambda;
    return s;
  }
};

PieceOutcome ascend_piece(Evaluator& ev, const ConstraintSet& D, int piece, double K,
                          const SolveOptions& opts, const Vec& start) {
  PieceOutcome out;
  out.K = K;
  const int d = D.dim();
  const double eta0 =
      opts.eta0 > 0.0 ? opts.eta0
                      : 1.0 / (1.0 + std::fabs(ev.x0) * moment_cp(ev.spec.baseline, ev.spec.order_p));

  Vec w = project_piece_ball(D, piece, K, start);
  InnerSolution cur;
  bool have_cur = false;
  // Transient duality-gap escalations during exploration back off the step;
  // the final contract solve never swallows them.
  auto try_eval = [&](const Vec& cand, InnerSolution& sol) {
    try {
      sol = ev.eval(cand);
      return true;
    } catch (const Error& e) {
      if (e.code() == Errc::numerical_failure) return false;
      throw;
    }
  };
  require(try_eval(w, cur), Errc::numerical_failure,
          "maximize: inner solve failed at the feasible start");
  have_cur = true;

  Vec best_w = w;
  double best_v = cur.value;
  int best_iter_at = 0;

  int t = 1;
  for (; t <= opts.max_iterations; ++t) {
    const Vec g = envelope_supergradient(ev.u, ev.spec.baseline, ev.x0, w, cur);

    // Projected-gradient stationarity at the reference step.
    Vec probe(d);
    for (int j = 0; j < d; ++j) probe[j] = w[j] + eta0 * g[j];
    Vec pg = project_piece_ball(D, piece, K, probe);
    double station = 0.0;
    for (int j = 0; j < d; ++j) station += (pg[j] - w[j]) * (pg[j] - w[j]);
    station = std::sqrt(station) / eta0;
    if (station < opts.grad_tol) break;
    if (t - best_iter_at > opts.stall_window) break;

    double step = eta0 / std::sqrt(static_cast<double>(t));
    InnerSolution next;
    Vec wn;
    bool ok = false;
    for (int back = 0; back < 5 && !ok; ++back) {
      wn.assign(d, 0.0);
      for (int j = 0; j < d; ++j) wn[j] = w[j] + step * g[j];
      wn = project_piece_ball(D, piece, K, wn);
      ok = try_eval(wn, next);
      step *= 0.5;
    }
    if (!ok) break;
    w = std::move(wn);
    cur = std::move(next);
    if (cur.value > best_v + opts.stall_rel * (1.0 + std::fabs(best_v))) best_iter_at = t;
    if (cur.value > best_v) {
      best_v = cur.value;
      best_w = w;
    }
  }
  out.iterations = std::min(t, opts.max_iterations);

  // Local pattern refinement around the incumbent (also the certification
  // that ascent did not stop early).
  {
    double r = 0.01 * (1.0 + norm2(best_w));
    for (int level = 0; level < 10; ++level) {
      bool improved = true;
      int guard = 0;
      while (improved && guard++ < 64) {
        improved = false;
        for (int j = 0; j < d && !improved; ++j) {
          for (double sgn : {+1.0, -1.0}) {
            Vec cand = best_w;
            cand[j] += sgn * r;
            cand = project_piece_ball(D, piece, K, cand);
            InnerSolution s;
            if (!try_eval(cand, s)) continue;
            if (s.value > best_v + 1e-12 * (1.0 + std::fabs(best_v))) {
              best_v = s.value;
              best_w = std::move(cand);
              improved = true;
              break;
            }
          }
        }
      }
      r *= 0.25;
    }
  }

  (void)have_cur;
  out.w = best_w;
  out.value = best_v;
  return out;
}

}  // namespace

OuterSolution maximize(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                       const ConstraintSet& D, const SolveOptions& opts) {
  require(x0 != 0.0 && std::isfinite(x0), Errc::invalid_argument, "maximize: x0 must be nonzero");
  require(D.dim() == spec.baseline.dim(), Errc::invalid_argument,
          "maximize: constraint/measure dimension mismatch");
  {
    const GridSpec grid{std::max(1e6, 10.0 * u.x_lower()), 2048};
    const AdmissibilityReport adm = check_admissibility(u, grid);
    require(adm.pass, Errc::ill_posed,
            "maximize: utility failed admissibility (" + adm.violation + " at x = " +
                std::to_string(adm.first_violation_x) + ")");
  }
  const AeReport meta = analyze_ae(u);

  Evaluator ev{u, spec, x0, opts.gap_tol};

  const DiscreteMeasure& P = spec.baseline;
  const double p = spec.order_p, k = spec.radius_k;

  std::vector<PieceOutcome> outcomes;
  for (int piece = 0; piece < D.piece_count(); ++piece) {
    if (D.piece_is_point(piece)) {
      PieceOutcome po;
      po.w = D.piece_point(piece);
      po.value = ev.eval(po.w).value;
      po.K = norm2(po.w);
      outcomes.push_back(std::move(po));
      continue;
    }

    // Reference feasible point: the piece's projection of the origin (for the
    // shipped kinds this is the minimal-norm point of the piece).
    const Vec zero(D.dim(), 0.0);
    const Vec w_star = D.project_piece(piece, zero);

    double K = 0.0;
    bool doubling = false;
    if (meta.case_tag == AeCase::rae_minus || meta.case_tag == AeCase::rae_plus) {
      const DiscreteMeasure pstar = construct_pstar(spec);
      const BetaStar bs = beta_star(pstar, D.dim() <= 3 ? 1024 : 2048);
      require(!bs.degenerate, Errc::degenerate_support,
              "maximize: quantitative no-arbitrage failed for P*");
      const double l_star = duracell_l_star(u, P, p, k);
      const double c1p = 2.0 * u.c1() - u.value(-u.x_lower());
      const double cp = moment_cp(P, p);
      const double sup_minus =
          c1p * (1.0 + pow_p(std::fabs(x0), p) * std::pow(2.0, p - 1.0) *
                           (1.0 + pow_p(norm2(w_star), p) * pow_p(cp + k, p)));
      K = weight_bound_K(u, meta, x0, w_star, bs.value, l_star, sup_minus);
    } else {
      K = norm2(w_star) + 1.0;
      doubling = true;
    }

    Vec start = opts.warm_start && static_cast<int>(opts.warm_start->size()) == D.dim()
                    ? *opts.warm_start
                    : w_star;
    PieceOutcome po;
    for (int rounds = 0; rounds < 60; ++rounds) {
      po = ascend_piece(ev, D, piece, K, opts, start);
      if (!doubling) break;
      if (norm2(po.w) < K - 1e-6 * (1.0 + K)) break;  // boundary strictly inactive
      start = po.w;
      K *= 2.0;
    }
    po.K = K;
    outcomes.push_back(std::move(po));
  }

  // Deterministic reduction: best value, lexicographically smaller w on ties.
  int best = 0;
  for (int i = 1; i < static_cast<int>(outcomes.size()); ++i) {
    const double tie = 1e-12 * (1.0 + std::fabs(outcomes[best].value));
    if (outcomes[i].value > outcomes[best].value + tie)
      best = i;
    else if (outcomes[i].value > outcomes[best].value - tie &&
             lex_less(outcomes[i].w, outcomes[best].w))
      best = i;
  }

  OuterSolution sol;
  sol.w_k = outcomes[best].w;
  sol.value = outcomes[best].value;
  sol.iterations = outcomes[best].iterations;
  sol.piece_tag = best;
  sol.k_bound_used = outcomes[best].K;

  // Final contract solve (worst measure, certification, no hint).
  InnerOptions io;
  io.gap_tol = opts.gap_tol;
  io.build_worst_measure = true;
  io.certify_ball = true;
  const InnerSolution fin = inner_value(u, spec, x0, sol.w_k, io);
  sol.value = fin.value;
  sol.dual_lambda = fin.dual_lambda;
  sol.saturated = fin.saturated;
  sol.duality_gap = fin.duality_gap;
  sol.inner_budget_norm = fin.budget.budget_norm;

  require(D.contains(sol.w_k, 1e-9), Errc::numerical_failure,
          "maximize: returned point violates the constraint set");
  require(norm2(sol.w_k) <= sol.k_bound_used + 1e-9 * (1.0 + sol.k_bound_used),
          Errc::numerical_failure, "maximize: returned point violates the weight bound");
  return sol;
}

}  // namespace wdro
