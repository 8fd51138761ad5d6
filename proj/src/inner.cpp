#include "inner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wdro {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct AtomProblem {
  double a = 0.0;   // unperturbed wealth
  double mu = 0.0;  // scenario weight
};

// min_{z in [lo,hi]} U(a - c z) + lambda z^p, ties resolved toward smaller z.
struct AtomMin {
  double z = 0.0;
  double q = 0.0;
};

class InnerSolver {
public:
  InnerSolver(const UtilityFn& u, double c, double p, double k, std::vector<AtomProblem> atoms)
      : u_(u), c_(c), p_(p), k_(k), atoms_(std::move(atoms)) {
    const int n = static_cast<int>(atoms_.size());
    zcap_.resize(n);
    lo_bound_.assign(n, 0.0);
    hi_bound_.resize(n);
    for (int i = 0; i < n; ++i) {
      zcap_[i] = (k_ / std::pow(atoms_[i].mu, 1.0 / p_)) * (1.0 + 1e-3);
      hi_bound_[i] = zcap_[i];
    }
  }

  double objective(int i, double z, double lambda) const {
    return u_.value(atoms_[i].a - c_ * z) + lambda * pow_p(z, p_);
  }

  double objective_slope(int i, double z, double lambda) const {
    return -c_ * u_.derivative(atoms_[i].a - c_ * z) + lambda * p_ * pow_p(z, p_ - 1.0);
  }

  AtomMin minimize_atom(int i, double lambda, double lo, double hi) const {
    lo = std::clamp(lo, 0.0, zcap_[i]);
    hi = std::clamp(hi, lo, zcap_[i]);

    // Coarse scan (linear plus a geometric tail toward lo), strict '<' keeps
    // the smaller z on ties.
    double best_z = lo, best_q = objective(i, lo, lambda);
    auto consider = [&](double z) {
      const double q = objective(i, z, lambda);
      if (q < best_q) {
        best_q = q;
        best_z = z;
      }
    };
    const double width = hi - lo;
    if (width > 0.0) {
      for (int j = 1; j <= 16; ++j) consider(lo + width * j / 16.0);
      for (int t = 1; t <= 6; ++t) consider(lo + width * std::pow(0.25, t));
      consider(hi);

      // Golden-section inside the bracket around the scan winner.
      double a = std::max(lo, best_z - width / 16.0);
      double b = std::min(hi, best_z + width / 16.0);
      const double tol = 1e-10 * (1.0 + zcap_[i]);
      double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
      double f1 = objective(i, x1, lambda), f2 = objective(i, x2, lambda);
      int guard = 0;
      while (b - a > tol && guard++ < 120) {
        if (f1 <= f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - kGolden * (b - a);
          f1 = objective(i, x1, lambda);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + kGolden * (b - a);
          f2 = objective(i, x2, lambda);
        }
      }
      consider(0.5 * (a + b));

      // Derivative polish when the slope brackets a root.
      double pl = std::max(lo, best_z - tol * 8.0), ph = std::min(hi, best_z + tol * 8.0);
      double sl = objective_slope(i, pl, lambda), sh = objective_slope(i, ph, lambda);
      if (sl < 0.0 && sh > 0.0) {
        for (int it = 0; it < 60 && ph - pl > 1e-14 * (1.0 + zcap_[i]); ++it) {
          const double mid = 0.5 * (pl + ph);
          if (objective_slope(i, mid, lambda) < 0.0)
            pl = mid;
          else
            ph = mid;
        }
        consider(0.5 * (pl + ph));
      }
    }
    return {best_z, best_q};
  }

  // Budget residual sum_i mu_i z_i(lambda)^p - k^p; monotone non-increasing
  // in lambda, so the evaluated bracket endpoints bound future argmins.
  double residual(double lambda, Vec& z_out, Vec& q_out) {
    const int n = static_cast<int>(atoms_.size());
    z_out.resize(n);
    q_out.resize(n);
    double used = 0.0;
    for (int i = 0; i < n; ++i) {
      const AtomMin m = minimize_atom(i, lambda, lo_bound_[i], hi_bound_[i]);
      z_out[i] = m.z;
      q_out[i] = m.q;
      used += atoms_[i].mu * pow_p(m.z, p_);
    }
    return used - pow_p(k_, p_);
  }

  void note_infeasible_side(const Vec& z) {  // R > 0: lambda too small
    for (std::size_t i = 0; i < z.size(); ++i)
      hi_bound_[i] = std::min(hi_bound_[i], z[i] + 1e-6 * zcap_[i] + 1e-12);
  }

  void note_feasible_side(const Vec& z) {  // R < 0: lambda too large
    for (std::size_t i = 0; i < z.size(); ++i)
      lo_bound_[i] = std::max(lo_bound_[i], z[i] - 1e-6 * zcap_[i] - 1e-12);
  }

  const std::vector<AtomProblem>& atoms() const { return atoms_; }
  double zcap(int i) const { return zcap_[i]; }
  double c() const { return c_; }
  double p() const { return p_; }
  double k() const { return k_; }
  const UtilityFn& u() const { return u_; }

private:
  const UtilityFn& u_;
  double c_, p_, k_;
  std::vector<AtomProblem> atoms_;
  Vec zcap_;
  Vec lo_bound_, hi_bound_;
};

DiscreteMeasure build_worst_measure(const DiscreteMeasure& P, double x0,
                                    std::span<const double> w, const Vec& z) {
  const int d = P.dim();
  const double wn = norm2(w);
  const double sgn = x0 >= 0.0 ? 1.0 : -1.0;
  std::vector<double> atoms = P.atoms_flat();
  for (int i = 0; i < P.size(); ++i)
    for (int j = 0; j < d; ++j)
      atoms[static_cast<std::size_t>(i) * d + j] -= sgn * z[i] * w[j] / wn;
  return DiscreteMeasure(d, std::move(atoms), P.weights());
}

}  // namespace

Vec scenario_wealth(double x0, std::span<const double> w, const DiscreteMeasure& P) {
  require(x0 != 0.0 && std::isfinite(x0), Errc::invalid_argument,
          "scenario_wealth: x0 must be nonzero");
  require(static_cast<int>(w.size()) == P.dim(), Errc::invalid_argument,
          "scenario_wealth: dimension mismatch");
  require(all_finite(w), Errc::invalid_argument, "scenario_wealth: non-finite weights");
  Vec a(P.size());
  for (int i = 0; i < P.size(); ++i) a[i] = x0 + x0 * dot(w, P.atom(i));
  return a;
}

double finim_lower_bound(const UtilityFn& u, const DiscreteMeasure& P, double x0,
                         std::span<const double> w, double p, double k) {
  // U^-(x) <= C1'(1+|x|^p) for all x, with C1' = 2 c1 - U(-x_lower); the
  // doubled c1 absorbs a declared growth exponent below p.
  const double c1p = 2.0 * u.c1() - u.value(-u.x_lower());
  const double cp = moment_cp(P, p);
  const double wn = norm2(w);
  return -c1p - c1p * pow_p(std::fabs(x0), p) * std::pow(2.0, p - 1.0) *
                    (1.0 + pow_p(wn, p) * pow_p(cp + k, p));
}

double shift_upper_bound(const UtilityFn& u, const DiscreteMeasure& P, double x0,
                         std::span<const double> w, double k) {
  const double wn = norm2(w);
  require(wn > 0.0, Errc::invalid_argument, "shift_upper_bound: w must be nonzero");
  double e_abs = 0.0;
  for (int i = 0; i < P.size(); ++i) e_abs += P.weight(i) * norm2(P.atom(i));
  return u.value(x0 + std::fabs(x0) * wn * e_abs - k * std::fabs(x0) * wn);
}

InnerSolution inner_value(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                          std::span<const double> w, const InnerOptions& opts) {
  const DiscreteMeasure& P = spec.baseline;
  const double p = spec.order_p;
  const double k = spec.radius_k;
  require(u.p_growth() <= p + 1e-12, Errc::ill_posed,
          "inner_value: declared growth exponent exceeds the transport order (the problem value "
          "is -infinity)");

  Vec a = scenario_wealth(x0, w, P);
  const double wn = norm2(w);
  const int n = P.size();

  InnerSolution sol;
  sol.wealth = a;
  sol.budget.z.assign(n, 0.0);

  if (wn == 0.0) {
    sol.value = u.value(x0);
    sol.dual_lambda = 0.0;
    sol.saturated = false;
    if (opts.build_worst_measure) sol.worst_measure = P;
    return sol;
  }

  const double c = std::fabs(x0) * wn;
  std::vector<AtomProblem> atoms(n);
  for (int i = 0; i < n; ++i) atoms[i] = {a[i], P.weight(i)};
  // Atoms with zero weight do not enter the budget; pin their z to 0.
  std::vector<int> live;
  for (int i = 0; i < n; ++i)
    if (atoms[i].mu > 0.0) live.push_back(i);
  std::vector<AtomProblem> live_atoms;
  for (int i : live) live_atoms.push_back(atoms[i]);

  InnerSolver solver(u, c, p, k, live_atoms);

  // Dual domain guard: under the declared growth bound every h_i(lambda) is
  // bounded below from lambda0 on; for p = 1 the tail slope at the probe
  // horizon sharpens it.
  double lambda0 = u.c1() * pow_p(c, p) * std::pow(2.0, p) + 1.0;
  if (p == 1.0) lambda0 = std::max(lambda0, c * u.derivative(-1e6) * (1.0 + 1e-9) + 1e-12);
  if (opts.lambda_hint > 0.0) lambda0 = opts.lambda_hint;

  Vec z_cur, q_cur;
  double lam = lambda0;
  double r = solver.residual(lam, z_cur, q_cur);

  double lam_lo = 0.0, lam_hi = 0.0, r_lo = 0.0, r_hi = 0.0;
  Vec z_lo, z_hi, q_hi;
  bool bracketed = false;
  int evals = 1;
  if (r > 0.0) {
    lam_lo = lam;
    r_lo = r;
    z_lo = z_cur;
    solver.note_infeasible_side(z_cur);
    for (; evals < opts.max_lambda_iters; ++evals) {
      lam *= 2.0;
      r = solver.residual(lam, z_cur, q_cur);
      if (r <= 0.0) {
        lam_hi = lam;
        r_hi = r;
        z_hi = z_cur;
        q_hi = q_cur;
        solver.note_feasible_side(z_cur);
        bracketed = true;
        break;
      }
      lam_lo = lam;
      r_lo = r;
      z_lo = z_cur;
      solver.note_infeasible_side(z_cur);
    }
  } else {
    lam_hi = lam;
    r_hi = r;
    z_hi = z_cur;
    q_hi = q_cur;
    solver.note_feasible_side(z_cur);
    for (; evals < opts.max_lambda_iters; ++evals) {
      lam *= 0.5;
      if (lam < 1e-280) {
        // Even a vanishing price keeps the budget slack: non-saturating
        // optimum (plateaued utility).
        lam_lo = 0.0;
        r_lo = r_hi;
        z_lo = z_hi;
        bracketed = true;
        break;
      }
      r = solver.residual(lam, z_cur, q_cur);
      if (r > 0.0) {
        lam_lo = lam;
        r_lo = r;
        z_lo = z_cur;
        solver.note_infeasible_side(z_cur);
        bracketed = true;
        break;
      }
      lam_hi = lam;
      r_hi = r;
      z_hi = z_cur;
      q_hi = q_cur;
      solver.note_feasible_side(z_cur);
    }
  }
  require(bracketed, Errc::numerical_failure,
          "inner_value: could not bracket the dual multiplier (the declared growth bound may "
          "fail, making the worst case -infinity)");

  // Safeguarded bisection (secant step when it stays inside the bracket).
  for (int it = 0; it < opts.max_lambda_iters && lam_hi - lam_lo > 1e-13 * (1.0 + lam_hi); ++it) {
    double mid = 0.5 * (lam_lo + lam_hi);
    if (r_lo > 0.0 && r_hi < 0.0) {
      const double sec = lam_lo + r_lo * (lam_hi - lam_lo) / (r_lo - r_hi);
      if (sec > lam_lo + 0.1 * (lam_hi - lam_lo) && sec < lam_hi - 0.1 * (lam_hi - lam_lo))
        mid = sec;
    }
    r = solver.residual(mid, z_cur, q_cur);
    if (r > 0.0) {
      lam_lo = mid;
      r_lo = r;
      z_lo = z_cur;
      solver.note_infeasible_side(z_cur);
    } else {
      lam_hi = mid;
      r_hi = r;
      z_hi = z_cur;
      q_hi = q_cur;
      solver.note_feasible_side(z_cur);
    }
  }

  // Feasible-side solution, then fill any residual slack along flat tie
  // segments (exactly the affine-tail degeneracy, broken toward smaller z
  // first in atom order).
  Vec z = z_hi;
  const double kp = pow_p(k, p);
  double used = 0.0;
  const int nl = static_cast<int>(live.size());
  for (int i = 0; i < nl; ++i) used += live_atoms[i].mu * pow_p(z[i], p);
  if (used < kp * (1.0 - 1e-12) && !z_lo.empty()) {
    for (int i = 0; i < nl && used < kp * (1.0 - 1e-12); ++i) {
      if (z_lo[i] <= z[i] + 1e-12) continue;
      const double room = kp - (used - live_atoms[i].mu * pow_p(z[i], p));
      const double target = std::pow(room / live_atoms[i].mu, 1.0 / p);
      const double z_try = std::min(z_lo[i], target);
      if (z_try <= z[i]) continue;
      const double q_old = solver.objective(i, z[i], lam_hi);
      const double q_new = solver.objective(i, z_try, lam_hi);
      if (q_new <= q_old + 1e-10 * (1.0 + std::fabs(q_old))) {
        used += live_atoms[i].mu * (pow_p(z_try, p) - pow_p(z[i], p));
        z[i] = z_try;
      }
    }
  }

  // Assemble.
  double value = 0.0;
  for (int i = 0; i < nl; ++i)
    value += live_atoms[i].mu * u.value(live_atoms[i].a - c * z[i]);
  double dual = -lam_hi * kp;
  for (int i = 0; i < nl; ++i) dual += live_atoms[i].mu * q_hi[i];

  sol.value = value;
  sol.dual_lambda = lam_hi;
  sol.duality_gap = value - dual;
  for (int t = 0; t < nl; ++t) sol.budget.z[live[t]] = z[t];
  double norm_p = 0.0;
  for (int t = 0; t < nl; ++t) norm_p += live_atoms[t].mu * pow_p(z[t], p);
  sol.budget.budget_norm = std::pow(norm_p, 1.0 / p);
  sol.saturated = std::fabs(sol.budget.budget_norm - k) <= 1e-6 * k;

  const double gap_allow = opts.gap_tol * (1.0 + std::fabs(value));
  if (sol.duality_gap > gap_allow)
    fail(Errc::numerical_failure,
         "inner_value: duality gap not closed (worst case may need to split an atom); gap = " +
             std::to_string(sol.duality_gap));

  // Contracts checked on every solve.
  double value_at_p = 0.0;
  for (int i = 0; i < n; ++i) value_at_p += P.weight(i) * u.value(a[i]);
  require(sol.value <= value_at_p + 1e-9 * (1.0 + std::fabs(value_at_p)),
          Errc::numerical_failure, "inner_value: exceeded the baseline expectation");
  const double lower = finim_lower_bound(u, P, x0, w, p, k);
  require(sol.value >= lower - 1e-9 * (1.0 + std::fabs(lower)), Errc::numerical_failure,
          "inner_value: below the a-priori lower bound");
  const double upper = shift_upper_bound(u, P, x0, w, k);
  require(sol.value <= upper + 1e-9 * (1.0 + std::fabs(upper)), Errc::numerical_failure,
          "inner_value: above the shift upper bound");

  if (opts.build_worst_measure) {
    sol.worst_measure = build_worst_measure(P, x0, w, sol.budget.z);
    if (opts.certify_ball) {
      const double dist = wasserstein_discrete(*sol.worst_measure, P, p);
      require(dist <= k * (1.0 + 1e-9) + 1e-12, Errc::ball_violation,
              "inner_value: worst measure left the ambiguity ball");
    }
  }
  return sol;
}

double inner_oracle(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                    std::span<const double> w, int grid) {
  const DiscreteMeasure& P = spec.baseline;
  require(P.size() <= 6, Errc::invalid_argument, "inner_oracle: too many atoms (n <= 6)");
  require(grid >= 2, Errc::invalid_argument, "inner_oracle: grid too small");
  const double p = spec.order_p, k = spec.radius_k;
  const double wn = norm2(w);
  Vec a = scenario_wealth(x0, w, P);
  if (wn == 0.0) return u.value(x0);
  const double c = std::fabs(x0) * wn;
  const int n = P.size();
  const double kp = pow_p(k, p);

  Vec caps(n);
  for (int i = 0; i < n; ++i)
    caps[i] = P.weight(i) > 0.0 ? k / std::pow(P.weight(i), 1.0 / p) : 0.0;

  double best = std::numeric_limits<double>::infinity();
  Vec z(n, 0.0);

  auto value_of = [&](const Vec& zz) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += P.weight(i) * u.value(a[i] - c * zz[i]);
    return v;
  };

  // Depth-first grid over the first n-1 coordinates; the last coordinate
  // takes grid values and the exact budget completion.
  auto recurse = [&](auto&& self, int depth, double used) -> void {
    if (depth == n - 1) {
      const double room = kp - used;
      if (room < -1e-12) return;
      const double mu = P.weight(depth);
      const double complete =
          mu > 0.0 ? std::pow(std::max(0.0, room) / mu, 1.0 / p) : caps[depth];
      for (int j = 0; j < grid; ++j) {
        const double zz = caps[depth] * j / (grid - 1);
        if (mu * pow_p(zz, p) > room + 1e-12) break;
        z[depth] = zz;
        best = std::min(best, value_of(z));
      }
      z[depth] = std::min(complete, caps[depth]);
      best = std::min(best, value_of(z));
      z[depth] = 0.0;
      return;
    }
    const double mu = P.weight(depth);
    for (int j = 0; j < grid; ++j) {
      const double zz = caps[depth] * j / (grid - 1);
      const double add = mu * pow_p(zz, p);
      if (used + add > kp + 1e-12) break;
      z[depth] = zz;
      self(self, depth + 1, used + add);
    }
    z[depth] = 0.0;
  };
  recurse(recurse, 0, 0.0);
  return best;
}

bool radial_check(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                  std::span<const double> w, int directions) {
  const DiscreteMeasure& P = spec.baseline;
  require(P.size() <= 4 && P.dim() <= 3, Errc::invalid_argument,
          "radial_check: instance too large (n <= 4, d <= 3)");
  const double wn = norm2(w);
  require(wn > 0.0, Errc::invalid_argument, "radial_check: w must be nonzero");

  const InnerSolution sol = inner_value(u, spec, x0, w, {.build_worst_measure = false});
  const std::vector<double> dirs = sphere_directions(P.dim(), directions);
  const int nd = static_cast<int>(dirs.size()) / P.dim();

  // The objective separates across atoms, so scanning directions atom by
  // atom covers every joint assignment with the same magnitudes.
  double best_total = 0.0;
  for (int i = 0; i < P.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < nd; ++t) {
      std::span<const double> dir(dirs.data() + static_cast<std::size_t>(t) * P.dim(),
                                  static_cast<std::size_t>(P.dim()));
      const double wealth = sol.wealth[i] + x0 * sol.budget.z[i] * dot(w, dir);
      best = std::min(best, u.value(wealth));
    }
    best_total += P.weight(i) * best;
  }
  return sol.value <= best_total + 1e-9;
}

DiscreteMeasure reduce_1d(const DiscreteMeasure& P, std::span<const double> w) {
  const double wn = norm2(w);
  require(wn > 0.0, Errc::invalid_argument, "reduce_1d: w must be nonzero");
  require(static_cast<int>(w.size()) == P.dim(), Errc::invalid_argument,
          "reduce_1d: dimension mismatch");

  const int n = P.size();
  std::vector<std::pair<double, double>> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = {dot(w, P.atom(i)) / wn, P.weight(i)};
  std::sort(proj.begin(), proj.end());

  std::vector<double> atoms, weights;
  for (int i = 0; i < n; ++i) {
    if (!atoms.empty() && std::fabs(proj[i].first - atoms.back()) <= 1e-12) {
      weights.back() += proj[i].second;
    } else {
      atoms.push_back(proj[i].first);
      weights.push_back(proj[i].second);
    }
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) acc += weights[i];
  weights.back() = std::max(0.0, 1.0 - acc);
  return DiscreteMeasure(1, std::move(atoms), std::move(weights));
}

WitnessResult divergence_witness(const UtilityFn& u, const AmbiguitySpec& spec, double x0,
                                 std::span<const double> w, double target) {
  const DiscreteMeasure& P = spec.baseline;
  const double p = spec.order_p;
  const double wn = norm2(w);
  require(wn > 0.0, Errc::invalid_argument, "divergence_witness: w must be nonzero");

  double base = 0.0;
  const Vec a = scenario_wealth(x0, w, P);
  for (int i = 0; i < P.size(); ++i) base += P.weight(i) * u.value(a[i]);
  require(std::isfinite(base), Errc::invalid_argument,
          "divergence_witness: baseline expectation must be finite");

  const double cp = moment_cp(P, p);
  const double sgn = x0 >= 0.0 ? 1.0 : -1.0;

  double kprime = spec.radius_k;
  double best_val = std::numeric_limits<double>::infinity();
  double best_k = kprime;
  for (int it = 0; it < 200; ++it) {
    const double alpha =
        std::min(1.0, pow_p(kprime, p) / (std::pow(2.0, p - 1.0) *
                                          (pow_p(kprime / wn, p) + pow_p(cp, p))));
    const double val = (1.0 - alpha) * base + alpha * u.value(x0 - kprime * std::fabs(x0));
    if (val < best_val) {
      best_val = val;
      best_k = kprime;
    }
    if (val < target) break;
    kprime *= 2.0;
    if (!std::isfinite(kprime)) break;
  }

  const double alpha =
      std::min(1.0, pow_p(best_k, p) / (std::pow(2.0, p - 1.0) *
                                        (pow_p(best_k / wn, p) + pow_p(cp, p))));
  Vec xk(P.dim());
  for (int j = 0; j < P.dim(); ++j) xk[j] = -best_k * sgn * w[j] / (wn * wn);

  std::vector<double> atoms = P.atoms_flat();
  std::vector<double> weights = P.weights();
  for (auto& wi : weights) wi *= (1.0 - alpha);
  atoms.insert(atoms.end(), xk.begin(), xk.end());
  weights.push_back(alpha);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) acc += weights[i];
  weights.back() = std::max(0.0, 1.0 - acc);

  WitnessResult res{DiscreteMeasure(P.dim(), std::move(atoms), std::move(weights)), best_k,
                    best_val, best_val < target};
  require(wasserstein_discrete(res.measure, P, p) <= best_k * (1.0 + 1e-9) + 1e-12,
          Errc::ball_violation, "divergence_witness: witness left the ball");
  return res;
}

Vec envelope_supergradient(const UtilityFn& u, const DiscreteMeasure& P, double x0,
                           std::span<const double> w, const InnerSolution& sol) {
  const int d = P.dim();
  const double wn = norm2(w);
  Vec g(d, 0.0);
  for (int i = 0; i < P.size(); ++i) {
    const double c = std::fabs(x0) * wn;
    const double up = u.derivative(sol.wealth[i] - c * sol.budget.z[i]);
    const auto x = P.atom(i);
    for (int j = 0; j < d; ++j) {
      double dir = x0 * x[j];
      if (wn > 0.0) dir -= std::fabs(x0) * sol.budget.z[i] * w[j] / wn;
      g[j] += P.weight(i) * up * dir;
    }
  }
  return g;
}

}  // namespace wdro
