#include "wdro/wdro.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <new>
#include <string>

#include "constraint.hpp"
#include "inner.hpp"
#include "measure.hpp"
#include "outer.hpp"
#include "sweep.hpp"
#include "utility.hpp"
#include "version.hpp"

using namespace wdro;

namespace {

thread_local std::string g_last_error;

wdro_status status_of(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
      return WDRO_ERR_INVALID_ARGUMENT;
    case Errc::ball_violation:
      return WDRO_ERR_BALL_VIOLATION;
    case Errc::degenerate_support:
      return WDRO_ERR_DEGENERATE_SUPPORT;
    case Errc::degenerate_probe:
      return WDRO_ERR_DEGENERATE_PROBE;
    case Errc::inconsistent_metadata:
      return WDRO_ERR_INCONSISTENT_METADATA;
    case Errc::ill_posed:
      return WDRO_ERR_ILL_POSED;
    case Errc::numerical_failure:
      return WDRO_ERR_NUMERICAL;
    case Errc::not_applicable:
      return WDRO_ERR_NOT_APPLICABLE;
    case Errc::infeasible_constraint:
      return WDRO_ERR_INFEASIBLE;
    case Errc::io_error:
      return WDRO_ERR_IO;
  }
  return WDRO_ERR_NUMERICAL;
}

template <typename F>
wdro_status guarded(F&& fn) {
  try {
    fn();
    return WDRO_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return WDRO_ERR_NOMEM;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WDRO_ERR_NUMERICAL;
  }
}

wdro_status bad_arg(const char* what) {
  g_last_error = what;
  return WDRO_ERR_INVALID_ARGUMENT;
}

SolveOptions to_core(const wdro_solve_options* o) {
  SolveOptions s;
  if (o) {
    s.eta0 = o->eta0;
    if (o->max_iterations > 0) s.max_iterations = o->max_iterations;
    if (o->grad_tol > 0) s.grad_tol = o->grad_tol;
    if (o->gap_tol > 0) s.gap_tol = o->gap_tol;
    if (o->threads > 0) s.threads = o->threads;
  }
  return s;
}

}  // namespace

struct wdro_utility {
  UtilityFn fn;
};
struct wdro_measure {
  DiscreteMeasure m;
};
struct wdro_constraint {
  ConstraintSet c;
};
struct wdro_inner_solution {
  InnerSolution s;
};
struct wdro_outer_solution {
  OuterSolution s;
  int dim;
};
struct wdro_sweep {
  SweepResult r;
  int dim;
};

extern "C" {

const char* wdro_version(void) { return kVersion; }
const char* wdro_last_error(void) { return g_last_error.c_str(); }

/* ------------------------- utility ------------------------- */

wdro_status wdro_utility_create(const char* kind, double q, double p_growth, double c1,
                                double x_lower, wdro_utility** out) {
  if (!kind || !out) return bad_arg("utility_create: null argument");
  return guarded([&] {
    const std::string k = kind;
    UtilityFn fn = [&] {
      if (k == "bounded_exp_power") return UtilityFn::bounded_exp_power(q, p_growth, c1, x_lower > 0 ? x_lower : 1.0);
      if (k == "log_linear")
        return UtilityFn::log_linear(p_growth > 0 ? p_growth : 1.0, c1 > 0 ? c1 : 1.0,
                                     x_lower > 0 ? x_lower : 1.0);
      if (k == "linear_power") return UtilityFn::linear_power(q, p_growth, c1, x_lower > 0 ? x_lower : 1.0);
      fail(Errc::invalid_argument, "utility_create: unknown kind '" + k + "'");
    }();
    *out = new wdro_utility{std::move(fn)};
  });
}

wdro_status wdro_utility_create_piecewise(const wdro_piece* pieces, int n, double p_growth,
                                          double c1, double x_lower, wdro_utility** out) {
  if (!pieces || n < 1 || !out) return bad_arg("utility_create_piecewise: null argument");
  return guarded([&] {
    std::vector<PieceAtom> ps;
    for (int i = 0; i < n; ++i) {
      PieceAtom a;
      switch (pieces[i].form) {
        case 0:
          a.form = PieceAtom::Form::affine;
          break;
        case 1:
          a.form = PieceAtom::Form::logarithm;
          break;
        case 2:
          a.form = PieceAtom::Form::power;
          break;
        case 3:
          a.form = PieceAtom::Form::exponential;
          break;
        default:
          fail(Errc::invalid_argument, "piecewise: unknown piece form");
      }
      a.a = pieces[i].a;
      a.b = pieces[i].b;
      a.c = pieces[i].c;
      a.e = pieces[i].e;
      a.upper = pieces[i].upper;
      ps.push_back(a);
    }
    *out = new wdro_utility{UtilityFn::custom_piecewise(std::move(ps), p_growth, c1, x_lower)};
  });
}

void wdro_utility_free(wdro_utility* u) { delete u; }

wdro_status wdro_utility_value(const wdro_utility* u, double x, double* out) {
  if (!u || !out) return bad_arg("utility_value: null argument");
  return guarded([&] { *out = u->fn.value(x); });
}

wdro_status wdro_utility_derivative(const wdro_utility* u, double x, double* out) {
  if (!u || !out) return bad_arg("utility_derivative: null argument");
  return guarded([&] { *out = u->fn.derivative(x); });
}

wdro_status wdro_utility_admissibility(const wdro_utility* u, double x_max, int points,
                                       wdro_admissibility* out) {
  if (!u || !out) return bad_arg("utility_admissibility: null argument");
  return guarded([&] {
    GridSpec grid;
    if (x_max > 0) grid.x_max = x_max;
    if (points > 0) grid.points = points;
    const AdmissibilityReport rep = check_admissibility(u->fn, grid);
    out->pass = rep.pass;
    out->monotone_ok = rep.monotone_ok;
    out->concave_ok = rep.concave_ok;
    out->negative_at_x_lower = rep.negative_at_x_lower;
    out->growth_ok = rep.growth_ok;
    out->first_violation_x = rep.first_violation_x;
    std::snprintf(out->violation, sizeof out->violation, "%s", rep.violation.c_str());
  });
}

wdro_status wdro_utility_ae(const wdro_utility* u, wdro_ae_report* out) {
  if (!u || !out) return bad_arg("utility_ae: null argument");
  return guarded([&] {
    const AeReport rep = analyze_ae(u->fn);
    out->ae_plus = rep.ae_plus;
    out->ae_minus = rep.ae_minus;
    out->case_tag = static_cast<int>(rep.case_tag);
    out->gamma_lower = rep.gamma_lower;
    out->gamma_upper = rep.gamma_upper;
    out->envelope_c = rep.envelope_c;
    out->x_upper = rep.x_upper;
  });
}

wdro_status wdro_utility_ae_estimate(const wdro_utility* u, int side, const double* probes,
                                     int n, double* value, int* stabilized) {
  if (!u || !probes || n < 3 || !value) return bad_arg("ae_estimate: bad arguments");
  return guarded([&] {
    const AeEstimate est =
        estimate_ae(u->fn, side >= 0 ? AeSide::plus_infinity : AeSide::minus_infinity,
                    std::span<const double>(probes, static_cast<std::size_t>(n)));
    *value = est.value;
    if (stabilized) *stabilized = est.stabilized;
  });
}

wdro_status wdro_utility_growth_envelope(const wdro_utility* u, double* c_hat) {
  if (!u || !c_hat) return bad_arg("growth_envelope: null argument");
  return guarded([&] { *c_hat = growth_envelope(u->fn, analyze_ae(u->fn)); });
}

wdro_status wdro_utility_fit_growth(const wdro_utility* u, double p, double* c1, double* x_lower,
                                    int* found) {
  if (!u || !c1 || !x_lower || !found) return bad_arg("fit_growth: null argument");
  return guarded([&] {
    const GrowthFit fit = suggest_growth_metadata(u->fn, p);
    *c1 = fit.c1;
    *x_lower = fit.x_lower;
    *found = fit.found;
  });
}

/* ------------------------- measure ------------------------- */

wdro_status wdro_measure_create(int dim, int count, const double* atoms, const double* weights,
                                wdro_measure** out) {
  if (!atoms || !out || dim < 1 || count < 1) return bad_arg("measure_create: bad arguments");
  return guarded([&] {
    std::vector<double> a(atoms, atoms + static_cast<std::size_t>(dim) * count);
    if (weights) {
      std::vector<double> w(weights, weights + count);
      *out = new wdro_measure{DiscreteMeasure(dim, std::move(a), std::move(w))};
    } else {
      *out = new wdro_measure{DiscreteMeasure::uniform(dim, std::move(a))};
    }
  });
}

wdro_status wdro_measure_synthetic_gaussian(int dim, int count, uint64_t seed,
                                            const double* mean, const double* sigma,
                                            wdro_measure** out) {
  if (!mean || !sigma || !out) return bad_arg("synthetic_gaussian: null argument");
  return guarded([&] {
    *out = new wdro_measure{DiscreteMeasure::synthetic_gaussian(
        dim, count, seed, std::span<const double>(mean, static_cast<std::size_t>(dim)),
        std::span<const double>(sigma, static_cast<std::size_t>(dim)))};
  });
}

void wdro_measure_free(wdro_measure* m) { delete m; }

int wdro_measure_dim(const wdro_measure* m) { return m ? m->m.dim() : 0; }
int wdro_measure_size(const wdro_measure* m) { return m ? m->m.size() : 0; }

wdro_status wdro_measure_atom(const wdro_measure* m, int i, double* coords) {
  if (!m || !coords || i < 0 || i >= m->m.size()) return bad_arg("measure_atom: bad index");
  const auto a = m->m.atom(i);
  std::memcpy(coords, a.data(), a.size() * sizeof(double));
  return WDRO_OK;
}

double wdro_measure_weight(const wdro_measure* m, int i) {
  return (m && i >= 0 && i < m->m.size()) ? m->m.weight(i) : 0.0;
}

wdro_status wdro_measure_moment(const wdro_measure* m, double p, double* out) {
  if (!m || !out) return bad_arg("measure_moment: null argument");
  return guarded([&] { *out = moment_cp(m->m, p); });
}

wdro_status wdro_wasserstein(const wdro_measure* a, const wdro_measure* b, double p,
                             double* out) {
  if (!a || !b || !out) return bad_arg("wasserstein: null argument");
  return guarded([&] { *out = wasserstein_discrete(a->m, b->m, p); });
}

wdro_status wdro_measure_dirac_mixture(const wdro_measure* m, const double* x, double alpha,
                                       double p, double k, wdro_measure** out) {
  if (!m || !x || !out) return bad_arg("dirac_mixture: null argument");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    Vec xt(x, x + m->m.dim());
    *out = new wdro_measure{dirac_mixture(m->m, xt, alpha, spec)};
  });
}

wdro_status wdro_measure_pstar(const wdro_measure* m, double p, double k, wdro_measure** out) {
  if (!m || !out) return bad_arg("pstar: null argument");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    *out = new wdro_measure{construct_pstar(spec)};
  });
}

wdro_status wdro_measure_shift(const wdro_measure* m, const double* v, wdro_measure** out) {
  if (!m || !v || !out) return bad_arg("shift: null argument");
  return guarded([&] {
    Vec vv(v, v + m->m.dim());
    *out = new wdro_measure{shift_measure(m->m, vv)};
  });
}

wdro_status wdro_measure_beta_star(const wdro_measure* m, int directions, double* beta,
                                   int* degenerate) {
  if (!m || !beta) return bad_arg("beta_star: null argument");
  return guarded([&] {
    const BetaStar bs = beta_star(m->m, directions > 0 ? directions : 1024);
    *beta = bs.value;
    if (degenerate) *degenerate = bs.degenerate;
  });
}

wdro_status wdro_measure_na_check(const wdro_measure* m, int* no_arbitrage, double* direction) {
  if (!m || !no_arbitrage) return bad_arg("na_check: null argument");
  return guarded([&] {
    const NaResult res = na_check(m->m);
    *no_arbitrage = res.no_arbitrage;
    if (direction && !res.no_arbitrage)
      std::memcpy(direction, res.arbitrage_direction.data(),
                  res.arbitrage_direction.size() * sizeof(double));
  });
}

wdro_status wdro_measure_to_json(const wdro_measure* m, char* buf, size_t cap, size_t* needed) {
  if (!m) return bad_arg("measure_to_json: null argument");
  return guarded([&] {
    const std::string s = m->m.to_json();
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

/* ------------------------- inner ------------------------- */

wdro_status wdro_inner_solve(const wdro_utility* u, const wdro_measure* m, double p, double k,
                             double x0, const double* w, int dim, wdro_inner_solution** out) {
  if (!u || !m || !w || !out) return bad_arg("inner_solve: null argument");
  if (dim != m->m.dim()) return bad_arg("inner_solve: dimension mismatch");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    InnerOptions io;
    io.build_worst_measure = true;
    io.certify_ball = true;
    *out = new wdro_inner_solution{
        inner_value(u->fn, spec, x0, std::span<const double>(w, static_cast<std::size_t>(dim)), io)};
  });
}

void wdro_inner_free(wdro_inner_solution* s) { delete s; }

double wdro_inner_value(const wdro_inner_solution* s) { return s ? s->s.value : 0.0; }
double wdro_inner_lambda(const wdro_inner_solution* s) { return s ? s->s.dual_lambda : 0.0; }
int wdro_inner_saturated(const wdro_inner_solution* s) { return s ? s->s.saturated : 0; }
double wdro_inner_gap(const wdro_inner_solution* s) { return s ? s->s.duality_gap : 0.0; }
double wdro_inner_budget_norm(const wdro_inner_solution* s) {
  return s ? s->s.budget.budget_norm : 0.0;
}

wdro_status wdro_inner_budget(const wdro_inner_solution* s, double* z, int cap) {
  if (!s || !z) return bad_arg("inner_budget: null argument");
  if (cap < static_cast<int>(s->s.budget.z.size())) return bad_arg("inner_budget: buffer too small");
  std::memcpy(z, s->s.budget.z.data(), s->s.budget.z.size() * sizeof(double));
  return WDRO_OK;
}

wdro_status wdro_inner_worst_measure(const wdro_inner_solution* s, wdro_measure** out) {
  if (!s || !out) return bad_arg("inner_worst_measure: null argument");
  if (!s->s.worst_measure) return bad_arg("inner_worst_measure: not built");
  return guarded([&] { *out = new wdro_measure{*s->s.worst_measure}; });
}

wdro_status wdro_inner_oracle(const wdro_utility* u, const wdro_measure* m, double p, double k,
                              double x0, const double* w, int dim, int grid, double* out) {
  if (!u || !m || !w || !out) return bad_arg("inner_oracle: null argument");
  if (dim != m->m.dim()) return bad_arg("inner_oracle: dimension mismatch");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    *out = inner_oracle(u->fn, spec, x0, std::span<const double>(w, static_cast<std::size_t>(dim)),
                        grid);
  });
}

wdro_status wdro_shift_upper_bound(const wdro_utility* u, const wdro_measure* m, double x0,
                                   const double* w, int dim, double k, double* out) {
  if (!u || !m || !w || !out) return bad_arg("shift_upper_bound: null argument");
  return guarded([&] {
    *out = shift_upper_bound(u->fn, m->m, x0,
                             std::span<const double>(w, static_cast<std::size_t>(dim)), k);
  });
}

wdro_status wdro_divergence_witness(const wdro_utility* u, const wdro_measure* m, double p,
                                    double k, double x0, const double* w, int dim, double target,
                                    wdro_measure** measure, double* k_used, double* expectation,
                                    int* reached) {
  if (!u || !m || !w) return bad_arg("divergence_witness: null argument");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    WitnessResult res = divergence_witness(
        u->fn, spec, x0, std::span<const double>(w, static_cast<std::size_t>(dim)), target);
    if (measure) *measure = new wdro_measure{std::move(res.measure)};
    if (k_used) *k_used = res.k_used;
    if (expectation) *expectation = res.expectation;
    if (reached) *reached = res.reached;
  });
}

/* ------------------------- constraint ------------------------- */

wdro_status wdro_constraint_create(const char* kind, int dim, double a, wdro_constraint** out) {
  if (!kind || !out) return bad_arg("constraint_create: null argument");
  return guarded([&] {
    const std::string k = kind;
    ConstraintSet c = [&] {
      if (k == "halfspace") return ConstraintSet::halfspace(dim, a);
      if (k == "halfspace_nonneg") return ConstraintSet::halfspace_nonneg(dim, a);
      if (k == "two_sided") return ConstraintSet::two_sided(dim, a);
      fail(Errc::invalid_argument, "constraint_create: unknown kind '" + k + "'");
    }();
    *out = new wdro_constraint{std::move(c)};
  });
}

wdro_status wdro_constraint_polyhedron(int dim, int rows, const double* normals,
                                       const double* offsets, wdro_constraint** out) {
  if (!normals || !offsets || !out || rows < 1) return bad_arg("polyhedron: bad arguments");
  return guarded([&] {
    std::vector<Vec> ns(rows);
    for (int r = 0; r < rows; ++r)
      ns[r].assign(normals + static_cast<std::size_t>(r) * dim,
                   normals + static_cast<std::size_t>(r + 1) * dim);
    Vec off(offsets, offsets + rows);
    *out = new wdro_constraint{ConstraintSet::polyhedron(dim, std::move(ns), std::move(off))};
  });
}

wdro_status wdro_constraint_singleton(int dim, const double* w0, wdro_constraint** out) {
  if (!w0 || !out) return bad_arg("singleton: null argument");
  return guarded([&] {
    *out = new wdro_constraint{ConstraintSet::singleton(Vec(w0, w0 + dim))};
  });
}

wdro_status wdro_constraint_finite_list(int dim, int count, const double* candidates,
                                        wdro_constraint** out) {
  if (!candidates || !out || count < 1) return bad_arg("finite_list: bad arguments");
  return guarded([&] {
    std::vector<Vec> cs(count);
    for (int i = 0; i < count; ++i)
      cs[i].assign(candidates + static_cast<std::size_t>(i) * dim,
                   candidates + static_cast<std::size_t>(i + 1) * dim);
    *out = new wdro_constraint{ConstraintSet::finite_list(dim, std::move(cs))};
  });
}

void wdro_constraint_free(wdro_constraint* c) { delete c; }

wdro_status wdro_constraint_project(const wdro_constraint* c, const double* w, double* out) {
  if (!c || !w || !out) return bad_arg("constraint_project: null argument");
  return guarded([&] {
    const Vec r = c->c.project(std::span<const double>(w, static_cast<std::size_t>(c->c.dim())));
    std::memcpy(out, r.data(), r.size() * sizeof(double));
  });
}

int wdro_constraint_contains(const wdro_constraint* c, const double* w, double tol) {
  if (!c || !w) return 0;
  return c->c.contains(std::span<const double>(w, static_cast<std::size_t>(c->c.dim())),
                       tol > 0 ? tol : 1e-9);
}

wdro_status wdro_constraint_min_norm_points(const wdro_constraint* c, double* buf,
                                            int cap_points, int* count) {
  if (!c || !count) return bad_arg("min_norm_points: null argument");
  return guarded([&] {
    const auto pts = c->c.min_norm_points();
    *count = static_cast<int>(pts.size());
    if (buf) {
      const int n = std::min<int>(cap_points, static_cast<int>(pts.size()));
      for (int i = 0; i < n; ++i)
        std::memcpy(buf + static_cast<std::size_t>(i) * c->c.dim(), pts[i].data(),
                    pts[i].size() * sizeof(double));
    }
  });
}

/* ------------------------- outer / sweep ------------------------- */

void wdro_solve_options_init(wdro_solve_options* opts) {
  if (!opts) return;
  opts->eta0 = 0.0;
  opts->max_iterations = 5000;
  opts->grad_tol = 1e-6;
  opts->gap_tol = 1e-8;
  opts->threads = 1;
}

wdro_status wdro_maximize(const wdro_utility* u, const wdro_measure* m, double p, double k,
                          double x0, const wdro_constraint* D, const wdro_solve_options* opts,
                          wdro_outer_solution** out) {
  if (!u || !m || !D || !out) return bad_arg("maximize: null argument");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    *out = new wdro_outer_solution{maximize(u->fn, spec, x0, D->c, to_core(opts)), D->c.dim()};
  });
}

void wdro_outer_free(wdro_outer_solution* s) { delete s; }

double wdro_outer_value(const wdro_outer_solution* s) { return s ? s->s.value : 0.0; }

wdro_status wdro_outer_weights(const wdro_outer_solution* s, double* w, int cap) {
  if (!s || !w) return bad_arg("outer_weights: null argument");
  if (cap < static_cast<int>(s->s.w_k.size())) return bad_arg("outer_weights: buffer too small");
  std::memcpy(w, s->s.w_k.data(), s->s.w_k.size() * sizeof(double));
  return WDRO_OK;
}

int wdro_outer_iterations(const wdro_outer_solution* s) { return s ? s->s.iterations : 0; }
int wdro_outer_piece(const wdro_outer_solution* s) { return s ? s->s.piece_tag : 0; }
double wdro_outer_k_bound(const wdro_outer_solution* s) { return s ? s->s.k_bound_used : 0.0; }
double wdro_outer_lambda(const wdro_outer_solution* s) { return s ? s->s.dual_lambda : 0.0; }
int wdro_outer_saturated(const wdro_outer_solution* s) { return s ? s->s.saturated : 0; }
double wdro_outer_gap(const wdro_outer_solution* s) { return s ? s->s.duality_gap : 0.0; }
double wdro_outer_budget_norm(const wdro_outer_solution* s) {
  return s ? s->s.inner_budget_norm : 0.0;
}

wdro_status wdro_weight_bound(const wdro_utility* u, const wdro_measure* m, double p, double k,
                              double x0, const wdro_constraint* D, double* K) {
  if (!u || !m || !D || !K) return bad_arg("weight_bound: null argument");
  return guarded([&] {
    AmbiguitySpec spec(m->m, p, k);
    const AeReport meta = analyze_ae(u->fn);
    const Vec zero(D->c.dim(), 0.0);
    const Vec w_star = D->c.project(zero);
    const DiscreteMeasure pstar = construct_pstar(spec);
    const BetaStar bs = beta_star(pstar, D->c.dim() <= 3 ? 1024 : 2048);
    require(!bs.degenerate, Errc::degenerate_support, "weight_bound: degenerate P*");
    const double l_star = duracell_l_star(u->fn, m->m, p, k);
    const double c1p = 2.0 * u->fn.c1() - u->fn.value(-u->fn.x_lower());
    const double cp = moment_cp(m->m, p);
    const double sup_minus =
        c1p * (1.0 + pow_p(std::fabs(x0), p) * std::pow(2.0, p - 1.0) *
                         (1.0 + pow_p(norm2(w_star), p) * pow_p(cp + k, p)));
    *K = weight_bound_K(u->fn, meta, x0, w_star, bs.value, l_star, sup_minus);
  });
}

wdro_status wdro_sweep_run(const wdro_utility* u, const wdro_measure* m, double p,
                           const double* ks, int nk, double x0, const wdro_constraint* D,
                           const wdro_solve_options* opts, int warm_chain, wdro_sweep** out) {
  if (!u || !m || !ks || nk < 1 || !D || !out) return bad_arg("sweep_run: bad arguments");
  return guarded([&] {
    SweepOptions so;
    so.solve = to_core(opts);
    so.warm_start_chain = warm_chain != 0;
    so.threads = opts && opts->threads > 0 ? opts->threads : 1;
    *out = new wdro_sweep{sweep_k(u->fn, m->m, p,
                                  std::span<const double>(ks, static_cast<std::size_t>(nk)), x0,
                                  D->c, so),
                          D->c.dim()};
  });
}

void wdro_sweep_free(wdro_sweep* s) { delete s; }

int wdro_sweep_count(const wdro_sweep* s) {
  return s ? static_cast<int>(s->r.records.size()) : 0;
}

wdro_status wdro_sweep_record_get(const wdro_sweep* s, int i, wdro_sweep_record* rec,
                                  double* w) {
  if (!s || !rec || i < 0 || i >= static_cast<int>(s->r.records.size()))
    return bad_arg("sweep_record_get: bad index");
  const SweepRecord& r = s->r.records[static_cast<std::size_t>(i)];
  rec->k = r.k;
  rec->norm = r.norm;
  rec->value = r.value;
  rec->dist = r.dist;
  rec->iterations = r.iterations;
  rec->wall_ms = r.wall_ms;
  rec->ok = r.ok;
  rec->bound_at_min_norm = r.bound_at_min_norm;
  if (w && r.ok) std::memcpy(w, r.w.data(), r.w.size() * sizeof(double));
  return WDRO_OK;
}

double wdro_sweep_min_norm(const wdro_sweep* s) { return s ? s->r.min_norm : 0.0; }
int wdro_sweep_value_monotone(const wdro_sweep* s) { return s ? s->r.value_monotone_ok : 0; }

int wdro_sweep_excursions(const wdro_sweep* s) {
  if (!s) return 0;
  std::vector<double> deltas{};
  const ConvergenceReport rep = convergence_report(s->r, deltas);
  return rep.non_monotone_excursions;
}

wdro_status wdro_sweep_k0(const wdro_sweep* s, double delta, double* k0, int* found) {
  if (!s || !k0 || !found) return bad_arg("sweep_k0: null argument");
  return guarded([&] {
    const double deltas[1] = {delta};
    const ConvergenceReport rep = convergence_report(s->r, deltas);
    *k0 = rep.k0_table[0].k0;
    *found = rep.k0_table[0].found;
  });
}

} /* extern "C" */
