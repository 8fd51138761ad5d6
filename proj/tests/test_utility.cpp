#include <cmath>

#include "doctest.h"
#include "rng.hpp"
#include "utility.hpp"

using namespace wdro;

TEST_CASE("built-in evaluation") {
  const UtilityFn log_lin = UtilityFn::log_linear();
  CHECK(log_lin.value(1.0) == doctest::Approx(0.0));
  CHECK(log_lin.value(std::exp(1.0)) == doctest::Approx(1.0));
  CHECK(log_lin.value(0.0) == doctest::Approx(-1.0));

  const UtilityFn lp2 = UtilityFn::linear_power(2.0);
  CHECK(lp2.value(-1.0) == doctest::Approx(-1.5));
  CHECK(lp2.value(2.0) == doctest::Approx(2.0));

  const UtilityFn bep1 = UtilityFn::bounded_exp_power(1.0);
  CHECK(bep1.value(0.0) == doctest::Approx(0.0));
  CHECK(bep1.value(-3.0) == doctest::Approx(-3.0));
  CHECK(bep1.value(50.0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS((void)log_lin.value(std::nan("")), Error);
}

TEST_CASE("built-in derivatives and finite differences") {
  const UtilityFn log_lin = UtilityFn::log_linear();
  CHECK(log_lin.derivative(0.5) == doctest::Approx(1.0));
  CHECK(log_lin.derivative(-7.0) == doctest::Approx(1.0));
  CHECK(log_lin.derivative(2.0) == doctest::Approx(0.5));

  const UtilityFn bep2 = UtilityFn::bounded_exp_power(2.0);
  CHECK(bep2.derivative(-1.0) == doctest::Approx(2.0));

  for (const UtilityFn& u : {UtilityFn::log_linear(), UtilityFn::bounded_exp_power(2.0),
                             UtilityFn::linear_power(1.5)}) {
    for (double x : {-40.0, -3.2, -0.7, 0.4, 1.7, 9.0, 120.0}) {
      const double h = 1e-6 * (1.0 + std::fabs(x));
      const double fd = (u.value(x + h) - u.value(x - h)) / (2.0 * h);
      const double an = u.derivative(x);
      CHECK(std::fabs(fd - an) <= 1e-5 * (1.0 + std::fabs(an)));
    }
  }
}

TEST_CASE("concavity and monotonicity on random pairs") {
  SplitMix64 rng(20240817);
  for (const UtilityFn& u : {UtilityFn::log_linear(), UtilityFn::bounded_exp_power(1.5),
                             UtilityFn::linear_power(2.0)}) {
    for (int it = 0; it < 10000; ++it) {
      const double x1 = 200.0 * (rng.next_uniform() - 0.5);
      const double x2 = 200.0 * (rng.next_uniform() - 0.5);
      const double t = rng.next_uniform();
      const double lhs = u.value(t * x1 + (1.0 - t) * x2);
      const double rhs = t * u.value(x1) + (1.0 - t) * u.value(x2);
      const double scale = 1.0 + std::max(std::fabs(lhs), std::fabs(rhs));
      CHECK(lhs >= rhs - 1e-10 * scale);
      if (x1 < x2) CHECK(u.value(x1) <= u.value(x2) + 1e-10 * scale);
    }
  }
}

TEST_CASE("admissibility of the shipped families") {
  CHECK(check_admissibility(UtilityFn::linear_power(2.0, 2.0)).pass);
  CHECK(check_admissibility(UtilityFn::bounded_exp_power(1.0, 1.0)).pass);
  CHECK(check_admissibility(UtilityFn::log_linear(1.0)).pass);
  // log_linear also satisfies the growth bound declared at p = 2.
  CHECK(check_admissibility(UtilityFn::log_linear(2.0)).pass);
}

TEST_CASE("exponential tail fails any polynomial growth bound") {
  // U(x) = 1 - exp(-x) on all of R, declared with p_growth = 1.
  std::vector<PieceAtom> pieces{{PieceAtom::Form::exponential, 1.0, -1.0, -1.0, 1.0, 0.0}};
  const UtilityFn cara = UtilityFn::custom_piecewise(std::move(pieces), 1.0, 1.0, 1.0);
  const AdmissibilityReport rep = check_admissibility(cara);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.growth_ok);
  CHECK(rep.first_violation_x < -1.0);
  CHECK(rep.monotone_ok);
}

TEST_CASE("half-line utilities are rejected at construction") {
  std::vector<PieceAtom> pieces{{PieceAtom::Form::logarithm, 0.0, 1.0, 0.0, 1.0, 0.0}};
  CHECK_THROWS_AS((void)UtilityFn::custom_piecewise(std::move(pieces), 1.0, 1.0, 1.0), Error);
}

TEST_CASE("asymptotic elasticity estimates") {
  std::vector<double> probes;
  for (double m = 4.0; m < 2e9; m *= 4.0) probes.push_back(m);

  const AeEstimate ll = estimate_ae(UtilityFn::log_linear(), AeSide::plus_infinity, probes);
  CHECK(std::fabs(ll.value) < 0.06);

  const AeEstimate lp =
      estimate_ae(UtilityFn::linear_power(2.0), AeSide::minus_infinity, probes);
  CHECK(lp.value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(lp.stabilized);

  // Pure linear utility: x U'/U = x/(x) -> exactly 1 from above.
  const UtilityFn lin = UtilityFn::linear_power(1.0);
  const AeEstimate le = estimate_ae(lin, AeSide::plus_infinity, probes);
  CHECK(le.value == doctest::Approx(1.0));
  CHECK(le.stabilized);

  CHECK_THROWS_AS((void)estimate_ae(UtilityFn::log_linear(), AeSide::plus_infinity,
                                    std::vector<double>{0.5, 1.0, 2.0}),
                  Error);
}

TEST_CASE("ae classification") {
  const AeReport ll = analyze_ae(UtilityFn::log_linear());
  CHECK(ll.case_tag == AeCase::rae_plus);
  CHECK(ll.gamma_lower > 0.0);
  CHECK(ll.gamma_lower < 1.0);
  CHECK(ll.gamma_upper == doctest::Approx(1.0));

  const AeReport lp = analyze_ae(UtilityFn::linear_power(2.0, 2.0));
  CHECK(lp.case_tag == AeCase::rae_minus);
  CHECK(lp.ae_minus > 1.0);
  CHECK(lp.ae_minus <= 2.0 + 1e-9);
  CHECK(lp.gamma_lower == doctest::Approx(1.0));
  CHECK(lp.gamma_upper == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(lp.gamma_upper > lp.gamma_lower);

  const AeReport be = analyze_ae(UtilityFn::bounded_exp_power(2.0));
  CHECK(be.case_tag == AeCase::bounded_above);
  CHECK(be.gamma_lower < be.gamma_upper);
}

TEST_CASE("scaling inequalities from concavity") {
  SplitMix64 rng(77);
  const UtilityFn lp = UtilityFn::linear_power(2.0, 2.0);
  // U(lam x) <= lam^g U(x) far out for every exponent g < q = AE_{-inf}(U),
  // and eventually fails for g > q: AE is exactly the supremum.
  for (int it = 0; it < 2000; ++it) {
    const double x = -20.0 - 200.0 * rng.next_uniform();
    const double lam = 1.0 + 9.0 * rng.next_uniform();
    CHECK(lp.value(lam * x) <=
          std::pow(lam, 1.75) * lp.value(x) + 1e-9 * (1.0 + std::fabs(lp.value(x))));
  }
  bool above_fails = false;
  for (double x = -4.0; x > -1e7; x *= 4.0)
    if (lp.value(2.0 * x) > std::pow(2.0, 2.05) * lp.value(x)) above_fails = true;
  CHECK(above_fails);

  for (const UtilityFn& u : {UtilityFn::log_linear(), UtilityFn::linear_power(2.0, 2.0)}) {
    const AeReport rep = analyze_ae(u);
    const double C = rep.envelope_c;
    for (int it = 0; it < 2000; ++it) {
      const double x = 100.0 * (rng.next_uniform() - 0.5);
      const double lam = 1.0 + 9.0 * rng.next_uniform();
      const double lhs = u.value(lam * x);
      for (double gamma : {rep.gamma_lower, rep.gamma_upper}) {
        const double rhs = std::pow(lam, gamma) * (u.value(x) + C);
        CHECK(lhs <= rhs + 1e-9 * (1.0 + std::fabs(rhs)));
      }
    }
  }
}

TEST_CASE("growth envelope") {
  const UtilityFn lp = UtilityFn::linear_power(2.0, 2.0);
  const AeReport lp_rep = analyze_ae(lp);
  const double c_lp = growth_envelope(lp, lp_rep);
  CHECK(c_lp > 0.0);

  const UtilityFn ll = UtilityFn::log_linear();
  const AeReport ll_rep = analyze_ae(ll);
  CHECK(ll_rep.gamma_lower > 0.0);
  CHECK(ll_rep.gamma_lower < 1.0);
  const double c_ll = growth_envelope(ll, ll_rep);
  CHECK(c_ll > 0.0);
  // Determinism: same inputs, same constant.
  CHECK(growth_envelope(ll, ll_rep) == c_ll);

  const AeReport bounded = analyze_ae(UtilityFn::bounded_exp_power(2.0));
  CHECK_THROWS_AS((void)growth_envelope(UtilityFn::bounded_exp_power(2.0), bounded), Error);
}

TEST_CASE("growth metadata fit helper") {
  const GrowthFit fit = suggest_growth_metadata(UtilityFn::linear_power(2.0), 2.0);
  CHECK(fit.found);
  CHECK(fit.x_lower > 0.0);
  const UtilityFn refit = UtilityFn::linear_power(2.0, 2.0, fit.c1, fit.x_lower);
  CHECK(check_admissibility(refit).pass);
}
