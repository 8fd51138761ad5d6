#include <cmath>

#include "doctest.h"
#include "inner.hpp"
#include "test_helpers.hpp"

using namespace wdro;

TEST_CASE("scenario wealth") {
  const DiscreteMeasure P(2, {0.1, 7.0}, {1.0});
  CHECK(scenario_wealth(1.0, std::vector<double>{1.0, 0.0}, P)[0] == doctest::Approx(1.1));
  const DiscreteMeasure Q(2, {1.0, 1.0}, {1.0});
  CHECK(scenario_wealth(-2.0, std::vector<double>{1.0, 1.0}, Q)[0] == doctest::Approx(-6.0));
  const DiscreteMeasure R(1, {3.0}, {1.0});
  CHECK(scenario_wealth(2.0, std::vector<double>{0.0}, R)[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)scenario_wealth(0.0, std::vector<double>{0.0}, R), Error);
}

TEST_CASE("inner value: w = 0 short circuit") {
  AmbiguitySpec spec(DiscreteMeasure::dirac({0.4}), 2.0, 3.0);
  const UtilityFn u = UtilityFn::log_linear(2.0);
  const InnerSolution s = inner_value(u, spec, 1.7, std::vector<double>{0.0});
  CHECK(s.value == doctest::Approx(u.value(1.7)));
  CHECK_FALSE(s.saturated);
  CHECK(s.budget.budget_norm == doctest::Approx(0.0));
}

TEST_CASE("inner value: single atom closed form") {
  // P = delta_0, x0 = 1, w = 1, p = 2, k = 1, log-linear: z = k, value U(0) = -1.
  AmbiguitySpec spec(DiscreteMeasure::dirac({0.0}), 2.0, 1.0);
  const UtilityFn u = UtilityFn::log_linear(2.0);
  const InnerSolution s = inner_value(u, spec, 1.0, std::vector<double>{1.0});
  CHECK(s.value == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(s.budget.z[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.saturated);
  CHECK(s.duality_gap <= 1e-8 * 2.0);
  REQUIRE(s.worst_measure.has_value());
  CHECK(s.worst_measure->atom(0)[0] == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("inner value equals the closed form for several radii") {
  const UtilityFn u = UtilityFn::bounded_exp_power(2.0, 2.0);
  AmbiguitySpec base(DiscreteMeasure::dirac({0.25}), 2.0, 1.0);
  for (double k : {0.05, 0.2, 0.4}) {
    AmbiguitySpec spec(base.baseline, 2.0, k);
    const InnerSolution s = inner_value(u, spec, 1.0, std::vector<double>{0.8});
    const double direct = u.value(1.0 + 0.8 * 0.25 - 0.8 * k);
    CHECK(s.value == doctest::Approx(direct).epsilon(1e-7));
    CHECK(s.saturated);
  }
}

TEST_CASE("oracle agreement on seed-fixed instances") {
  int idx = 0;
  for (double p : {1.0, 1.5, 2.0}) {
    for (int uix = 0; uix < 3; ++uix) {
      for (int rep = 0; rep < 2; ++rep, ++idx) {
        const test::Instance ins =
            test::make_instance(1000 + 17 * idx, uix, p, 1 + (idx % 3), 1 + (idx % 3));
        AmbiguitySpec spec(ins.P, ins.p, ins.k);
        const InnerSolution s = inner_value(ins.u, spec, ins.x0, ins.w);
        const int grid = ins.P.size() <= 2 ? 600 : 80;
        const double oracle = inner_oracle(ins.u, spec, ins.x0, ins.w, grid);
        CHECK(std::fabs(s.value - oracle) <= 2e-3);
        CHECK(s.value <= oracle + 1e-9);  // solver at least as good as the grid
      }
    }
  }
}

TEST_CASE("oracle sanity") {
  AmbiguitySpec spec(DiscreteMeasure::dirac({0.0}), 2.0, 1.0);
  const UtilityFn u = UtilityFn::log_linear(2.0);
  // single atom, huge grid: matches U(a - c k)
  CHECK(inner_oracle(u, spec, 1.0, std::vector<double>{1.0}, 100000) ==
        doctest::Approx(u.value(0.0)).epsilon(1e-6));
  // k -> 0: reproduces the baseline expectation
  AmbiguitySpec tiny(DiscreteMeasure::dirac({0.0}), 2.0, 1e-9);
  CHECK(inner_oracle(u, tiny, 1.0, std::vector<double>{1.0}, 50) ==
        doctest::Approx(u.value(1.0)).epsilon(1e-6));
  SplitMix64 rng(1);
  const DiscreteMeasure big = test::random_measure(rng, 7, 1, 0.3);
  CHECK_THROWS_AS((void)inner_oracle(u, AmbiguitySpec(big, 2.0, 1.0), 1.0,
                                     std::vector<double>{1.0}, 10),
                  Error);
}

TEST_CASE("saturation for strictly increasing utilities") {
  for (int idx = 0; idx < 12; ++idx) {
    const double p = idx % 3 == 0 ? 1.0 : (idx % 3 == 1 ? 1.5 : 2.0);
    const test::Instance ins = test::make_instance(9000 + idx, idx, p, 1 + idx % 4, 1 + idx % 2);
    AmbiguitySpec spec(ins.P, ins.p, ins.k);
    const InnerSolution s = inner_value(ins.u, spec, ins.x0, ins.w);
    CHECK(std::fabs(s.budget.budget_norm - ins.k) <= 1e-6 * ins.k);
  }
}

TEST_CASE("monotone in k and concave in w") {
  SplitMix64 rng(31337);
  const DiscreteMeasure P = test::random_measure(rng, 6, 2, 0.3);
  const UtilityFn u = UtilityFn::log_linear(2.0);
  const Vec w = {0.4, -0.2};

  double prev = std::numeric_limits<double>::infinity();
  for (double k : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    AmbiguitySpec spec(P, 2.0, k);
    const double v = inner_value(u, spec, 1.0, w).value;
    CHECK(v <= prev + 1e-9);
    prev = v;
  }

  AmbiguitySpec spec(P, 2.0, 0.5);
  for (int it = 0; it < 20; ++it) {
    const Vec w1 = test::random_direction(rng, 2, 0.1 + 0.4 * rng.next_uniform());
    const Vec w2 = test::random_direction(rng, 2, 0.1 + 0.4 * rng.next_uniform());
    const double t = rng.next_uniform();
    Vec wm(2);
    for (int j = 0; j < 2; ++j) wm[j] = t * w1[j] + (1.0 - t) * w2[j];
    const double um = inner_value(u, spec, 1.0, wm).value;
    const double u1 = inner_value(u, spec, 1.0, w1).value;
    const double u2 = inner_value(u, spec, 1.0, w2).value;
    CHECK(um >= t * u1 + (1.0 - t) * u2 - 1e-7);
  }
}

TEST_CASE("value sandwich and worst measure reproduction") {
  SplitMix64 rng(271828);
  for (int it = 0; it < 10; ++it) {
    const test::Instance ins = test::make_instance(500 + it, it, it % 2 ? 2.0 : 1.5, 3, 2);
    AmbiguitySpec spec(ins.P, ins.p, ins.k);
    InnerOptions io;
    io.certify_ball = true;
    const InnerSolution s = inner_value(ins.u, spec, ins.x0, ins.w, io);

    CHECK(s.value >= finim_lower_bound(ins.u, ins.P, ins.x0, ins.w, ins.p, ins.k) - 1e-9);
    CHECK(s.value <= shift_upper_bound(ins.u, ins.P, ins.x0, ins.w, ins.k) + 1e-9);

    // expectation under the worst measure reproduces the value
    REQUIRE(s.worst_measure.has_value());
    double acc = 0.0;
    for (int i = 0; i < s.worst_measure->size(); ++i)
      acc += s.worst_measure->weight(i) *
             ins.u.value(ins.x0 + ins.x0 * dot(ins.w, s.worst_measure->atom(i)));
    CHECK(acc == doctest::Approx(s.value).epsilon(1e-10));
  }
}

TEST_CASE("radial optimality on direction grids") {
  for (int it = 0; it < 6; ++it) {
    const test::Instance ins = test::make_instance(4200 + it, it, 2.0, 1 + it % 3, 1 + it % 2);
    AmbiguitySpec spec(ins.P, ins.p, ins.k);
    CHECK(radial_check(ins.u, spec, ins.x0, ins.w, 256));
    // scaling w leaves the radial conclusion unchanged
    Vec w2 = ins.w;
    for (auto& x : w2) x *= 2.0;
    CHECK(radial_check(ins.u, spec, ins.x0, w2, 256));
  }
}

TEST_CASE("one-dimensional reduction") {
  SUBCASE("projection arithmetic") {
    const DiscreteMeasure P(2, {1.0, 0.0, 0.0, 1.0}, {0.5, 0.5});
    const double s = 1.0 / std::sqrt(2.0);
    const DiscreteMeasure R = reduce_1d(P, std::vector<double>{s, s});
    CHECK(R.size() == 1);
    CHECK(R.atom(0)[0] == doctest::Approx(s));
    CHECK(R.weight(0) == doctest::Approx(1.0));
  }
  SUBCASE("d = 1 is the identity for positive w") {
    const DiscreteMeasure P(1, {0.3, -0.2}, {0.5, 0.5});
    const DiscreteMeasure R = reduce_1d(P, std::vector<double>{2.0});
    CHECK(R.size() == 2);
    CHECK(R.atom(0)[0] == doctest::Approx(-0.2));
  }
  SUBCASE("inner values agree between d-dim and reduced problems") {
    for (int it = 0; it < 8; ++it) {
      const test::Instance ins = test::make_instance(777 + it, it, 2.0, 5, 3);
      AmbiguitySpec spec(ins.P, ins.p, ins.k);
      const double vd = inner_value(ins.u, spec, ins.x0, ins.w).value;
      const DiscreteMeasure red = reduce_1d(ins.P, ins.w);
      AmbiguitySpec spec1(red, ins.p, ins.k);
      const double v1 =
          inner_value(ins.u, spec1, ins.x0, std::vector<double>{norm2(ins.w)}).value;
      CHECK(vd == doctest::Approx(v1).epsilon(1e-8));
    }
  }
}

TEST_CASE("shift upper bound properties") {
  const UtilityFn u = UtilityFn::log_linear(2.0);
  const DiscreteMeasure P = DiscreteMeasure::dirac({0.0});
  CHECK(shift_upper_bound(u, P, 1.5, std::vector<double>{1.0}, 0.0) ==
        doctest::Approx(u.value(1.5)));
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {1.0, 2.0, 4.0, 8.0}) {
    const double b = shift_upper_bound(u, P, 1.0, std::vector<double>{1.0}, k);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("divergence witness") {
  SUBCASE("log-linear diverges past any target") {
    AmbiguitySpec spec(DiscreteMeasure::dirac({0.0}), 1.0, 1.0);
    const UtilityFn u = UtilityFn::log_linear(1.0);
    const WitnessResult res =
        divergence_witness(u, spec, 1.0, std::vector<double>{1.0}, -10.0);
    CHECK(res.reached);
    CHECK(res.expectation < -10.0);
    CHECK(res.k_used <= 16.0);
    CHECK(wasserstein_discrete(res.measure, spec.baseline, 1.0) <= res.k_used * (1.0 + 1e-9));
  }
  SUBCASE("bounded-below custom utility cannot cross its infimum") {
    // exp(x)-1 below 0, x above: non-decreasing, bounded below by -1.
    std::vector<PieceAtom> pieces{{PieceAtom::Form::exponential, -1.0, 1.0, 1.0, 1.0, 0.0},
                                  {PieceAtom::Form::affine, 0.0, 1.0, 0.0, 1.0, 0.0}};
    const UtilityFn u = UtilityFn::custom_piecewise(std::move(pieces), 1.0, 2.0, 1.0);
    AmbiguitySpec spec(DiscreteMeasure::dirac({0.0}), 1.0, 1.0);
    const WitnessResult res =
        divergence_witness(u, spec, 1.0, std::vector<double>{1.0}, -100.0);
    CHECK_FALSE(res.reached);
    CHECK(res.expectation >= -1.0);
  }
}

TEST_CASE("randomized stress: dual solver stays certified across regimes") {
  // Wider sweep over (utility, p, x0 sign, k) in regimes where the
  // scenario-wise worst case is exactly tight; every solve re-checks the
  // duality gap and both a-priori bounds internally.
  int solved = 0;
  for (int it = 0; it < 160; ++it) {
    const double p = it % 3 == 0 ? 1.0 : (it % 3 == 1 ? 1.5 : 2.0);
    const test::Instance ins =
        test::make_instance(0xF0CC5ull + 977 * it, it, p, 1 + it % 6, 1 + it % 3);
    AmbiguitySpec spec(ins.P, ins.p, ins.k);
    const InnerSolution s = inner_value(ins.u, spec, ins.x0, ins.w);
    CHECK(std::isfinite(s.value));
    CHECK(s.duality_gap <= 1e-8 * (1.0 + std::fabs(s.value)));
    ++solved;
  }
  CHECK(solved == 160);
}

TEST_CASE("ill-posed metadata is refused") {
  // Growth exponent above the transport order.
  const UtilityFn u = UtilityFn::linear_power(2.0, 2.0);
  AmbiguitySpec spec(DiscreteMeasure::dirac({0.0}), 1.0, 1.0);
  CHECK_THROWS_AS((void)inner_value(u, spec, 1.0, std::vector<double>{1.0}), Error);
}
