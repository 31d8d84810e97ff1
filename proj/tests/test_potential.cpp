#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "degmin/potential.hpp"
#include "degmin/quadrature.hpp"

using namespace degmin;

namespace {

// Independent sup oracle: grid search of st - f(s) over s in [0, 50].
double conjugate_oracle(const PotentialModel& m, double t) {
  double best = 0.0;
  for (double s = 0.0; s <= 50.0; s += 1e-4) {
    best = std::max(best, s * t - m.f(s));
  }
  return best;
}

double central_diff(const ScalarFn& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("eikonal potential values and derivatives") {
  const PotentialModel m = make_eikonal();
  CHECK(m.sigma == 1.0);
  CHECK(m.second_deriv_class == SecondDerivClass::BlowsUpAtSigma);
  CHECK(m.f(1.0) == 0.0);
  CHECK(m.f(0.0) == 0.0);
  CHECK(m.fp(1.0) == 0.0);
  CHECK(m.fp(std::sqrt(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  // f' cross-checked by a finite difference of f away from the kink.
  for (double s : {1.5, 2.0, 3.0, 7.0}) {
    CHECK(m.fp(s) == doctest::Approx(central_diff(m.f, s, 1e-6)).epsilon(1e-7));
    CHECK(m.fpp(s) ==
          doctest::Approx(central_diff(m.fp, s, 1e-6)).epsilon(1e-7));
  }
}

TEST_CASE("congestion potential") {
  const PotentialModel m2 = make_congestion(2.0);
  CHECK(m2.f(2.0) == doctest::Approx(0.5));
  CHECK(m2.fp(1.0) == 0.0);
  CHECK(m2.second_deriv_class == SecondDerivClass::C2ThroughSigma);

  const PotentialModel m3 = make_congestion(3.0);
  CHECK(m3.second_deriv_class == SecondDerivClass::C2ThroughSigma);
  CHECK(m3.fpp(1.5) == doctest::Approx(1.0));
  CHECK(m3.fpp(1.5) ==
        doctest::Approx(central_diff(m3.fp, 1.5, 1e-6)).epsilon(1e-8));

  const PotentialModel m15 = make_congestion(1.5);
  CHECK(m15.second_deriv_class == SecondDerivClass::BlowsUpAtSigma);

  CHECK_THROWS_AS(make_congestion(1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_congestion(0.5), std::invalid_argument);
}

TEST_CASE("potential lookup by name") {
  CHECK(make_potential_by_name("eikonal").name == "eikonal");
  CHECK(make_potential_by_name("congestion:q=2.5").sigma == 1.0);
  CHECK_THROWS_AS(make_potential_by_name("unknown"), std::invalid_argument);
}

TEST_CASE("convexity and superlinearity proxies") {
  for (const auto& m : {make_eikonal(), make_congestion(2.0),
                        make_congestion(1.5), make_congestion(4.0)}) {
    double prev_fp = -1.0;
    for (double s = 0.0; s <= 20.0; s += 0.05) {
      CHECK(m.fp(s) >= prev_fp - 1e-12);  // f' nondecreasing
      prev_fp = m.fp(s);
      if (s > m.sigma) CHECK(m.fpp(s) > 0.0);
    }
    CHECK(m.f(100.0 * m.sigma) / (100.0 * m.sigma) >
          m.f(10.0 * m.sigma) / (10.0 * m.sigma));
  }
}

TEST_CASE("conjugate_gp closed forms and plateau convention") {
  const PotentialModel eik = make_eikonal();
  FenchelConjugate c(eik);
  CHECK(conjugate_gp(c, 2.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(conjugate_gp(c, 0.0) == eik.sigma);

  const PotentialModel con = make_congestion(2.0);
  FenchelConjugate cc(con);
  CHECK(conjugate_gp(cc, 0.5) == doctest::Approx(1.5).epsilon(1e-12));

  CHECK_THROWS_AS(conjugate_gp(c, -1.0), std::invalid_argument);
}

TEST_CASE("generic inversion matches the closed form") {
  PotentialModel m = make_eikonal();
  m.name = "custom";  // drops the closed-form fast path
  FenchelConjugate generic(m);
  FenchelConjugate closed(make_eikonal());
  REQUIRE(!generic.closed_form_gp);
  for (double t : {0.01, 0.3, 1.0, 2.0, 17.0}) {
    CHECK(conjugate_gp(generic, t) ==
          doctest::Approx(std::sqrt(1.0 + t * t)).epsilon(1e-10));
  }
}

TEST_CASE("inversion range error for a bounded f'") {
  PotentialModel m;
  m.sigma = 1.0;
  m.name = "bounded";
  m.f = [](double s) { return s <= 1.0 ? 0.0 : s - 1.0 + std::exp(1.0 - s) - 1.0; };
  m.fp = [](double s) { return s <= 1.0 ? 0.0 : 1.0 - std::exp(1.0 - s); };
  m.fpp = [](double s) { return std::exp(1.0 - s); };
  FenchelConjugate c(m);
  CHECK_THROWS_AS(conjugate_gp(c, 2.0), InversionRangeError);
}

TEST_CASE("conjugate_g against the grid-search oracle") {
  const PotentialModel eik = make_eikonal();
  FenchelConjugate c(eik);
  CHECK(conjugate_g(c, 0.0) == 0.0);
  const double s5 = std::sqrt(5.0);
  CHECK(conjugate_g(c, 2.0) ==
        doctest::Approx(2.0 * s5 - eik.f(s5)).epsilon(1e-12));
  CHECK(conjugate_g(c, 2.0) == doctest::Approx(2.9579).epsilon(1e-4));

  const PotentialModel con = make_congestion(2.0);
  FenchelConjugate cc(con);
  CHECK(conjugate_g(cc, 1.0) == doctest::Approx(1.5).epsilon(1e-10));

  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    CHECK(conjugate_g(c, t) == doctest::Approx(conjugate_oracle(eik, t))
                                   .epsilon(1e-6));
    CHECK(conjugate_g(cc, t) == doctest::Approx(conjugate_oracle(con, t))
                                    .epsilon(1e-6));
  }
}

TEST_CASE("inversion identity and monotonicity on random t") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> dist(1e-6, 100.0);
  for (const auto& m : {make_eikonal(), make_congestion(2.0)}) {
    FenchelConjugate c(m);
    for (int i = 0; i < 1000; ++i) {
      const double t = dist(rng);
      const double s = conjugate_gp(c, t);
      CHECK(s >= m.sigma);
      CHECK(m.fp(s) == doctest::Approx(t).epsilon(10.0 * c.inversion_tolerance));
    }
    double prev = 0.0;
    for (double t = 0.0; t <= 10.0; t += 0.01) {
      const double s = conjugate_gp(c, t);
      CHECK(s >= prev - 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("Fenchel-Young identity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(1e-4, 50.0);
  for (const auto& m : {make_eikonal(), make_congestion(3.0)}) {
    FenchelConjugate c(m);
    for (int i = 0; i < 1000; ++i) {
      const double t = dist(rng);
      const double s = conjugate_gp(c, t);
      CHECK(m.f(s) + conjugate_g(c, t) ==
            doctest::Approx(t * s).epsilon(1e-10));
    }
  }
}

TEST_CASE("coefficient functions a and b") {
  const PotentialModel eik = make_eikonal();
  CHECK(coeff_a(eik, 2.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(coeff_a(eik, 1.0) == 0.0);
  CHECK(coeff_b(eik, std::sqrt(2.0)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(coeff_b(eik, 0.5) == 0.0);

  const PotentialModel c2 = make_congestion(2.0);
  CHECK(coeff_a(c2, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  const PotentialModel c3 = make_congestion(3.0);
  CHECK(coeff_b(c3, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  // b = s^2 / f'' cross-checked with a finite-difference f''.
  CHECK(coeff_b(c3, 2.0) ==
        doctest::Approx(4.0 / central_diff(c3.fp, 2.0, 1e-6)).epsilon(1e-7));
}

TEST_CASE("a and b are continuous at sigma") {
  for (const auto& m : {make_eikonal(), make_congestion(1.5)}) {
    double prev_a = 1.0, prev_b = 1.0;
    for (int k = 1; k <= 6; ++k) {
      const double s = m.sigma + std::pow(10.0, -k);
      const double av = std::abs(coeff_a(m, s));
      const double bv = std::abs(coeff_b(m, s));
      CHECK(av <= prev_a + 1e-12);
      CHECK(bv <= prev_b + 1e-12);
      prev_a = av;
      prev_b = bv;
    }
    CHECK(std::abs(coeff_a(m, m.sigma + 1e-6)) < 2e-3);
    CHECK(std::abs(coeff_b(m, m.sigma + 1e-6)) < 2e-2);
  }
}

TEST_CASE("Phi by quadrature") {
  const PotentialModel eik = make_eikonal();
  CHECK(phi(eik, 1.0) == 0.0);
  CHECK(phi(eik, 0.3) == 0.0);
  // Closed form theta + sinh(theta) cosh(theta) at theta = asinh(1).
  const double theta = std::asinh(1.0);
  const double closed = theta + std::sinh(theta) * std::cosh(theta);
  CHECK(phi(eik, std::sqrt(2.0)) == doctest::Approx(closed).epsilon(1e-9));
  CHECK(phi(eik, std::sqrt(2.0)) == doctest::Approx(2.2956).epsilon(1e-4));

  const PotentialModel con = make_congestion(2.0);
  CHECK(phi(con, 2.0) == doctest::Approx(3.0).epsilon(1e-10));

  // Independent route: integration by parts gives Phi(t) = 2(t f'(t) - f(t)).
  for (const auto& m : {eik, con, make_congestion(1.7)}) {
    for (double t : {1.2, 1.8, 3.0}) {
      CHECK(phi(m, t) ==
            doctest::Approx(2.0 * (t * m.fp(t) - m.f(t))).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadrature handles smooth and endpoint-singular integrands") {
  auto smooth = [](double x) { return std::sin(x); };
  CHECK(integrate(smooth, 0.0, 1.0).value ==
        doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
  // Integrable inverse-sqrt endpoint singularity.
  auto singular = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(integrate(singular, 1e-12, 1.0, 1e-8).value ==
        doctest::Approx(2.0).epsilon(1e-4));
}
