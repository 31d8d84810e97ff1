#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "degmin/exact.hpp"
#include "degmin/viscosity.hpp"

using namespace degmin;

namespace {

// Jet of the radial profile u(x) = w(|x|) with w' = -g'(r/N).
PointJet radial_jet(const PotentialModel& m, int N, double r, double theta) {
  FenchelConjugate c(m);
  const double t = r / N;
  const double wp = -conjugate_gp(c, t);
  const double step = 1e-6;
  const double wpp =
      -(conjugate_gp(c, t + step) - conjugate_gp(c, t - step)) / (2.0 * step) /
      N;
  const double ex = std::cos(theta), ey = std::sin(theta);
  PointJet jet;
  jet.grad = {wp * ex, wp * ey};
  const double tang = wp / r;
  jet.hess[0][0] = wpp * ex * ex + tang * (1.0 - ex * ex);
  jet.hess[1][1] = wpp * ey * ey + tang * (1.0 - ey * ey);
  jet.hess[0][1] = jet.hess[1][0] = (wpp - tang) * ex * ey;
  return jet;
}

PointJet random_jet(std::mt19937& rng, double pmin, double pmax) {
  std::uniform_real_distribution<double> pd(pmin, pmax);
  std::uniform_real_distribution<double> ad(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> hd(-3.0, 3.0);
  PointJet jet;
  const double p = pd(rng), th = ad(rng);
  jet.grad = {p * std::cos(th), p * std::sin(th)};
  jet.hess[0][0] = hd(rng);
  jet.hess[1][1] = hd(rng);
  jet.hess[0][1] = jet.hess[1][0] = hd(rng);
  return jet;
}

}  // namespace

TEST_CASE("jet helpers") {
  PointJet jet;
  jet.grad = {3.0, 4.0};
  jet.hess = {{{2.0, 1.0}, {1.0, -1.0}}};
  CHECK(jet.grad_norm() == 5.0);
  CHECK(jet.laplacian() == 1.0);
  // X g . g = 2*9 + 2*1*12 - 16
  CHECK(jet.infinity_laplacian() == doctest::Approx(26.0));
}

TEST_CASE("Fn takes the value -1 at a vanishing gradient") {
  const RegularizedPotential r = build_regularized(make_eikonal(), 0.1);
  PointJet jet;
  jet.hess = {{{5.0, 0.0}, {0.0, 5.0}}};
  CHECK(residual_Fn(r, jet) == -1.0);
  jet.grad = {1e-16, 0.0};
  CHECK(residual_Fn(r, jet) == -1.0);
}

TEST_CASE("hand-evaluated min-form, eikonal") {
  PointJet jet;
  jet.grad = {2.0, 0.0};
  jet.hess = {{{1.0, 0.0}, {0.0, 1.0}}};
  // a(2) = 3/4, b(2) = 2 sqrt(3); pde branch = -(1/4)*4 - 4*(3/4)*2 - 2 sqrt(3)
  const double expected = -7.0 - 2.0 * std::sqrt(3.0);
  CHECK(residual_ab(make_eikonal(), jet) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(residual_ab(make_eikonal(), jet) == doctest::Approx(-10.4641).epsilon(1e-4));

  // Threshold branch wins when the pde branch is large and positive.
  PointJet calm;
  calm.grad = {2.0, 0.0};
  calm.hess = {{{-5.0, 0.0}, {0.0, -5.0}}};
  CHECK(residual_ab(make_eikonal(), calm) == doctest::Approx(1.0));
}

TEST_CASE("ab form is the C2 form scaled by b on the pde branch") {
  const PotentialModel con = make_congestion(3.0);
  std::mt19937 rng(17);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const PointJet jet = random_jet(rng, 1.05, 3.0);
    const double p = jet.grad_norm();
    const double c2 = residual_C2(con, jet);
    const double ab = residual_ab(con, jet);
    const double thr = p - con.sigma;
    if (c2 >= thr || ab >= thr) continue;  // threshold branch active somewhere
    ++compared;
    CHECK(ab == doctest::Approx(coeff_b(con, p) * c2).epsilon(1e-9));
  }
  CHECK(compared > 100);
}

TEST_CASE("Fn converges to the unregularized pde branch") {
  const PotentialModel con = make_congestion(3.0);
  const RegularizedPotential tight = build_regularized(con, 1e-6);
  std::mt19937 rng(23);
  for (int i = 0; i < 200; ++i) {
    const PointJet jet = random_jet(rng, 1.1, 3.0);
    const double p = jet.grad_norm();
    const double fn = residual_Fn(tight, jet);
    const double ab = residual_ab(con, jet);
    if (ab >= p - con.sigma) continue;
    CHECK(coeff_b(con, p) * fn == doctest::Approx(ab).epsilon(1e-6));
  }
}

TEST_CASE("C2 form preconditions") {
  PointJet jet;
  jet.grad = {2.0, 0.0};
  CHECK_THROWS_AS(residual_C2(make_eikonal(), jet), std::invalid_argument);
  CHECK_THROWS_AS(residual_C2(make_congestion(1.5), jet),
                  std::invalid_argument);
  PointJet flat;
  CHECK_THROWS_AS(residual_C2(make_congestion(3.0), flat),
                  std::invalid_argument);
  // On the plateau the piecewise f'' vanishes and the pde branch is -1.
  PointJet slow;
  slow.grad = {0.5, 0.0};
  slow.hess = {{{1.0, 0.0}, {0.0, 1.0}}};
  CHECK(residual_C2(make_congestion(3.0), slow) == doctest::Approx(-1.0));
}

TEST_CASE("rescaled a* form") {
  const PotentialModel eik = make_eikonal();
  PointJet jet;
  jet.grad = {2.0, 0.0};
  jet.hess = {{{1.0, 0.0}, {0.0, 1.0}}};
  // a = 3/4, b = 2 sqrt(3), a* = 0.8: denom = 1/20.
  const double expected =
      -(1.0 + 0.2 / 0.05) * 4.0 - 4.0 * 0.75 / 0.05 * 2.0 -
      2.0 * std::sqrt(3.0) / 0.05;
  CHECK(residual_astar(eik, jet, 0.8) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(residual_astar(eik, jet, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(residual_astar(eik, jet, 0.5), std::invalid_argument);
}

TEST_CASE("radial jets annihilate every min-form") {
  for (const auto& m : {make_eikonal(), make_congestion(2.0)}) {
    for (double r : {0.3, 0.5, 0.7, 0.9}) {
      for (double theta : {0.0, 1.1, 2.5}) {
        const PointJet jet = radial_jet(m, 2, r, theta);
        CHECK(std::abs(residual_ab(m, jet)) <= 1e-6);
        if (m.second_deriv_class == SecondDerivClass::C2ThroughSigma) {
          CHECK(std::abs(residual_C2(m, jet)) <= 1e-6);
        }
        CHECK(std::abs(residual_astar(m, jet, 1.0)) <= 1e-5);
      }
    }
  }
}

TEST_CASE("radial residual of the divergence-form equation") {
  const PotentialModel eik = make_eikonal();
  for (double r : {0.2, 0.5, 0.8, 1.0}) {
    CHECK(std::abs(residual_radial(eik, 2, 1.0, r)) <= 1e-8);
  }
  CHECK_THROWS_AS(residual_radial(eik, 2, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(residual_radial(eik, 2, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("least-squares jets recover global quadratics") {
  const Mesh mesh = triangulate(DomainSpec::disk(1.0), 0.15);
  ScalarField field(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double x = mesh.vertices[v].x, y = mesh.vertices[v].y;
    field.values[v] =
        0.3 + 0.7 * x - 1.1 * y + 0.25 * x * x + 0.4 * x * y - 0.15 * y * y;
  }
  int skipped = -1;
  const auto jets = jets_from_field(mesh, field, &skipped);
  CHECK(skipped == 0);
  REQUIRE(!jets.empty());
  for (const auto& [v, jet] : jets) {
    const double x = mesh.vertices[v].x, y = mesh.vertices[v].y;
    CHECK(jet.grad[0] == doctest::Approx(0.7 + 0.5 * x + 0.4 * y).epsilon(1e-9));
    CHECK(jet.grad[1] == doctest::Approx(-1.1 + 0.4 * x - 0.3 * y).epsilon(1e-9));
    CHECK(jet.hess[0][0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(jet.hess[1][1] == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(jet.hess[0][1] == doctest::Approx(0.4).epsilon(1e-9));
  }
}

TEST_CASE("sampling stays two hops away from the boundary") {
  const Mesh mesh = triangulate(DomainSpec::disk(1.0), 0.2);
  ScalarField field(mesh);
  const auto jets = jets_from_field(mesh, field);
  // Build adjacency to check the hop condition directly.
  std::vector<std::vector<int>> adj(mesh.num_vertices());
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      adj[t[e]].push_back(t[(e + 1) % 3]);
      adj[t[(e + 1) % 3]].push_back(t[e]);
    }
  }
  for (const auto& [v, jet] : jets) {
    CHECK(!mesh.boundary[v]);
    for (int w : adj[v]) CHECK(!mesh.boundary[w]);
  }
}

TEST_CASE("constant-zero field reports all points sub-threshold") {
  const Mesh mesh = triangulate(DomainSpec::disk(1.0), 0.2);
  const RegularizedPotential r = build_regularized(make_eikonal(), 0.1);
  const ScalarField field(mesh);
  const ResidualReport rep = residual_field(r, mesh, field, 0.05);
  REQUIRE(!rep.samples.empty());
  for (const auto& s : rep.samples) {
    CHECK(s.branch == BranchTag::SubThreshold);
    CHECK(s.residual == -1.0);
  }
  CHECK(rep.sub_sigma_fraction == 1.0);
  CHECK(rep.median_pde_active == 0.0);
}

TEST_CASE("residual_field dispatches forms and rejects Fn for base models") {
  const Mesh mesh = triangulate(DomainSpec::disk(1.0), 0.2);
  ScalarField field(mesh);
  RadialOracle oracle(make_eikonal(), 2, 1.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
    field.values[v] = oracle.value(std::min(r, 1.0));
  }
  const PotentialModel eik = make_eikonal();
  const ResidualReport ab =
      residual_field(eik, mesh, field, ResidualForm::ab, 0.05);
  CHECK(ab.median_pde_active <= 0.5);
  // |grad| = g'(r/2) -> sigma near the center, so coarse jets put a few
  // central points below sigma - delta.
  CHECK(ab.sub_sigma_fraction <= 0.2);
  CHECK_THROWS_AS(residual_field(eik, mesh, field, ResidualForm::Fn, 0.05),
                  std::invalid_argument);
}

TEST_CASE("P-function: zero everywhere for the zero field, maximal on the "
          "boundary for the radial profile") {
  const Mesh mesh = triangulate(DomainSpec::disk(1.0), 0.1);
  const PotentialModel eik = make_eikonal();

  const ScalarField zero(mesh);
  const PFunctionResult pz = pfunction_field(eik, mesh, zero, 2);
  for (double v : pz.values) CHECK(v == 0.0);

  ScalarField field(mesh);
  RadialOracle oracle(eik, 2, 1.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
    field.values[v] = oracle.value(std::min(r, 1.0));
  }
  // P is constant in r for the radial profile (f''(g') g'' = 1), so the
  // interior max can only beat the boundary max by discretization noise.
  const PFunctionResult pr = pfunction_field(eik, mesh, field, 2);
  CHECK(pr.max_boundary >= pr.max_interior - 0.05);
  // Boundary value Phi(g'(1/2)) with zero Dirichlet data.
  CHECK(pr.max_boundary ==
        doctest::Approx(phi(eik, std::sqrt(1.25))).epsilon(0.15));
}
