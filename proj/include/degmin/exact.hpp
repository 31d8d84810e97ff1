#pragma once

#include "degmin/potential.hpp"

namespace degmin {

// Closed-form radial machinery on the ball of radius R in R^N. The exact
// minimizer profile is u_R(r) = integral_r^R g'(s/N) ds; its gradient
// magnitude at radius r is g'(r/N).
struct RadialOracle {
  const PotentialModel* model;
  FenchelConjugate conj;
  int dim;
  double radius;

  RadialOracle(const PotentialModel& m, int N, double R);

  double value(double r) const;            // u_R(r)
  double gradient_magnitude(double r) const;  // |u_R'(r)| = g'(r/N)
};

// Barrier-based a-priori gradient bound: M = g'( rho/(N-1) *
// (exp((N-1)R*/rho) - 1) ).
double gradient_bound_M(const PotentialModel& m, int N, double rho,
                        double R_star);

// Sup bound: min( integral_0^{R*} g'(s/N) ds, (N/2) Phi(M) ).
double sup_bound_u(const PotentialModel& m, int N, double R_star, double M);

struct CurvatureBounds {
  double grad_bound;  // g'(1/(N H*))
  double sup_bound;   // (N/2) Phi(grad_bound)
};

// Bounds available when the boundary mean curvature has a positive minimum
// H*; optimal on balls.
CurvatureBounds curvature_bounds(const PotentialModel& m, int N,
                                 double H_star);

// The comparison barrier psi(t) = integral_0^t g'( rho/(N-1) *
// (exp((N-1)(R*-s)/rho) - 1) ) ds.
double barrier_psi(const PotentialModel& m, int N, double rho, double R_star,
                   double t);

}  // namespace degmin
