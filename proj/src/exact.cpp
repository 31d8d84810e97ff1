#include "degmin/exact.hpp"

#include <cmath>
#include <stdexcept>

#include "degmin/quadrature.hpp"

namespace degmin {

RadialOracle::RadialOracle(const PotentialModel& m, int N, double R)
    : model(&m), conj(m), dim(N), radius(R) {
  if (N < 2) throw std::invalid_argument("RadialOracle: N must be >= 2");
  if (!(R > 0.0)) throw std::invalid_argument("RadialOracle: R must be > 0");
}

double RadialOracle::value(double r) const {
  if (r < 0.0 || r > radius) {
    throw std::invalid_argument("RadialOracle::value: r outside [0, R]");
  }
  if (r == radius) return 0.0;
  const int N = dim;
  const FenchelConjugate& c = conj;
  return integrate([&c, N](double s) { return conjugate_gp(c, s / N); }, r,
                   radius)
      .value;
}

double RadialOracle::gradient_magnitude(double r) const {
  return conjugate_gp(conj, r / dim);
}

double gradient_bound_M(const PotentialModel& m, int N, double rho,
                        double R_star) {
  if (!(rho > 0.0) || !(R_star > 0.0)) {
    throw std::invalid_argument("gradient_bound_M: rho and R* must be > 0");
  }
  FenchelConjugate c(m);
  const double t = rho / (N - 1.0) * (std::exp((N - 1.0) * R_star / rho) - 1.0);
  return conjugate_gp(c, t);
}

double sup_bound_u(const PotentialModel& m, int N, double R_star, double M) {
  if (R_star == 0.0) return 0.0;
  FenchelConjugate c(m);
  const double branch1 =
      integrate([&c, N](double s) { return conjugate_gp(c, s / N); }, 0.0,
                R_star)
          .value;
  const double branch2 = 0.5 * N * phi(m, M);
  return std::min(branch1, branch2);
}

CurvatureBounds curvature_bounds(const PotentialModel& m, int N,
                                 double H_star) {
  if (!(H_star > 0.0)) {
    throw std::invalid_argument("curvature_bounds: H* must be > 0");
  }
  FenchelConjugate c(m);
  CurvatureBounds out;
  out.grad_bound = conjugate_gp(c, 1.0 / (N * H_star));
  out.sup_bound = 0.5 * N * phi(m, out.grad_bound);
  return out;
}

double barrier_psi(const PotentialModel& m, int N, double rho, double R_star,
                   double t) {
  if (t < 0.0 || t > R_star) {
    throw std::invalid_argument("barrier_psi: t outside [0, R*]");
  }
  if (t == 0.0) return 0.0;
  FenchelConjugate c(m);
  auto integrand = [&c, N, rho, R_star](double s) {
    const double arg =
        rho / (N - 1.0) * (std::exp((N - 1.0) * (R_star - s) / rho) - 1.0);
    return conjugate_gp(c, arg);
  };
  return integrate(integrand, 0.0, t).value;
}

}  // namespace degmin
