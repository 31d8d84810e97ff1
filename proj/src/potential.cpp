#include "degmin/potential.hpp"

#include <cmath>

#include "degmin/quadrature.hpp"

namespace degmin {

PotentialModel make_eikonal() {
  PotentialModel m;
  m.sigma = 1.0;
  m.name = "eikonal";
  m.second_deriv_class = SecondDerivClass::BlowsUpAtSigma;
  m.f = [](double s) {
    if (s <= 1.0) return 0.0;
    const double w = std::sqrt(s * s - 1.0);
    return 0.5 * (s * w - std::log(s + w));
  };
  m.fp = [](double s) {
    if (s <= 1.0) return 0.0;
    return std::sqrt(s * s - 1.0);
  };
  m.fpp = [](double s) { return s / std::sqrt(s * s - 1.0); };
  m.fppp = [](double s) { return -1.0 / std::pow(s * s - 1.0, 1.5); };
  return m;
}

PotentialModel make_congestion(double q) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("congestion exponent must satisfy q > 1, got " +
                                std::to_string(q));
  }
  PotentialModel m;
  m.sigma = 1.0;
  m.name = "congestion:q=" + std::to_string(q);
  m.second_deriv_class = q < 2.0 ? SecondDerivClass::BlowsUpAtSigma
                                 : SecondDerivClass::C2ThroughSigma;
  m.f = [q](double s) { return s <= 1.0 ? 0.0 : std::pow(s - 1.0, q) / q; };
  m.fp = [q](double s) { return s <= 1.0 ? 0.0 : std::pow(s - 1.0, q - 1.0); };
  m.fpp = [q](double s) { return (q - 1.0) * std::pow(s - 1.0, q - 2.0); };
  m.fppp = [q](double s) {
    return (q - 1.0) * (q - 2.0) * std::pow(s - 1.0, q - 3.0);
  };
  return m;
}

PotentialModel make_potential_by_name(const std::string& name) {
  if (name == "eikonal") return make_eikonal();
  const std::string prefix = "congestion:q=";
  if (name.rfind(prefix, 0) == 0) {
    return make_congestion(std::stod(name.substr(prefix.size())));
  }
  throw std::invalid_argument("unknown potential '" + name +
                              "' (expected 'eikonal' or 'congestion:q=<v>')");
}

FenchelConjugate::FenchelConjugate(const PotentialModel& m, double inv_tol)
    : base(&m), inversion_tolerance(inv_tol) {
  if (m.name == "eikonal") {
    closed_form_gp = [](double t) { return std::sqrt(1.0 + t * t); };
  } else if (m.name.rfind("congestion:q=", 0) == 0) {
    const double q = std::stod(m.name.substr(13));
    closed_form_gp = [q](double t) {
      return 1.0 + std::pow(t, 1.0 / (q - 1.0));
    };
  }
}

double conjugate_gp(const FenchelConjugate& c, double t) {
  if (t < 0.0) throw std::invalid_argument("conjugate_gp: t must be >= 0");
  const double sigma = c.base->sigma;
  if (t == 0.0) return sigma;  // right endpoint of the argmax set [0, sigma]
  if (c.closed_form_gp) return c.closed_form_gp(t);
  // Bracket by doubling, then bisect f'(s) = t.
  double lo = sigma;
  double hi = sigma + 1.0;
  int doublings = 0;
  while (c.base->fp(hi) < t) {
    lo = hi;
    hi = sigma + 2.0 * (hi - sigma);
    if (++doublings > 200) throw InversionRangeError(t, hi);
  }
  while (hi - lo > c.inversion_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (c.base->fp(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double conjugate_g(const FenchelConjugate& c, double t) {
  if (t < 0.0) throw std::invalid_argument("conjugate_g: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double s = conjugate_gp(c, t);
  return s * t - c.base->f(s);
}

double coeff_a(const PotentialModel& m, double s) {
  if (s < 0.0) throw std::invalid_argument("coeff_a: s must be >= 0");
  if (s <= m.sigma) return 0.0;
  return m.fp(s) / (s * m.fpp(s));
}

double coeff_b(const PotentialModel& m, double s) {
  if (s < 0.0) throw std::invalid_argument("coeff_b: s must be >= 0");
  if (s <= m.sigma) return 0.0;
  return s * s / m.fpp(s);
}

double phi(const PotentialModel& m, double t) {
  if (t < 0.0) throw std::invalid_argument("phi: t must be >= 0");
  if (t <= m.sigma) return 0.0;
  if (m.second_deriv_class == SecondDerivClass::BlowsUpAtSigma) {
    // s = sigma + w^2 flattens the integrable blowup of f'' at sigma.
    const double sigma = m.sigma;
    auto integrand = [&m, sigma](double w) {
      double s = sigma + w * w;
      // w^2 can underflow in the addition; keep s strictly past the plateau.
      if (s <= sigma) s = std::nextafter(sigma, sigma + 1.0);
      return 4.0 * w * s * m.fpp(s);
    };
    return integrate(integrand, 0.0, std::sqrt(t - m.sigma)).value;
  }
  auto integrand = [&m](double s) { return 2.0 * s * m.fpp(s); };
  return integrate(integrand, m.sigma, t).value;
}

}  // namespace degmin
