#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace degmin {

using ScalarFn = std::function<double(double)>;

enum class SecondDerivClass { C2ThroughSigma, BlowsUpAtSigma };

// A convex potential that is identically zero on [0, sigma] and strictly
// convex beyond. fpp/fppp are only meaningful for s > sigma; fppp may be
// absent for user-supplied models (required only for building the
// regularized family).
struct PotentialModel {
  double sigma = 1.0;
  ScalarFn f, fp, fpp, fppp;
  SecondDerivClass second_deriv_class = SecondDerivClass::BlowsUpAtSigma;
  std::string name;

  bool has_fppp() const { return static_cast<bool>(fppp); }
};

// f'(s) = sqrt((s^2 - 1)^+), sigma = 1.
PotentialModel make_eikonal();

// f(s) = (s - 1)^q / q beyond the plateau, sigma = 1, q > 1.
PotentialModel make_congestion(double q);

// Parse "eikonal" or "congestion:q=<v>".
PotentialModel make_potential_by_name(const std::string& name);

// Legendre-Fenchel machinery: g(t) = sup_s (s t - f(s)), g' inverts f' on
// the strictly convex branch. g'(0) := sigma (right-continuous convention).
struct FenchelConjugate {
  const PotentialModel* base = nullptr;
  double inversion_tolerance = 1e-12;
  ScalarFn closed_form_gp;  // optional fast path for built-ins

  explicit FenchelConjugate(const PotentialModel& m,
                            double inv_tol = 1e-12);
};

double conjugate_gp(const FenchelConjugate& c, double t);
double conjugate_g(const FenchelConjugate& c, double t);

// Coefficients of the limit equation: a = f'/(s f''), b = s^2/f''; both
// vanish on the plateau [0, sigma].
double coeff_a(const PotentialModel& m, double s);
double coeff_b(const PotentialModel& m, double s);

// Phi(t) = 2 * integral_0^t s f''(s) ds, with the integrand taken as zero
// on the plateau. Integrable blowup at sigma is absorbed by the s = sigma +
// w^2 substitution.
double phi(const PotentialModel& m, double t);

struct InversionRangeError : std::runtime_error {
  double attempted_upper;
  InversionRangeError(double t, double upper)
      : std::runtime_error("f' stays below t = " + std::to_string(t) +
                           " up to s = " + std::to_string(upper)),
        attempted_upper(upper) {}
};

}  // namespace degmin
