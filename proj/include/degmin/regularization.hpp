#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "degmin/potential.hpp"

namespace degmin {

struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One member of the explicit approximating family: f' is replaced on
// [0, sigma + eps] by a two-term power splice that meets the base f' with
// matching first and second derivatives at s_star = sigma + eps.
struct RegularizedPotential {
  PotentialModel base;
  double eps = 0.0;
  double sigma_tilde = 0.0;
  double s_star = 0.0;       // sigma + eps
  double p_eps = 0.0;
  double q_eps = 0.0;
  double omega_eps = 0.0;
  double fp_star = 0.0;      // f'(s_star)
  double value_shift = 0.0;  // pins f_eps(0) = 0 across the splice

  double f(double s) const;
  double fp(double s) const;
  double fpp(double s) const;

  // View usable wherever a PotentialModel is expected (energy assembly,
  // P-function, residual_Fn path). sigma is kept from the base so branch
  // classification stays meaningful.
  PotentialModel as_model() const;
};

RegularizedPotential build_regularized(const PotentialModel& base, double eps,
                                       double sigma_tilde);

// Defaults sigma_tilde to sigma + 1 (both built-ins have a nondecreasing on
// the whole smooth branch).
RegularizedPotential build_regularized(const PotentialModel& base, double eps);

double coeff_a_eps(const RegularizedPotential& r, double s);
double coeff_b_eps(const RegularizedPotential& r, double s);

struct FamilyEntry {
  double eps;
  double p_eps, q_eps, omega_eps;
  double sup_a_gap;         // sup_s |a_eps - a| on the check grid
  double a_gap_bound;       // f'(s*) / (s* f''(s*))
  double sup_limit1;        // sup |(s f_eps'' - f_eps')/s^3| on [0, sigma-0.1]
  double sup_limit2;        // sup |f_eps'(s)/s| on [0, sigma-0.1]
  double min_fpp;           // min of f_eps'' on (0, s_star]
};

struct FamilyReport {
  std::vector<FamilyEntry> entries;
  bool ok = true;
  std::string violation;  // first offending (eps, s) if any
};

FamilyReport validate_family(const PotentialModel& base,
                             const std::vector<double>& eps_list,
                             double sigma_tilde);

}  // namespace degmin
