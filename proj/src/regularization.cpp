#include "degmin/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace degmin {
namespace {

// r^e for r in [0, 1], exponent possibly huge; evaluated in log space so the
// result underflows gracefully to 0.
double rpow(double r, double e) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  return std::exp(e * std::log(r));
}

}  // namespace

double RegularizedPotential::fp(double s) const {
  if (s > s_star) return base.fp(s);
  const double r = s / s_star;
  return fp_star * (2.0 * rpow(r, p_eps) - rpow(r, q_eps));
}

double RegularizedPotential::fpp(double s) const {
  if (s > s_star) return base.fpp(s);
  const double r = s / s_star;
  return fp_star / s_star *
         (2.0 * p_eps * rpow(r, p_eps - 1.0) - q_eps * rpow(r, q_eps - 1.0));
}

double RegularizedPotential::f(double s) const {
  if (s > s_star) return base.f(s) + value_shift;
  const double r = s / s_star;
  return fp_star * s_star *
         (2.0 * rpow(r, p_eps + 1.0) / (p_eps + 1.0) -
          rpow(r, q_eps + 1.0) / (q_eps + 1.0));
}

PotentialModel RegularizedPotential::as_model() const {
  PotentialModel m;
  m.sigma = base.sigma;
  m.name = base.name + "+eps=" + std::to_string(eps);
  m.second_deriv_class = SecondDerivClass::C2ThroughSigma;
  RegularizedPotential self = *this;
  m.f = [self](double s) { return self.f(s); };
  m.fp = [self](double s) { return self.fp(s); };
  m.fpp = [self](double s) { return self.fpp(s); };
  if (base.has_fppp()) {
    RegularizedPotential r2 = *this;
    m.fppp = [r2](double s) {
      if (s > r2.s_star) return r2.base.fppp(s);
      const double r = s / r2.s_star;
      return r2.fp_star / (r2.s_star * r2.s_star) *
             (2.0 * r2.p_eps * (r2.p_eps - 1.0) * rpow(r, r2.p_eps - 2.0) -
              r2.q_eps * (r2.q_eps - 1.0) * rpow(r, r2.q_eps - 2.0));
    };
  }
  return m;
}

RegularizedPotential build_regularized(const PotentialModel& base, double eps,
                                       double sigma_tilde) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(sigma_tilde > base.sigma)) {
    throw std::invalid_argument("sigma_tilde must exceed sigma");
  }
  if (!(eps < sigma_tilde - base.sigma)) {
    throw std::invalid_argument("eps must be below sigma_tilde - sigma");
  }
  if (!base.has_fppp()) {
    throw std::invalid_argument(
        "base model must supply f''' to build the regularized family");
  }

  // The construction needs a = f'/(s f'') nondecreasing on [sigma, sigma~].
  {
    const int n = 1000;
    const double lo = base.sigma + 1e-6;
    double prev = coeff_a(base, lo);
    for (int i = 1; i < n; ++i) {
      const double s = lo + (sigma_tilde - lo) * i / (n - 1.0);
      const double cur = coeff_a(base, s);
      if (cur - prev < -1e-9) {
        throw HypothesisViolation("a(s) decreases near s = " +
                                  std::to_string(s));
      }
      prev = cur;
    }
  }

  RegularizedPotential r;
  r.base = base;
  r.eps = eps;
  r.sigma_tilde = sigma_tilde;
  r.s_star = base.sigma + eps;
  r.fp_star = base.fp(r.s_star);

  const double fpp_star = base.fpp(r.s_star);
  const double fppp_star = base.fppp(r.s_star);
  const double radicand =
      2.0 * (1.0 - fppp_star * r.fp_star / (fpp_star * fpp_star) -
             r.fp_star / (r.s_star * fpp_star));
  if (radicand < 0.0) {
    throw HypothesisViolation("negative radicand for omega_eps: " +
                              std::to_string(radicand));
  }
  r.omega_eps = std::sqrt(radicand);
  const double base_ratio = r.s_star * fpp_star / r.fp_star;
  r.p_eps = base_ratio * (1.0 + 0.5 * r.omega_eps);
  r.q_eps = base_ratio * (1.0 + r.omega_eps);
  r.value_shift = r.fp_star * r.s_star *
                      (2.0 / (r.p_eps + 1.0) - 1.0 / (r.q_eps + 1.0)) -
                  base.f(r.s_star);
  return r;
}

RegularizedPotential build_regularized(const PotentialModel& base,
                                       double eps) {
  return build_regularized(base, eps, base.sigma + 1.0);
}

double coeff_a_eps(const RegularizedPotential& r, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("coeff_a_eps: s must be >= 0");
  if (s == 0.0) return 0.0;
  if (s > r.s_star) return coeff_a(r.base, s);
  return r.fp(s) / (s * r.fpp(s));
}

double coeff_b_eps(const RegularizedPotential& r, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("coeff_b_eps: s must be >= 0");
  if (s == 0.0) return 0.0;
  return s * s / r.fpp(s);
}

FamilyReport validate_family(const PotentialModel& base,
                             const std::vector<double>& eps_list,
                             double sigma_tilde) {
  for (size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("eps_list must be strictly decreasing");
    }
  }
  FamilyReport report;
  std::vector<RegularizedPotential> members;
  for (double eps : eps_list) {
    members.push_back(build_regularized(base, eps, sigma_tilde));
  }

  const int n_grid = 2000;
  const double compact_hi = base.sigma - 0.1;
  for (size_t k = 0; k < members.size(); ++k) {
    const RegularizedPotential& r = members[k];
    FamilyEntry e{};
    e.eps = r.eps;
    e.p_eps = r.p_eps;
    e.q_eps = r.q_eps;
    e.omega_eps = r.omega_eps;
    e.a_gap_bound = r.fp_star / (r.s_star * base.fpp(r.s_star));
    e.min_fpp = std::numeric_limits<double>::infinity();
    e.sup_a_gap = e.sup_limit1 = e.sup_limit2 = 0.0;

    for (int i = 1; i <= n_grid; ++i) {
      const double s = r.s_star * i / n_grid;
      e.min_fpp = std::min(e.min_fpp, r.fpp(s));
      e.sup_a_gap = std::max(
          e.sup_a_gap, std::abs(coeff_a_eps(r, s) - coeff_a(base, s)));
      if (r.fp(s) < base.fp(s) - 1e-12) {
        report.ok = false;
        if (report.violation.empty()) {
          report.violation = "f_eps' < f' at (eps, s) = (" +
                             std::to_string(r.eps) + ", " +
                             std::to_string(s) + ")";
        }
      }
      if (k > 0 && members[k - 1].fp(s) < r.fp(s) - 1e-12) {
        report.ok = false;
        if (report.violation.empty()) {
          report.violation = "f_eps' not decreasing in eps at (eps, s) = (" +
                             std::to_string(r.eps) + ", " +
                             std::to_string(s) + ")";
        }
      }
      if (s <= compact_hi) {
        e.sup_limit1 = std::max(
            e.sup_limit1, std::abs((s * r.fpp(s) - r.fp(s)) / (s * s * s)));
        e.sup_limit2 = std::max(e.sup_limit2, std::abs(r.fp(s) / s));
      }
    }
    if (!(e.min_fpp > 0.0)) {
      report.ok = false;
      if (report.violation.empty()) {
        report.violation =
            "f_eps'' not positive for eps = " + std::to_string(r.eps);
      }
    }
    report.entries.push_back(e);
  }

  for (size_t k = 1; k < report.entries.size(); ++k) {
    if (!(report.entries[k].sup_limit1 < report.entries[k - 1].sup_limit1) ||
        !(report.entries[k].sup_limit2 < report.entries[k - 1].sup_limit2)) {
      report.ok = false;
      if (report.violation.empty()) {
        report.violation = "compact-set limit quantities not decreasing at "
                           "eps = " +
                           std::to_string(report.entries[k].eps);
      }
    }
  }
  return report;
}

}  // namespace degmin
