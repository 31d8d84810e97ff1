#include "degmin/quadrature.hpp"

#include <array>
#include <cmath>

namespace degmin {
namespace {

// Kronrod 15 abscissae on [-1, 1] (nonnegative half) and weights; the
// odd-indexed nodes are the embedded Gauss 7 rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kWg = {0.129484966168870, 0.279705391489277,
                                       0.381830050505119, 0.417959183673469};

struct Panel {
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
  }
  const double fc = f(c);
  resk += kWgk[7] * fc;
  resg += kWg[3] * fc;
  resk *= half;
  resg *= half;
  return {resk, std::abs(resk - resg)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth, int max_depth, double* err_acc) {
  Panel p = gk15(f, a, b);
  if (p.error <= tol || depth >= max_depth) {
    if (depth >= max_depth && p.error > tol) *err_acc += p.error;
    return p.value;
  }
  const double c = 0.5 * (a + b);
  return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth, err_acc) +
         adapt(f, c, b, 0.5 * tol, depth + 1, max_depth, err_acc);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, double abs_floor,
                           int max_depth) {
  if (a == b) return {0.0, 0.0};
  Panel coarse = gk15(f, a, b);
  const double scale = std::max(std::abs(coarse.value), 1.0);
  const double tol = std::max(rel_tol * scale, abs_floor);
  double unresolved = 0.0;
  const double value = adapt(f, a, b, tol, 0, max_depth, &unresolved);
  if (unresolved > 10.0 * tol * std::max(std::abs(value), 1.0)) {
    throw QuadratureError("adaptive quadrature did not converge", unresolved);
  }
  return {value, unresolved};
}

}  // namespace degmin
