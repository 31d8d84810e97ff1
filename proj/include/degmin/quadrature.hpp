#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace degmin {

// Thrown when the adaptive scheme cannot reach the requested tolerance.
struct QuadratureError : std::runtime_error {
  double achieved_error;
  QuadratureError(const std::string& msg, double err)
      : std::runtime_error(msg + " (error estimate " + std::to_string(err) + ")"),
        achieved_error(err) {}
};

struct QuadratureResult {
  double value;
  double error_estimate;
};

// Adaptive Gauss-Kronrod (G7-K15) on [a, b].
// Subdivides until the K15-G7 discrepancy meets rel_tol (with an absolute
// floor of abs_floor) on every panel, or max_depth is exceeded.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol = 1e-10,
                           double abs_floor = 1e-14, int max_depth = 40);

}  // namespace degmin
