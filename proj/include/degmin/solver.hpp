#pragma once

#include <string>
#include <vector>

#include "degmin/assembly.hpp"
#include "degmin/mesh.hpp"
#include "degmin/regularization.hpp"

namespace degmin {

struct OptimizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EpsHistory {
  double eps = 0.0;
  int iterations = 0;
  double final_energy = 0.0;
  double gradient_norm = 0.0;
  double sup_delta = 0.0;  // sup |u_k - u_{k-1}| vs previous eps solution
};

struct SolveReport {
  std::vector<EpsHistory> history;
  double max_gradient_magnitude = 0.0;  // max over triangles of |grad u_h|
  double sup_u = 0.0;
  double min_u = 0.0;
  double wall_time_seconds = 0.0;
  bool deterministic = true;
};

struct MinimizeOptions {
  double tol = 1e-8;      // gradient-norm exit: |g| <= tol * sqrt(n_interior)
  int max_iterations = 5000;
  int lbfgs_memory = 10;
  int max_backtracks = 60;
};

// Limited-memory quasi-Newton descent with Armijo backtracking on the
// strictly convex discrete energy.
std::pair<ScalarField, int> minimize(const EnergyAssembler& assembler,
                                     const ScalarField& init,
                                     const MinimizeOptions& opts);

// Warm-started sweep over a strictly decreasing eps schedule.
std::pair<ScalarField, SolveReport> continuation(
    const PotentialModel& base, const Mesh& mesh,
    const std::vector<double>& eps_schedule, const MinimizeOptions& opts,
    double sigma_tilde_override = -1.0);

// Default schedule eps_k = 0.1 * 2^-k, k = 0..8.
std::vector<double> default_eps_schedule();

}  // namespace degmin
