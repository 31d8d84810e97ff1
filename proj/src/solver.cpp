#include "degmin/solver.hpp"

#include <chrono>
#include <cmath>
#include <deque>

namespace degmin {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Two-loop recursion over stored (s, y) pairs.
std::vector<double> lbfgs_direction(
    const std::deque<std::pair<std::vector<double>, std::vector<double>>>& mem,
    const std::vector<double>& grad) {
  std::vector<double> q = grad;
  std::vector<double> alpha(mem.size());
  for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
    const auto& [s, y] = mem[i];
    const double rho = 1.0 / dot(y, s);
    alpha[i] = rho * dot(s, q);
    for (size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * y[k];
  }
  if (!mem.empty()) {
    const auto& [s, y] = mem.back();
    const double gamma = dot(s, y) / dot(y, y);
    for (double& v : q) v *= gamma;
  }
  for (size_t i = 0; i < mem.size(); ++i) {
    const auto& [s, y] = mem[i];
    const double rho = 1.0 / dot(y, s);
    const double beta = rho * dot(y, q);
    for (size_t k = 0; k < q.size(); ++k) q[k] += (alpha[i] - beta) * s[k];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

std::pair<ScalarField, int> minimize(const EnergyAssembler& assembler,
                                     const ScalarField& init,
                                     const MinimizeOptions& opts) {
  const Mesh& mesh = assembler.mesh();
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.boundary[i] && init.values[i] != 0.0) {
      throw OptimizationError("initial field violates the boundary condition");
    }
  }
  ScalarField u = init;
  std::vector<double> grad;
  double energy = assembler.energy_and_gradient(u.values, grad);
  const double exit_norm =
      opts.tol * std::sqrt(static_cast<double>(mesh.num_interior()));

  std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const double gnorm = std::sqrt(dot(grad, grad));
    if (gnorm <= exit_norm) break;

    std::vector<double> dir = lbfgs_direction(mem, grad);
    double slope = dot(dir, grad);
    if (!(slope < 0.0)) {  // stale curvature pairs: restart with steepest descent
      mem.clear();
      dir = grad;
      for (double& v : dir) v = -v;
      slope = -gnorm * gnorm;
    }

    double step = mem.empty() ? 1.0 / std::max(gnorm, 1.0) : 1.0;
    std::vector<double> trial(u.values.size());
    double new_energy = 0.0;
    int bt = 0;
    for (; bt <= opts.max_backtracks; ++bt) {
      for (size_t k = 0; k < trial.size(); ++k) {
        trial[k] = u.values[k] + step * dir[k];
      }
      new_energy = assembler.energy(trial);
      if (new_energy <= energy + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (bt > opts.max_backtracks) {
      throw OptimizationError(
          "line search failed after " + std::to_string(opts.max_backtracks) +
          " backtracks (iter " + std::to_string(iter) + ", |g| = " +
          std::to_string(gnorm) + ", energy = " + std::to_string(energy) + ")");
    }

    std::vector<double> new_grad;
    new_energy = assembler.energy_and_gradient(trial, new_grad);

    std::vector<double> s(trial.size()), y(trial.size());
    for (size_t k = 0; k < trial.size(); ++k) {
      s[k] = trial[k] - u.values[k];
      y[k] = new_grad[k] - grad[k];
    }
    if (dot(s, y) > 1e-16) {
      mem.push_back({std::move(s), std::move(y)});
      if (static_cast<int>(mem.size()) > opts.lbfgs_memory) mem.pop_front();
    }
    u.values.swap(trial);
    grad.swap(new_grad);
    energy = new_energy;
  }
  return {u, iter};
}

std::vector<double> default_eps_schedule() {
  std::vector<double> s;
  for (int k = 0; k <= 8; ++k) s.push_back(0.1 * std::pow(2.0, -k));
  return s;
}

std::pair<ScalarField, SolveReport> continuation(
    const PotentialModel& base, const Mesh& mesh,
    const std::vector<double>& eps_schedule, const MinimizeOptions& opts,
    double sigma_tilde_override) {
  for (size_t i = 1; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] < eps_schedule[i - 1])) {
      throw std::invalid_argument("eps schedule must be strictly decreasing");
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  ScalarField u(mesh);
  ScalarField prev = u;
  for (double eps : eps_schedule) {
    const RegularizedPotential pot =
        sigma_tilde_override > 0.0
            ? build_regularized(base, eps, sigma_tilde_override)
            : build_regularized(base, eps);
    EnergyAssembler assembler(pot, mesh);
    auto [next, iters] = minimize(assembler, u, opts);

    EpsHistory h;
    h.eps = eps;
    h.iterations = iters;
    std::vector<double> grad;
    h.final_energy = assembler.energy_and_gradient(next.values, grad);
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    h.gradient_norm = std::sqrt(g2);
    double delta = 0.0;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      delta = std::max(delta, std::abs(next.values[i] - u.values[i]));
    }
    h.sup_delta = delta;
    report.history.push_back(h);

    prev = u;
    u = next;

    // Final-eps field statistics come from the last assembler in scope.
    if (eps == eps_schedule.back()) {
      report.max_gradient_magnitude = 0.0;
      for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const Vec2 g = assembler.triangle_gradient(u.values, t);
        report.max_gradient_magnitude =
            std::max(report.max_gradient_magnitude, std::hypot(g.x, g.y));
      }
    }
  }
  report.sup_u = 0.0;
  report.min_u = 0.0;
  for (double v : u.values) {
    report.sup_u = std::max(report.sup_u, v);
    report.min_u = std::min(report.min_u, v);
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {u, report};
}

}  // namespace degmin
