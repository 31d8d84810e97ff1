#include "degmin/viscosity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace degmin {

double PointJet::grad_norm() const { return std::hypot(grad[0], grad[1]); }

double PointJet::infinity_laplacian() const {
  return hess[0][0] * grad[0] * grad[0] +
         2.0 * hess[0][1] * grad[0] * grad[1] +
         hess[1][1] * grad[1] * grad[1];
}

double residual_Fn(const RegularizedPotential& r, const PointJet& jet) {
  const double p = jet.grad_norm();
  if (p < kFnZeroGradient) return -1.0;
  const double fp = r.fp(p);
  const double fpp = r.fpp(p);
  return -(p * fpp - fp) / (p * p * p) * jet.infinity_laplacian() -
         fp / p * jet.laplacian() - 1.0;
}

namespace {

// Honest piecewise second derivative: zero on the plateau.
double fpp_piecewise(const PotentialModel& m, double s) {
  return s > m.sigma ? m.fpp(s) : 0.0;
}

}  // namespace

double residual_C2(const PotentialModel& m, const PointJet& jet) {
  if (m.second_deriv_class != SecondDerivClass::C2ThroughSigma) {
    throw std::invalid_argument(
        "residual_C2 requires a model with f in C^2((0, inf))");
  }
  const double p = jet.grad_norm();
  if (!(p > 0.0)) {
    throw std::invalid_argument("residual_C2 requires |grad u| > 0");
  }
  const double fp = m.fp(p);
  const double fpp = fpp_piecewise(m, p);
  const double pde = -(p * fpp - fp) / (p * p * p) * jet.infinity_laplacian() -
                     fp / p * jet.laplacian() - 1.0;
  return std::min(pde, p - m.sigma);
}

double residual_ab(const PotentialModel& m, const PointJet& jet) {
  const double p = jet.grad_norm();
  const double a = coeff_a(m, p);
  const double b = coeff_b(m, p);
  const double pde = -(1.0 - a) * jet.infinity_laplacian() -
                     p * p * a * jet.laplacian() - b;
  return std::min(pde, p - m.sigma);
}

double residual_astar(const PotentialModel& m, const PointJet& jet,
                      double a_star) {
  const double p = jet.grad_norm();
  const double a = coeff_a(m, p);
  if (!(a < a_star)) {
    throw std::invalid_argument("residual_astar requires a(|grad u|) < a*");
  }
  const double b = coeff_b(m, p);
  const double denom = a_star - a;
  const double pde =
      -(1.0 + (1.0 - a_star) / denom) * jet.infinity_laplacian() -
      p * p * a / denom * jet.laplacian() - b / denom;
  return std::min(pde, p - m.sigma);
}

double residual_radial(const PotentialModel& m, int N, double R, double r) {
  if (!(r > 0.0) || r > R) {
    throw std::invalid_argument("residual_radial: need 0 < r <= R");
  }
  FenchelConjugate c(m);
  const double t = r / N;
  const double gp = conjugate_gp(c, t);
  if (!(gp > m.sigma)) {
    throw std::invalid_argument(
        "residual_radial: profile gradient is on the plateau at this radius");
  }
  // g'' by central difference keeps the check independent of the f''-based
  // inverse-function route.
  const double step = 1e-5 * std::max(t, 1.0);
  const double gpp =
      (conjugate_gp(c, t + step) - conjugate_gp(c, t - step)) / (2.0 * step);
  return m.fpp(gp) * gpp / N + (N - 1.0) / r * m.fp(gp) - 1.0;
}

std::vector<std::pair<int, PointJet>> jets_from_field(
    const Mesh& mesh, const ScalarField& field, int* skipped) {
  int skip_count = 0;
  const int nv = mesh.num_vertices();
  std::vector<std::vector<int>> adj(nv);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  // Graph hops to the boundary.
  std::vector<int> hops(nv, -1);
  std::queue<int> bfs;
  for (int i = 0; i < nv; ++i) {
    if (mesh.boundary[i]) {
      hops[i] = 0;
      bfs.push(i);
    }
  }
  while (!bfs.empty()) {
    const int v = bfs.front();
    bfs.pop();
    for (int w : adj[v]) {
      if (hops[w] < 0) {
        hops[w] = hops[v] + 1;
        bfs.push(w);
      }
    }
  }

  std::vector<std::pair<int, PointJet>> out;
  for (int v = 0; v < nv; ++v) {
    if (hops[v] < 2) continue;
    // 2-ring neighborhood.
    std::vector<int> nbrs{v};
    for (int w : adj[v]) nbrs.push_back(w);
    const size_t one_ring = nbrs.size();
    for (size_t i = 1; i < one_ring; ++i) {
      for (int w : adj[nbrs[i]]) nbrs.push_back(w);
    }
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    if (nbrs.size() < 6) {
      ++skip_count;
      continue;
    }

    const Vec2 x0 = mesh.vertices[v];
    double radius = 0.0;
    for (int w : nbrs) {
      radius = std::max(radius,
                        std::hypot(mesh.vertices[w].x - x0.x,
                                   mesh.vertices[w].y - x0.y));
    }
    if (radius <= 0.0) continue;

    Eigen::MatrixXd A(nbrs.size(), 6);
    Eigen::VectorXd rhs(nbrs.size());
    for (size_t i = 0; i < nbrs.size(); ++i) {
      const double xi = (mesh.vertices[nbrs[i]].x - x0.x) / radius;
      const double eta = (mesh.vertices[nbrs[i]].y - x0.y) / radius;
      A(i, 0) = 1.0;
      A(i, 1) = xi;
      A(i, 2) = eta;
      A(i, 3) = xi * xi;
      A(i, 4) = xi * eta;
      A(i, 5) = eta * eta;
      rhs(i) = field.values[nbrs[i]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-8);
    if (qr.rank() < 6) {
      ++skip_count;
      continue;
    }
    const Eigen::VectorXd c = qr.solve(rhs);

    PointJet jet;
    jet.grad = {c(1) / radius, c(2) / radius};
    const double r2 = radius * radius;
    jet.hess[0][0] = 2.0 * c(3) / r2;
    jet.hess[1][1] = 2.0 * c(5) / r2;
    jet.hess[0][1] = jet.hess[1][0] = c(4) / r2;
    out.push_back({v, jet});
  }
  if (skipped) *skipped = skip_count;
  return out;
}

namespace {

ResidualReport build_report(
    const Mesh& mesh, const ScalarField& field, double sigma, double delta,
    const std::function<double(const PointJet&)>& evaluate) {
  ResidualReport report;
  const auto jets = jets_from_field(mesh, field, &report.skipped_points);

  std::vector<double> pde_abs, thr_abs;
  int sub = 0;
  for (const auto& [v, jet] : jets) {
    ResidualSample s;
    s.vertex = v;
    s.point = mesh.vertices[v];
    s.grad_norm = jet.grad_norm();
    if (s.grad_norm > sigma + delta) {
      s.branch = BranchTag::PdeActive;
    } else if (std::abs(s.grad_norm - sigma) <= delta) {
      s.branch = BranchTag::ThresholdActive;
    } else {
      s.branch = BranchTag::SubThreshold;
      ++sub;
    }
    s.residual = evaluate(jet);
    if (s.branch == BranchTag::PdeActive) pde_abs.push_back(std::abs(s.residual));
    if (s.branch == BranchTag::ThresholdActive) {
      thr_abs.push_back(std::abs(s.residual));
    }
    report.samples.push_back(s);
  }
  auto quantile = [](std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const size_t k = std::min(v.size() - 1,
                              static_cast<size_t>(q * (v.size() - 1) + 0.5));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
  };
  report.median_pde_active = quantile(pde_abs, 0.5);
  report.q90_pde_active = quantile(pde_abs, 0.9);
  report.median_threshold = quantile(thr_abs, 0.5);
  report.sub_sigma_fraction =
      report.samples.empty() ? 0.0
                             : static_cast<double>(sub) / report.samples.size();
  return report;
}

}  // namespace

ResidualReport residual_field(const PotentialModel& m, const Mesh& mesh,
                              const ScalarField& field, ResidualForm form,
                              double delta, double a_star) {
  switch (form) {
    case ResidualForm::C2:
      return build_report(mesh, field, m.sigma, delta,
                          [&m](const PointJet& j) { return residual_C2(m, j); });
    case ResidualForm::ab:
      return build_report(mesh, field, m.sigma, delta,
                          [&m](const PointJet& j) { return residual_ab(m, j); });
    case ResidualForm::astar:
      return build_report(mesh, field, m.sigma, delta,
                          [&m, a_star](const PointJet& j) {
                            return residual_astar(m, j, a_star);
                          });
    case ResidualForm::Fn:
      throw std::invalid_argument(
          "the Fn form needs a RegularizedPotential; use the overload");
  }
  throw std::invalid_argument("unknown residual form");
}

ResidualReport residual_field(const RegularizedPotential& r, const Mesh& mesh,
                              const ScalarField& field, double delta) {
  return build_report(mesh, field, r.base.sigma, delta,
                      [&r](const PointJet& j) { return residual_Fn(r, j); });
}

PFunctionResult pfunction_field(const PotentialModel& m, const Mesh& mesh,
                                const ScalarField& field, int N) {
  const int nv = mesh.num_vertices();
  std::vector<Vec2> vertex_grad(nv, {0.0, 0.0});
  std::vector<double> weight(nv, 0.0);
  for (const auto& t : mesh.triangles) {
    const Vec2& a = mesh.vertices[t[0]];
    const Vec2& b = mesh.vertices[t[1]];
    const Vec2& c = mesh.vertices[t[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double area = 0.5 * det;
    const Vec2 gb[3] = {{(b.y - c.y) / det, (c.x - b.x) / det},
                        {(c.y - a.y) / det, (a.x - c.x) / det},
                        {(a.y - b.y) / det, (b.x - a.x) / det}};
    Vec2 g{0.0, 0.0};
    for (int l = 0; l < 3; ++l) {
      g.x += field.values[t[l]] * gb[l].x;
      g.y += field.values[t[l]] * gb[l].y;
    }
    for (int l = 0; l < 3; ++l) {
      vertex_grad[t[l]].x += area * g.x;
      vertex_grad[t[l]].y += area * g.y;
      weight[t[l]] += area;
    }
  }

  PFunctionResult out;
  out.values.resize(nv);
  out.max_interior = -std::numeric_limits<double>::infinity();
  out.max_boundary = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < nv; ++v) {
    const double gx = vertex_grad[v].x / weight[v];
    const double gy = vertex_grad[v].y / weight[v];
    const double mag = std::hypot(gx, gy);
    out.values[v] = phi(m, mag) + 2.0 / N * field.values[v];
    if (mesh.boundary[v]) {
      out.max_boundary = std::max(out.max_boundary, out.values[v]);
    } else {
      out.max_interior = std::max(out.max_interior, out.values[v]);
    }
  }
  return out;
}

}  // namespace degmin
