#include "degmin/assembly.hpp"

#include <cmath>

namespace degmin {

EnergyAssembler::EnergyAssembler(const RegularizedPotential& pot,
                                 const Mesh& mesh)
    : pot_(&pot), mesh_(&mesh) {
  const int nt = static_cast<int>(mesh.triangles.size());
  area_.resize(nt);
  shape_grad_.resize(nt);
  incidence_.resize(mesh.vertices.size());
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    area_[t] = 0.5 * det;
    // grad of the barycentric basis: rotated opposite edges / (2 area).
    shape_grad_[t][0] = {(b.y - c.y) / det, (c.x - b.x) / det};
    shape_grad_[t][1] = {(c.y - a.y) / det, (a.x - c.x) / det};
    shape_grad_[t][2] = {(a.y - b.y) / det, (b.x - a.x) / det};
    for (int l = 0; l < 3; ++l) incidence_[tri[l]].push_back({t, l});
  }
}

Vec2 EnergyAssembler::triangle_gradient(const std::vector<double>& v,
                                        int t) const {
  const auto& tri = mesh_->triangles[t];
  Vec2 g{0.0, 0.0};
  for (int l = 0; l < 3; ++l) {
    g.x += v[tri[l]] * shape_grad_[t][l].x;
    g.y += v[tri[l]] * shape_grad_[t][l].y;
  }
  return g;
}

double EnergyAssembler::triangle_energy_terms(const std::vector<double>& v,
                                              std::vector<double>& per_tri) const {
  const int nt = static_cast<int>(area_.size());
  per_tri.resize(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_->triangles[t];
    const Vec2 g = triangle_gradient(v, t);
    const double mag = std::hypot(g.x, g.y);
    const double mean = (v[tri[0]] + v[tri[1]] + v[tri[2]]) / 3.0;
    per_tri[t] = area_[t] * (pot_->f(mag) - mean);
  }
  // Fixed-order reduction keeps the energy bitwise reproducible.
  double sum = 0.0;
  for (int t = 0; t < nt; ++t) sum += per_tri[t];
  return sum;
}

double EnergyAssembler::energy(const std::vector<double>& v) const {
  std::vector<double> per_tri;
  return triangle_energy_terms(v, per_tri);
}

double EnergyAssembler::energy_and_gradient(const std::vector<double>& v,
                                            std::vector<double>& grad) const {
  const int nv = mesh_->num_vertices();
  const int nt = static_cast<int>(area_.size());
  grad.assign(nv, 0.0);

  // Per-triangle flux vectors f'(|g|) g / |g|, then a vertex-parallel gather.
  std::vector<Vec2> flux(nt);
  std::vector<double> per_tri(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_->triangles[t];
    const Vec2 g = triangle_gradient(v, t);
    const double mag = std::hypot(g.x, g.y);
    const double mean = (v[tri[0]] + v[tri[1]] + v[tri[2]]) / 3.0;
    per_tri[t] = area_[t] * (pot_->f(mag) - mean);
    if (mag < kDegenerateGradientFloor) {
      flux[t] = {0.0, 0.0};
    } else {
      const double scale = area_[t] * pot_->fp(mag) / mag;
      flux[t] = {scale * g.x, scale * g.y};
    }
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < nv; ++i) {
    if (mesh_->boundary[i]) continue;
    double gi = 0.0;
    for (const auto& [t, l] : incidence_[i]) {
      gi += flux[t].x * shape_grad_[t][l].x + flux[t].y * shape_grad_[t][l].y;
      gi -= area_[t] / 3.0;
    }
    grad[i] = gi;
  }

  double sum = 0.0;
  for (int t = 0; t < nt; ++t) sum += per_tri[t];
  return sum;
}

double EnergyAssembler::energy_and_gradient_serial(
    const std::vector<double>& v, std::vector<double>& grad) const {
  const int nv = mesh_->num_vertices();
  const int nt = static_cast<int>(area_.size());
  grad.assign(nv, 0.0);
  double sum = 0.0;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_->triangles[t];
    const Vec2 g = triangle_gradient(v, t);
    const double mag = std::hypot(g.x, g.y);
    const double mean = (v[tri[0]] + v[tri[1]] + v[tri[2]]) / 3.0;
    sum += area_[t] * (pot_->f(mag) - mean);
    Vec2 fl{0.0, 0.0};
    if (mag >= kDegenerateGradientFloor) {
      const double scale = area_[t] * pot_->fp(mag) / mag;
      fl = {scale * g.x, scale * g.y};
    }
    for (int l = 0; l < 3; ++l) {
      grad[tri[l]] +=
          fl.x * shape_grad_[t][l].x + fl.y * shape_grad_[t][l].y -
          area_[t] / 3.0;
    }
  }
  for (int i = 0; i < nv; ++i) {
    if (mesh_->boundary[i]) grad[i] = 0.0;
  }
  return sum;
}

}  // namespace degmin
