#pragma once

#include <vector>

#include "degmin/mesh.hpp"
#include "degmin/regularization.hpp"

namespace degmin {

// Precomputed P1 element data: per-triangle areas, shape-function gradients
// and a per-vertex incidence table. The parallel assembly gathers triangle
// contributions vertex-by-vertex in fixed order, so results are identical
// for any thread count.
class EnergyAssembler {
 public:
  EnergyAssembler(const RegularizedPotential& pot, const Mesh& mesh);

  // Energy J_eps(v) and its gradient w.r.t. all vertex values; gradient
  // entries at boundary vertices are forced to zero (homogeneous Dirichlet).
  double energy_and_gradient(const std::vector<double>& v,
                             std::vector<double>& grad) const;

  // Triangle-loop scatter version, kept as the reference implementation.
  double energy_and_gradient_serial(const std::vector<double>& v,
                                    std::vector<double>& grad) const;

  double energy(const std::vector<double>& v) const;

  const Mesh& mesh() const { return *mesh_; }
  const RegularizedPotential& potential() const { return *pot_; }

  // Per-triangle constant gradient of the P1 interpolant.
  Vec2 triangle_gradient(const std::vector<double>& v, int t) const;

 private:
  const RegularizedPotential* pot_;
  const Mesh* mesh_;
  std::vector<double> area_;                  // per triangle
  std::vector<std::array<Vec2, 3>> shape_grad_;  // grad of each vertex basis
  std::vector<std::vector<std::pair<int, int>>> incidence_;  // vertex -> (tri, local)

  double triangle_energy_terms(const std::vector<double>& v,
                               std::vector<double>& per_tri) const;
};

// Gradient threshold below which the flux is taken as zero (valid because
// f_eps'(s)/s -> 0 as s -> 0).
inline constexpr double kDegenerateGradientFloor = 1e-14;

}  // namespace degmin
