#pragma once

#include <array>
#include <vector>

#include "degmin/mesh.hpp"
#include "degmin/potential.hpp"
#include "degmin/regularization.hpp"

namespace degmin {

// Second-order data at a point, standing in for a test function's
// derivatives. The Hessian is stored symmetrized.
struct PointJet {
  std::array<double, 2> grad{0.0, 0.0};
  std::array<std::array<double, 2>, 2> hess{{{0.0, 0.0}, {0.0, 0.0}}};

  double grad_norm() const;
  double laplacian() const { return hess[0][0] + hess[1][1]; }
  double infinity_laplacian() const;  // (D^2 u) grad . grad, un-normalized
};

// Gradient magnitudes below this are treated as the P = 0 branch.
inline constexpr double kFnZeroGradient = 1e-14;

// F_eps(P, X): the regularized operator; continuous extension -1 at P = 0.
double residual_Fn(const RegularizedPotential& r, const PointJet& jet);

// min-form for f in C^2((0, inf)); requires |grad| > 0.
double residual_C2(const PotentialModel& m, const PointJet& jet);

// min-form in a/b coefficients, defined for every jet.
double residual_ab(const PotentialModel& m, const PointJet& jet);

// Rescaled min-form with a uniform bound a(s) < a*.
double residual_astar(const PotentialModel& m, const PointJet& jet,
                      double a_star);

// Radial residual of the divergence-form equation on the exact profile;
// analytically zero in the active region g'(r/N) > sigma.
double residual_radial(const PotentialModel& m, int N, double R, double r);

enum class ResidualForm { Fn, C2, ab, astar };

enum class BranchTag { PdeActive, ThresholdActive, SubThreshold };

struct ResidualSample {
  int vertex;
  Vec2 point;
  double grad_norm;
  BranchTag branch;
  double residual;
};

struct ResidualReport {
  std::vector<ResidualSample> samples;
  int skipped_points = 0;
  double median_pde_active = 0.0;    // median |residual| over PDE-active points
  double q90_pde_active = 0.0;
  double median_threshold = 0.0;
  double sub_sigma_fraction = 0.0;   // fraction with |grad| < sigma - delta
};

// Least-squares quadratic jets over 2-ring vertex neighborhoods, at
// vertices >= 2 graph hops from the boundary. Rank-deficient neighborhoods
// are skipped and counted.
std::vector<std::pair<int, PointJet>> jets_from_field(
    const Mesh& mesh, const ScalarField& field, int* skipped = nullptr);

ResidualReport residual_field(const PotentialModel& m, const Mesh& mesh,
                              const ScalarField& field, ResidualForm form,
                              double delta, double a_star = 1.0);
ResidualReport residual_field(const RegularizedPotential& r, const Mesh& mesh,
                              const ScalarField& field, double delta);

struct PFunctionResult {
  std::vector<double> values;  // per vertex
  double max_interior = 0.0;
  double max_boundary = 0.0;
};

// P = Phi(|grad u|) + (2/N) u with vertex gradients averaged from incident
// triangles.
PFunctionResult pfunction_field(const PotentialModel& m, const Mesh& mesh,
                                const ScalarField& field, int N);

}  // namespace degmin
