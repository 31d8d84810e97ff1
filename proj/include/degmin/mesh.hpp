#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

namespace degmin {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ShapeKind { Disk, Rectangle, Polygon };

struct DomainSpec {
  ShapeKind kind = ShapeKind::Disk;
  double disk_radius = 1.0;
  double rect_a = 1.0, rect_b = 1.0;
  std::vector<Vec2> polygon_vertices;  // simple, counterclockwise
  double exterior_sphere_rho = 1.0;    // = R for disks, user-supplied else
  std::optional<double> mean_curvature_min;

  static DomainSpec disk(double R);
  static DomainSpec rectangle(double a, double b, double rho);
  static DomainSpec polygon(std::vector<Vec2> vertices, double rho);

  double diameter() const;
  double area() const;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW, positive area
  std::vector<char> boundary;                 // 1 iff vertex on the boundary
  double h = 0.0;                             // max edge length

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_interior() const;
};

// Deterministic quasi-uniform triangulation. Disk meshes are concentric
// rings with the outermost ring exactly on the circle; rectangles are
// structured grids with cell size h_target split along one diagonal;
// polygons are ear-clipped then uniformly refined.
Mesh triangulate(const DomainSpec& d, double h_target);

// Vertex values; boundary vertices are held at zero by the solver.
struct ScalarField {
  std::vector<double> values;

  explicit ScalarField(const Mesh& m) : values(m.vertices.size(), 0.0) {}
  ScalarField() = default;
};

}  // namespace degmin
