#include "degmin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace degmin {
namespace {

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

void add_triangle(Mesh& m, int i, int j, int k) {
  if (signed_area(m.vertices[i], m.vertices[j], m.vertices[k]) < 0.0) {
    std::swap(j, k);
  }
  if (signed_area(m.vertices[i], m.vertices[j], m.vertices[k]) <= 0.0) {
    throw MeshError("degenerate triangle produced during meshing");
  }
  m.triangles.push_back({i, j, k});
}

void finalize(Mesh& m) {
  // Boundary vertices are the endpoints of edges used by a single triangle.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  m.boundary.assign(m.vertices.size(), 0);
  m.h = 0.0;
  for (const auto& [edge, count] : edge_count) {
    m.h = std::max(m.h, dist(m.vertices[edge.first], m.vertices[edge.second]));
    if (count == 1) {
      m.boundary[edge.first] = 1;
      m.boundary[edge.second] = 1;
    }
  }
}

Mesh disk_mesh(double R, int rings) {
  Mesh m;
  m.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start(rings + 1, 0);
  for (int k = 1; k <= rings; ++k) {
    ring_start[k] = m.num_vertices();
    const double r = R * k / rings;
    const int n = 6 * k;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n;
      m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  // Central fan.
  for (int j = 0; j < 6; ++j) {
    add_triangle(m, 0, ring_start[1] + j, ring_start[1] + (j + 1) % 6);
  }
  // Annulus strips, merged by angle.
  for (int k = 2; k <= rings; ++k) {
    const int m0 = 6 * (k - 1), m1 = 6 * k;
    const int s0 = ring_start[k - 1], s1 = ring_start[k];
    int i = 0, j = 0;
    while (i < m0 || j < m1) {
      const double ang_i = 2.0 * std::numbers::pi * (i + 1) / m0;
      const double ang_j = 2.0 * std::numbers::pi * (j + 1) / m1;
      if (i < m0 && (j >= m1 || ang_i <= ang_j)) {
        add_triangle(m, s0 + i % m0, s1 + j % m1, s0 + (i + 1) % m0);
        ++i;
      } else {
        add_triangle(m, s0 + i % m0, s1 + j % m1, s1 + (j + 1) % m1);
        ++j;
      }
    }
  }
  finalize(m);
  return m;
}

Mesh rectangle_mesh(double a, double b, double h_target) {
  const int nx = std::max(1, static_cast<int>(std::ceil(a / h_target - 1e-12)));
  const int ny = std::max(1, static_cast<int>(std::ceil(b / h_target - 1e-12)));
  Mesh m;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.vertices.push_back({a * i / nx, b * j / ny});
    }
  }
  auto idx = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      add_triangle(m, idx(i, j), idx(i + 1, j), idx(i + 1, j + 1));
      add_triangle(m, idx(i, j), idx(i + 1, j + 1), idx(i, j + 1));
    }
  }
  finalize(m);
  return m;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c,
                    const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  return orient(a, b, c) * orient(a, b, d) < 0 &&
         orient(c, d, a) * orient(c, d, b) < 0;
}

Mesh polygon_mesh(const std::vector<Vec2>& poly, double h_target) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) throw MeshError("polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    area2 += p.x * q.y - q.x * p.y;
  }
  if (area2 <= 0.0) {
    throw MeshError("polygon must be counterclockwise with positive area");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j],
                         poly[(j + 1) % n])) {
        throw MeshError("polygon is self-intersecting");
      }
    }
  }

  // Ear clipping for the coarse triangulation.
  Mesh m;
  m.vertices = poly;
  std::vector<int> ring(n);
  for (int i = 0; i < n; ++i) ring[i] = i;
  while (ring.size() > 3) {
    bool clipped = false;
    for (size_t i = 0; i < ring.size(); ++i) {
      const int ia = ring[(i + ring.size() - 1) % ring.size()];
      const int ib = ring[i];
      const int ic = ring[(i + 1) % ring.size()];
      if (signed_area(m.vertices[ia], m.vertices[ib], m.vertices[ic]) <= 0.0) {
        continue;
      }
      bool ear = true;
      for (int other : ring) {
        if (other == ia || other == ib || other == ic) continue;
        const Vec2& p = m.vertices[other];
        if (signed_area(m.vertices[ia], m.vertices[ib], p) >= 0.0 &&
            signed_area(m.vertices[ib], m.vertices[ic], p) >= 0.0 &&
            signed_area(m.vertices[ic], m.vertices[ia], p) >= 0.0) {
          ear = false;
          break;
        }
      }
      if (ear) {
        add_triangle(m, ia, ib, ic);
        ring.erase(ring.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped) throw MeshError("ear clipping failed (degenerate polygon?)");
  }
  add_triangle(m, ring[0], ring[1], ring[2]);

  // Uniform 4-splits until every edge is short enough; boundary-edge
  // midpoints stay on the (straight) polygon boundary.
  for (int pass = 0; pass < 30; ++pass) {
    double max_edge = 0.0;
    for (const auto& t : m.triangles) {
      for (int e = 0; e < 3; ++e) {
        max_edge =
            std::max(max_edge, dist(m.vertices[t[e]], m.vertices[t[(e + 1) % 3]]));
      }
    }
    if (max_edge <= h_target) break;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      int lo = std::min(a, b), hi = std::max(a, b);
      auto it = midpoint.find({lo, hi});
      if (it != midpoint.end()) return it->second;
      const int idx = m.num_vertices();
      m.vertices.push_back({0.5 * (m.vertices[a].x + m.vertices[b].x),
                            0.5 * (m.vertices[a].y + m.vertices[b].y)});
      midpoint[{lo, hi}] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> old;
    old.swap(m.triangles);
    for (const auto& t : old) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      add_triangle(m, t[0], ab, ca);
      add_triangle(m, t[1], bc, ab);
      add_triangle(m, t[2], ca, bc);
      add_triangle(m, ab, bc, ca);
    }
  }
  finalize(m);
  return m;
}

}  // namespace

DomainSpec DomainSpec::disk(double R) {
  if (!(R > 0.0)) throw MeshError("disk radius must be positive");
  DomainSpec d;
  d.kind = ShapeKind::Disk;
  d.disk_radius = R;
  d.exterior_sphere_rho = R;
  d.mean_curvature_min = 1.0 / R;
  return d;
}

DomainSpec DomainSpec::rectangle(double a, double b, double rho) {
  if (!(a > 0.0) || !(b > 0.0)) throw MeshError("rectangle sides must be positive");
  DomainSpec d;
  d.kind = ShapeKind::Rectangle;
  d.rect_a = a;
  d.rect_b = b;
  d.exterior_sphere_rho = rho;
  return d;
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> vertices, double rho) {
  DomainSpec d;
  d.kind = ShapeKind::Polygon;
  d.polygon_vertices = std::move(vertices);
  d.exterior_sphere_rho = rho;
  return d;
}

double DomainSpec::diameter() const {
  switch (kind) {
    case ShapeKind::Disk:
      return 2.0 * disk_radius;
    case ShapeKind::Rectangle:
      return std::hypot(rect_a, rect_b);
    case ShapeKind::Polygon: {
      double d = 0.0;
      for (size_t i = 0; i < polygon_vertices.size(); ++i) {
        for (size_t j = i + 1; j < polygon_vertices.size(); ++j) {
          d = std::max(d, dist(polygon_vertices[i], polygon_vertices[j]));
        }
      }
      return d;
    }
  }
  return 0.0;
}

double DomainSpec::area() const {
  switch (kind) {
    case ShapeKind::Disk:
      return std::numbers::pi * disk_radius * disk_radius;
    case ShapeKind::Rectangle:
      return rect_a * rect_b;
    case ShapeKind::Polygon: {
      double a2 = 0.0;
      const auto& p = polygon_vertices;
      for (size_t i = 0; i < p.size(); ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % p.size()];
        a2 += u.x * v.y - v.x * u.y;
      }
      return 0.5 * a2;
    }
  }
  return 0.0;
}

int Mesh::num_interior() const {
  int n = 0;
  for (char b : boundary) n += (b == 0);
  return n;
}

Mesh triangulate(const DomainSpec& d, double h_target) {
  if (!(h_target > 0.0)) throw MeshError("h_target must be positive");
  switch (d.kind) {
    case ShapeKind::Disk: {
      int rings = std::max(
          1, static_cast<int>(std::ceil(d.disk_radius / h_target - 1e-12)));
      Mesh m = disk_mesh(d.disk_radius, rings);
      while (m.h > h_target) {
        ++rings;
        m = disk_mesh(d.disk_radius, rings);
      }
      return m;
    }
    case ShapeKind::Rectangle:
      return rectangle_mesh(d.rect_a, d.rect_b, h_target);
    case ShapeKind::Polygon:
      return polygon_mesh(d.polygon_vertices, h_target);
  }
  throw MeshError("unknown domain shape");
}

}  // namespace degmin
