#include "oscilla/mesh.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace oscilla {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Shared lattice construction: columns at x_i = x_min + (period * i) / nx
// (multiply-then-divide so that a 2x refinement reproduces coarse nodes
// bitwise), rows at s_j = j / nz of the column height.
TriMesh build_lattice(TriMesh::Kind kind, EpsilonValue eps, double x_min,
                      double period, int nx, int nz,
                      const std::vector<double>& col_height,
                      std::size_t tri_cap) {
  if (nx < 2 || nz < 1) {
    throw Error(ErrorCode::Config, "mesh needs nx >= 2 and nz >= 1");
  }
  const std::size_t ntri = 2ull * nx * nz;
  if (ntri > tri_cap) {
    throw Error(ErrorCode::ResourceLimit,
                "triangle count " + std::to_string(ntri) + " exceeds cap " +
                    std::to_string(tri_cap));
  }

  TriMesh m;
  m.kind = kind;
  m.eps = eps;
  m.nx = nx;
  m.nz = nz;
  m.x_min = x_min;
  m.x_max = x_min + period;
  m.top = col_height;

  m.vertices.resize(static_cast<std::size_t>(nx + 1) * (nz + 1));
  for (int i = 0; i <= nx; ++i) {
    const double x = x_min + (period * i) / nx;
    const double g = col_height[static_cast<std::size_t>(i)];
    for (int j = 0; j <= nz; ++j) {
      const double s = static_cast<double>(j) / nz;
      m.vertices[static_cast<std::size_t>(m.vid(i, j))] = {x, s * g};
    }
  }

  m.triangles.reserve(ntri);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nz; ++j) {
      const int a = m.vid(i, j);
      const int b = m.vid(i + 1, j);
      const int c = m.vid(i + 1, j + 1);
      const int d = m.vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      } else {
        m.triangles.push_back({a, b, d});
        m.triangles.push_back({b, c, d});
      }
    }
  }
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (!(m.triangle_area(static_cast<int>(t)) > 0.0)) {
      throw Error(ErrorCode::DegenerateMesh,
                  "triangle " + std::to_string(t) + " has non-positive area");
    }
  }

  m.periodic_pairs.reserve(nz + 1);
  for (int j = 0; j <= nz; ++j) {
    m.periodic_pairs.emplace_back(m.vid(nx, j), m.vid(0, j));
  }

  m.boundary_edges.reserve(2 * nx);
  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({m.vid(i, 0), m.vid(i + 1, 0),
                                BoundaryTag::BottomB2});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({m.vid(i, nz), m.vid(i + 1, nz),
                                BoundaryTag::TopB1});
  }

  m.master_of.resize(m.vertices.size());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    m.master_of[v] = static_cast<int>(v);
  }
  for (const auto& [slave, master] : m.periodic_pairs) {
    m.master_of[static_cast<std::size_t>(slave)] = master;
  }
  m.dof_of.assign(m.vertices.size(), -1);
  int next = 0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (m.master_of[v] == static_cast<int>(v)) {
      m.dof_of[v] = next++;
    }
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (m.dof_of[v] < 0) {
      m.dof_of[v] = m.dof_of[static_cast<std::size_t>(m.master_of[v])];
    }
  }
  m.n_dofs = next;
  return m;
}

}  // namespace

const char* boundary_tag_name(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::TopB1: return "B1_top";
    case BoundaryTag::BottomB2: return "B2_bottom";
    case BoundaryTag::Lateral: return "lateral";
  }
  return "unknown";
}

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[static_cast<std::size_t>(t)];
  return 0.5 * cross(vertices[static_cast<std::size_t>(tri[0])],
                     vertices[static_cast<std::size_t>(tri[1])],
                     vertices[static_cast<std::size_t>(tri[2])]);
}

void TriMesh::shape_gradients(int t, std::array<Vec2, 3>& grads) const {
  const auto& tri = triangles[static_cast<std::size_t>(t)];
  const Vec2& p0 = vertices[static_cast<std::size_t>(tri[0])];
  const Vec2& p1 = vertices[static_cast<std::size_t>(tri[1])];
  const Vec2& p2 = vertices[static_cast<std::size_t>(tri[2])];
  const double inv2A = 1.0 / (2.0 * triangle_area(t));
  grads[0] = {(p1.y - p2.y) * inv2A, (p2.x - p1.x) * inv2A};
  grads[1] = {(p2.y - p0.y) * inv2A, (p0.x - p2.x) * inv2A};
  grads[2] = {(p0.y - p1.y) * inv2A, (p1.x - p0.x) * inv2A};
}

double TriMesh::area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    s += triangle_area(static_cast<int>(t));
  }
  return s;
}

double TriMesh::max_edge() const {
  double h2 = 0.0;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      const Vec2& p = vertices[static_cast<std::size_t>(tri[e])];
      const Vec2& q = vertices[static_cast<std::size_t>(tri[(e + 1) % 3])];
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      h2 = std::max(h2, dx * dx + dy * dy);
    }
  }
  return std::sqrt(h2);
}

TriMesh build_cell_mesh(const BoundaryProfile& profile, int ny, int nz) {
  if (!profile.is_validated()) {
    throw Error(ErrorCode::Config, "cell mesh needs a validated profile");
  }
  const double L = profile.period();
  std::vector<double> top(static_cast<std::size_t>(ny) + 1);
  for (int i = 0; i <= ny; ++i) {
    top[static_cast<std::size_t>(i)] = profile.eval((L * i) / ny);
  }
  return build_lattice(TriMesh::Kind::Cell, EpsilonValue(1), 0.0, L, ny, nz,
                       top, 32'000'000);
}

TriMesh build_strip_mesh(const BoundaryProfile& profile, EpsilonValue eps,
                         int ny_per_cell, int nz, std::size_t tri_cap) {
  if (!profile.is_validated()) {
    throw Error(ErrorCode::Config, "strip mesh needs a validated profile");
  }
  if (ny_per_cell < 2) {
    throw Error(ErrorCode::Config, "strip mesh needs ny_per_cell >= 2");
  }
  const int cells = profile.period_divisor() * eps.m();
  const int nx = cells * ny_per_cell;
  const double e = eps.value();
  std::vector<double> top(static_cast<std::size_t>(nx) + 1);
  for (int i = 0; i <= nx; ++i) {
    const double phi = (kTwoPi * i) / nx;
    // phi/eps evaluated as phi*m: exact for eps = 1/m
    top[static_cast<std::size_t>(i)] = e * profile.eval(phi * eps.m());
  }
  return build_lattice(TriMesh::Kind::Strip, eps, 0.0, kTwoPi, nx, nz, top,
                       tri_cap);
}

TriMesh build_rect_mesh(double width, double height, int nx, int nz) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::Config, "rect mesh needs positive extents");
  }
  std::vector<double> top(static_cast<std::size_t>(nx) + 1, height);
  return build_lattice(TriMesh::Kind::Cell, EpsilonValue(1), 0.0, width, nx,
                       nz, top, 32'000'000);
}

double mesh_area(const TriMesh& mesh) { return mesh.area(); }
double mesh_h(const TriMesh& mesh) { return mesh.max_edge(); }

void write_mesh_text(const TriMesh& mesh, std::ostream& os) {
  os.precision(17);
  for (const Vec2& v : mesh.vertices) {
    os << "v " << v.x << ' ' << v.y << '\n';
  }
  for (const auto& t : mesh.triangles) {
    os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  for (const auto& [slave, master] : mesh.periodic_pairs) {
    os << "p " << slave << ' ' << master << '\n';
  }
  for (const auto& e : mesh.boundary_edges) {
    os << "b " << e.v0 << ' ' << e.v1 << ' ' << boundary_tag_name(e.tag)
       << '\n';
  }
}

}  // namespace oscilla
