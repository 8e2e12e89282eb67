#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "oscilla/boundary_profile.hpp"

namespace oscilla {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryTag { TopB1, BottomB2, Lateral };

const char* boundary_tag_name(BoundaryTag tag);

// Conforming triangulation of the basic cell Y* = {0<y<L, 0<z<g(y)} or of
// the thin strip R^eps = {0<phi<2pi, 0<theta<eps*g(phi/eps)}, built as a
// graded tensor lattice: columns at uniform first coordinates, rows at
// uniform fractions s_j of the local boundary height, lattice cells split
// into triangles with the diagonal alternating per cell.
//
// The right edge duplicates the left edge's geometry; periodic_pairs maps
// each right-edge vertex (slave) to its left-edge master, and dof_of gives
// the reduced (periodic) numbering used by assembly.
struct TriMesh {
  enum class Kind { Cell, Strip };

  Kind kind = Kind::Cell;
  EpsilonValue eps;  // meaningful for Kind::Strip

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // ccw orientation
  std::vector<std::pair<int, int>> periodic_pairs;  // (slave, master)

  struct BoundaryEdge {
    int v0 = 0;
    int v1 = 0;
    BoundaryTag tag = BoundaryTag::BottomB2;
  };
  std::vector<BoundaryEdge> boundary_edges;

  // lattice metadata (structured point location, refinement nesting)
  int nx = 0;  // lattice cells in the first coordinate
  int nz = 0;  // lattice cells in the second coordinate
  double x_min = 0.0;
  double x_max = 0.0;            // x_min + period
  std::vector<double> top;       // top height per column, size nx+1

  std::vector<int> master_of;  // vertex -> master vertex (identity if master)
  std::vector<int> dof_of;     // vertex -> reduced dof
  int n_dofs = 0;

  int vid(int i, int j) const { return i * (nz + 1) + j; }
  double period() const { return x_max - x_min; }

  double area() const;      // sum of signed triangle areas
  double max_edge() const;  // mesh size h

  double triangle_area(int t) const;
  // P1 shape gradients on triangle t; grads[c] is constant over the triangle
  void shape_gradients(int t, std::array<Vec2, 3>& grads) const;
};

// Cell mesh with (ny+1)(nz+1) vertices and 2*ny*nz triangles; vertices at
// (y_i, s_j * g(y_i)). Periodic pairs identify the y = L column with y = 0.
TriMesh build_cell_mesh(const BoundaryProfile& profile, int ny, int nz);

// Strip mesh with a*m*ny_per_cell columns over [0, 2*pi] and rows at
// s_j * eps * g(phi_i / eps); per-cell resolution is eps-independent.
// Throws ResourceLimit when the triangle count exceeds tri_cap.
TriMesh build_strip_mesh(const BoundaryProfile& profile, EpsilonValue eps,
                         int ny_per_cell, int nz,
                         std::size_t tri_cap = 32'000'000);

// Flat rectangle [0, width] x [0, height], periodic in x. Used by the
// manufactured-solution checks.
TriMesh build_rect_mesh(double width, double height, int nx, int nz);

double mesh_area(const TriMesh& mesh);
double mesh_h(const TriMesh& mesh);

// Plain-text dump: "v x y", "t i j k", "p slave master", "b v0 v1 tag".
void write_mesh_text(const TriMesh& mesh, std::ostream& os);

}  // namespace oscilla
