#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "oscilla/mesh.hpp"

namespace oscilla {

// P1 nodal field on a TriMesh. Periodic slave vertices mirror their masters.
struct ScalarField {
  const TriMesh* mesh = nullptr;
  std::vector<double> values;  // one per vertex

  static ScalarField zeros(const TriMesh& m) {
    return {&m, std::vector<double>(m.vertices.size(), 0.0)};
  }

  double value_at(int tri, const Vec2& p) const;  // P1 interpolation
  Vec2 gradient(int tri) const;                   // constant per triangle

  // integral of the field over the mesh (exact for P1)
  double integral() const;
  void subtract_mean();
};

// Degree-2 triangle rule (3 points, weights area/3) shared by assembly and
// all norm/coefficient integrals so Galerkin identities hold to roundoff.
struct TriQuadrature {
  std::array<Vec2, 3> points;
  double weight;  // same for the three points
};
TriQuadrature triangle_quadrature(const TriMesh& mesh, int tri);

using WeightFn = std::function<double(double x, double y)>;
// volume densities may depend on the containing triangle so callers can use
// P1 fields (values/gradients) directly without point location
using TriDensityFn = std::function<double(int tri, double x, double y)>;
using TriVecDensityFn = std::function<Vec2(int tri, double x, double y)>;

// Boundary line load on tagged edges. ArcLength integrates the density
// against ds; FirstCoordinate against dx (used by the cell problems, where
// sqrt(1+g'^2) has been cancelled analytically against dS). The callback
// receives the edge endpoints so data tied to the discrete boundary (for
// example its slope) stays variationally consistent.
struct EdgeLoad {
  enum class Param { ArcLength, FirstCoordinate };
  BoundaryTag tag = BoundaryTag::TopB1;
  Param param = Param::ArcLength;
  std::function<double(const Vec2& a, const Vec2& b, const Vec2& p)> density;
};

// Bilinear form  (u,v) -> int alpha u_x v_x + beta u_y v_y + mu u v
// plus load functionals  v -> int rho v + int G . grad v + edge terms.
struct WeightedForm {
  WeightFn alpha;             // weight on d/dx terms, must be > 0
  WeightFn beta;              // weight on d/dy terms, must be > 0
  WeightFn mu;                // mass weight, >= 0; empty means 0
  TriDensityFn volume_load;   // optional
  TriVecDensityFn grad_load;  // optional
  std::vector<EdgeLoad> edge_loads;
};

enum class Gauge { None, MeanZero };

struct CSRMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

struct SparseSystem {
  const TriMesh* mesh = nullptr;
  CSRMatrix matrix;          // reduced (periodic-master) dofs
  std::vector<double> rhs;
  Gauge gauge = Gauge::None;
};

SparseSystem assemble(const TriMesh& mesh, const WeightedForm& form,
                      Gauge gauge = Gauge::None);

struct SolveOptions {
  double tol = 1e-10;            // relative residual target
  int max_iterations = 0;        // <= 0: 20 * sqrt(n)
  double compat_tol = 1e-8;      // |sum rhs| / |rhs| threshold for MeanZero
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  double compat_measure = 0.0;  // |sum rhs| / |rhs| before projection
};

// Jacobi-preconditioned CG. Under Gauge::MeanZero the rhs is projected onto
// the compatibility subspace (throws IncompatibleRHS if the projection is
// larger than compat_tol) and the solution is post-projected to integral 0.
ScalarField solve_spd(const SparseSystem& system, const SolveOptions& opts = {},
                      SolveStats* stats = nullptr);

// Quadrature of a per-triangle density with the shared rule; accumulation
// runs in ascending triangle order, so results are bit-reproducible.
double integrate(const TriMesh& mesh, const TriDensityFn& density);

// Matrix Market coordinate format (general symmetric storage written in
// full) for external validation.
void write_matrix_market(const CSRMatrix& m, std::ostream& os);

}  // namespace oscilla
