#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "oscilla/fem.hpp"

namespace oscilla {

// Solutions of the auxiliary problems on the basic cell Y* and the
// homogenized coefficient derived from them.
//
//   X0:    pure-Neumann Laplace problem driven by the boundary slope,
//          periodic, mean zero.
//   q0:    (1/|Y*|) int (1 - dX0/dy); also cross-checked against
//          1 - |grad X0|^2 / |Y*|, which agrees up to solver tolerance.
//   Xeps:  weighted variant with coefficients 1/cos(eps z), cos(eps z);
//          converges to X0 as eps -> 0.
//   Theta: second-order cell function with flux (grad Theta - (X0,0)).N = 0
//          and load (1 - q0 - dX0/dy), compatible by construction of q0.
struct CellSolution {
  BoundaryProfile profile;
  std::shared_ptr<const TriMesh> mesh;

  ScalarField X0;
  double q0 = 1.0;          // direct formula, the reported value
  double q0_energy = 1.0;   // 1 - grad_energy/cell_area (cross-check)
  double grad_energy = 0.0; // |grad X0|^2 over Y*
  double cell_area = 0.0;

  double x0_compat = 0.0;    // |sum rhs| / |rhs| of the assembled load
  double x0_residual = 0.0;
  int x0_iterations = 0;

  std::optional<ScalarField> theta;
  double theta_compat = 0.0;  // |int (1 - q0 - dX0/dy)| / |Y*|
  double theta_residual = 0.0;

  std::map<int, ScalarField> x_eps;  // keyed by m, eps = 1/m
};

ScalarField solve_x0(const BoundaryProfile& profile, const TriMesh& mesh,
                     const SolveOptions& opts = {}, SolveStats* stats = nullptr);

struct Q0Result {
  double q0 = 1.0;
  double q0_energy = 1.0;
  double grad_energy = 0.0;
  double cell_area = 0.0;
};
Q0Result compute_q0(const ScalarField& X0);

ScalarField solve_xeps(const BoundaryProfile& profile, EpsilonValue eps,
                       const TriMesh& mesh, const SolveOptions& opts = {},
                       SolveStats* stats = nullptr);

// Requires X0 and q0 from the same mesh; throws IncompatibleRHS when the
// volume compatibility integral is not ~0 (an inconsistent (X0, q0) pair).
ScalarField solve_theta(const BoundaryProfile& profile, const ScalarField& X0,
                        double q0, const SolveOptions& opts = {},
                        SolveStats* stats = nullptr,
                        double* compat_out = nullptr);

// One-stop cell solve on a fresh ny x nz mesh.
CellSolution solve_cell(const BoundaryProfile& profile, int ny, int nz,
                        const SolveOptions& opts = {}, bool with_theta = true,
                        const std::vector<int>& xeps_ms = {});

// Plain (unweighted) norms over the field's mesh, used for cell-problem
// diagnostics and the eps-continuity checks.
double l2_norm_sq(const ScalarField& u);
double h1_seminorm_sq(const ScalarField& u);
inline double h1_norm_sq(const ScalarField& u) {
  return l2_norm_sq(u) + h1_seminorm_sq(u);
}
ScalarField field_difference(const ScalarField& u, const ScalarField& v);

}  // namespace oscilla
