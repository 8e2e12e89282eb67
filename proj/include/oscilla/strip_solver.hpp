#pragma once

#include <memory>

#include "oscilla/fem.hpp"
#include "oscilla/trig_poly.hpp"

namespace oscilla {

// Discrete solution of the thin-strip problem on R^eps:
//   -(1/cos t) d_t(cos t d_t w) - (1/cos^2 t) d_pp w + w = f(p),
// natural Neumann conditions on top/bottom, 2*pi-periodic in phi.
// Assembled weights: alpha = 1/cos(theta), beta = mu = cos(theta).
struct StripSolution {
  std::shared_ptr<const TriMesh> mesh;
  ScalarField field;
  EpsilonValue eps;
  TrigPoly forcing;
  double solver_residual = 0.0;
  int iterations = 0;
  std::size_t dofs = 0;
};

struct StripMeshParams {
  int ny_per_cell = 32;
  int nz = 16;
  std::size_t tri_cap = 32'000'000;
};

StripSolution solve_thin(const BoundaryProfile& profile, EpsilonValue eps,
                         const TrigPoly& f, const StripMeshParams& params,
                         const SolveOptions& opts = {});

// same solve, reusing a prebuilt strip mesh
StripSolution solve_thin_on_mesh(std::shared_ptr<const TriMesh> mesh,
                                 const TrigPoly& f,
                                 const SolveOptions& opts = {});

// Galerkin identity gap (a_eps(w,w) - (w,f)_eps) / (w,f)_eps, evaluated with
// the shared quadrature; 0 by convention when f = 0. Stays within a few
// multiples of the CG tolerance for a converged solve.
double energy_check(const StripSolution& sol);

}  // namespace oscilla
