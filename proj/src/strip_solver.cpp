#include "oscilla/strip_solver.hpp"

#include <cmath>

namespace oscilla {

StripSolution solve_thin_on_mesh(std::shared_ptr<const TriMesh> mesh,
                                 const TrigPoly& f, const SolveOptions& opts) {
  if (mesh->kind != TriMesh::Kind::Strip) {
    throw Error(ErrorCode::MeshMismatch, "thin solve needs a strip mesh");
  }
  WeightedForm form;
  form.alpha = [](double, double t) { return 1.0 / std::cos(t); };
  form.beta = [](double, double t) { return std::cos(t); };
  form.mu = [](double, double t) { return std::cos(t); };
  form.volume_load = [&f](int, double phi, double theta) {
    return f.eval(phi) * std::cos(theta);
  };

  const SparseSystem sys = assemble(*mesh, form, Gauge::None);
  SolveStats stats;
  StripSolution sol;
  sol.mesh = mesh;
  sol.field = solve_spd(sys, opts, &stats);
  sol.eps = mesh->eps;
  sol.forcing = f;
  sol.solver_residual = stats.rel_residual;
  sol.iterations = stats.iterations;
  sol.dofs = static_cast<std::size_t>(mesh->n_dofs);
  return sol;
}

StripSolution solve_thin(const BoundaryProfile& profile, EpsilonValue eps,
                         const TrigPoly& f, const StripMeshParams& params,
                         const SolveOptions& opts) {
  auto mesh = std::make_shared<TriMesh>(build_strip_mesh(
      profile, eps, params.ny_per_cell, params.nz, params.tri_cap));
  return solve_thin_on_mesh(std::move(mesh), f, opts);
}

double energy_check(const StripSolution& sol) {
  const TriMesh& mesh = *sol.mesh;
  const ScalarField& w = sol.field;
  double energy = 0.0;
  double load = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const int tri = static_cast<int>(t);
    const TriQuadrature q = triangle_quadrature(mesh, tri);
    const Vec2 g = w.gradient(tri);
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = q.points[static_cast<std::size_t>(k)];
      const double c = std::cos(p.y);
      const double v = w.value_at(tri, p);
      energy += q.weight * (g.y * g.y * c + g.x * g.x / c + v * v * c);
      load += q.weight * v * sol.forcing.eval(p.x) * c;
    }
  }
  if (load == 0.0) return 0.0;
  return (energy - load) / load;
}

}  // namespace oscilla
