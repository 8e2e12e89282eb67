#include "oscilla/cell_problems.hpp"

#include <cmath>
#include <numbers>

namespace oscilla {

namespace {

// Line data on B1 for the X problems. The continuous datum is
// -g'(y) psi(y, g(y)) dy (the surface measure sqrt(1+g'^2) cancels the
// normalization of the normal). Discretely we take the slope of the mesh's
// own piecewise-linear top boundary instead of g' at the quadrature points:
// the load then matches the divergence theorem on the discrete geometry
// exactly, which is what makes the direct and energy forms of q0 agree to
// solver tolerance instead of O(h^2).
EdgeLoad top_slope_load(double eps_value) {
  EdgeLoad el;
  el.tag = BoundaryTag::TopB1;
  el.param = EdgeLoad::Param::FirstCoordinate;
  if (eps_value == 0.0) {
    el.density = [](const Vec2& a, const Vec2& b, const Vec2&) {
      return -(b.y - a.y) / (b.x - a.x);
    };
  } else {
    el.density = [eps_value](const Vec2& a, const Vec2& b, const Vec2& p) {
      return -(b.y - a.y) / (b.x - a.x) / std::cos(eps_value * p.y);
    };
  }
  return el;
}

void require_cell_mesh(const TriMesh& mesh) {
  if (mesh.kind != TriMesh::Kind::Cell) {
    throw Error(ErrorCode::MeshMismatch, "cell problem needs a cell mesh");
  }
}

}  // namespace

ScalarField solve_x0(const BoundaryProfile& profile, const TriMesh& mesh,
                     const SolveOptions& opts, SolveStats* stats) {
  require_cell_mesh(mesh);
  (void)profile;
  WeightedForm form;
  form.edge_loads.push_back(top_slope_load(0.0));
  const SparseSystem sys = assemble(mesh, form, Gauge::MeanZero);
  return solve_spd(sys, opts, stats);
}

Q0Result compute_q0(const ScalarField& X0) {
  const TriMesh& mesh = *X0.mesh;
  Q0Result r;
  r.cell_area = mesh.area();
  double grad2 = 0.0;
  double int_dy = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double a = mesh.triangle_area(static_cast<int>(t));
    const Vec2 g = X0.gradient(static_cast<int>(t));
    grad2 += a * (g.x * g.x + g.y * g.y);
    int_dy += a * g.x;
  }
  r.grad_energy = grad2;
  r.q0 = (r.cell_area - int_dy) / r.cell_area;
  r.q0_energy = 1.0 - grad2 / r.cell_area;
  return r;
}

ScalarField solve_xeps(const BoundaryProfile& profile, EpsilonValue eps,
                       const TriMesh& mesh, const SolveOptions& opts,
                       SolveStats* stats) {
  require_cell_mesh(mesh);
  const double e = eps.value();
  if (!(e * profile.g1() < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::Config, "eps * g1 must stay below pi/2");
  }
  WeightedForm form;
  form.alpha = [e](double, double z) { return 1.0 / std::cos(e * z); };
  form.beta = [e](double, double z) { return std::cos(e * z); };
  form.edge_loads.push_back(top_slope_load(e));
  const SparseSystem sys = assemble(mesh, form, Gauge::MeanZero);
  return solve_spd(sys, opts, stats);
}

ScalarField solve_theta(const BoundaryProfile& profile, const ScalarField& X0,
                        double q0, const SolveOptions& opts, SolveStats* stats,
                        double* compat_out) {
  const TriMesh& mesh = *X0.mesh;
  require_cell_mesh(mesh);
  (void)profile;

  // int (1 - q0 - dX0/dy) is exactly zero when q0 came from compute_q0 on
  // the same field; anything else is an inconsistent pair
  double compat = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double a = mesh.triangle_area(static_cast<int>(t));
    compat += a * (1.0 - q0 - X0.gradient(static_cast<int>(t)).x);
  }
  const double area = mesh.area();
  if (compat_out) *compat_out = std::abs(compat) / area;
  if (std::abs(compat) > 1e-8 * area) {
    throw Error(ErrorCode::IncompatibleRHS,
                "Theta volume load incompatible: int(1 - q0 - dX0/dy) = " +
                    std::to_string(compat));
  }

  WeightedForm form;
  form.volume_load = [&X0, q0](int tri, double, double) {
    return 1.0 - q0 - X0.gradient(tri).x;
  };
  form.grad_load = [&X0](int tri, double x, double y) {
    return Vec2{X0.value_at(tri, {x, y}), 0.0};
  };
  const SparseSystem sys = assemble(mesh, form, Gauge::MeanZero);
  return solve_spd(sys, opts, stats);
}

CellSolution solve_cell(const BoundaryProfile& profile, int ny, int nz,
                        const SolveOptions& opts, bool with_theta,
                        const std::vector<int>& xeps_ms) {
  CellSolution cs;
  cs.profile = profile;
  cs.mesh = std::make_shared<TriMesh>(build_cell_mesh(profile, ny, nz));

  SolveStats stats;
  cs.X0 = solve_x0(profile, *cs.mesh, opts, &stats);
  cs.x0_compat = stats.compat_measure;
  cs.x0_residual = stats.rel_residual;
  cs.x0_iterations = stats.iterations;

  const Q0Result q = compute_q0(cs.X0);
  cs.q0 = q.q0;
  cs.q0_energy = q.q0_energy;
  cs.grad_energy = q.grad_energy;
  cs.cell_area = q.cell_area;

  if (with_theta) {
    cs.theta = solve_theta(profile, cs.X0, cs.q0, opts, &stats,
                           &cs.theta_compat);
    cs.theta_residual = stats.rel_residual;
  }
  for (int m : xeps_ms) {
    cs.x_eps.emplace(m, solve_xeps(profile, EpsilonValue(m), *cs.mesh, opts));
  }
  return cs;
}

double l2_norm_sq(const ScalarField& u) {
  const TriMesh& mesh = *u.mesh;
  return integrate(mesh, [&u](int tri, double x, double y) {
    const double v = u.value_at(tri, {x, y});
    return v * v;
  });
}

double h1_seminorm_sq(const ScalarField& u) {
  const TriMesh& mesh = *u.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec2 g = u.gradient(static_cast<int>(t));
    s += mesh.triangle_area(static_cast<int>(t)) * (g.x * g.x + g.y * g.y);
  }
  return s;
}

ScalarField field_difference(const ScalarField& u, const ScalarField& v) {
  if (u.mesh != v.mesh) {
    throw Error(ErrorCode::MeshMismatch,
                "field difference needs fields on the same mesh");
  }
  ScalarField d = u;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    d.values[i] -= v.values[i];
  }
  return d;
}

}  // namespace oscilla
