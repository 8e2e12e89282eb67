#include "oscilla/fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace oscilla {

namespace {

// barycentric coordinates of the degree-2 rule
constexpr double kQa = 2.0 / 3.0;
constexpr double kQb = 1.0 / 6.0;

// 2-point Gauss on [0,1]
constexpr double kEdgeQ0 = 0.5 - 0.28867513459481288225;  // 1/2 - sqrt(3)/6
constexpr double kEdgeQ1 = 0.5 + 0.28867513459481288225;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteWeight,
                std::string(what) + " evaluated to a non-finite value");
  }
}

}  // namespace

double ScalarField::value_at(int tri, const Vec2& p) const {
  const auto& t = mesh->triangles[static_cast<std::size_t>(tri)];
  const Vec2& p0 = mesh->vertices[static_cast<std::size_t>(t[0])];
  // P1: u(p) = u(p0) + grad(u) . (p - p0)
  const Vec2 gr = gradient(tri);
  return values[static_cast<std::size_t>(t[0])] + gr.x * (p.x - p0.x) +
         gr.y * (p.y - p0.y);
}

Vec2 ScalarField::gradient(int tri) const {
  const auto& t = mesh->triangles[static_cast<std::size_t>(tri)];
  std::array<Vec2, 3> g;
  mesh->shape_gradients(tri, g);
  Vec2 gr{0.0, 0.0};
  for (int c = 0; c < 3; ++c) {
    const double u = values[static_cast<std::size_t>(t[c])];
    gr.x += u * g[static_cast<std::size_t>(c)].x;
    gr.y += u * g[static_cast<std::size_t>(c)].y;
  }
  return gr;
}

double ScalarField::integral() const {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh->triangles.size(); ++t) {
    const auto& tri = mesh->triangles[t];
    const double nodal = values[static_cast<std::size_t>(tri[0])] +
                         values[static_cast<std::size_t>(tri[1])] +
                         values[static_cast<std::size_t>(tri[2])];
    s += mesh->triangle_area(static_cast<int>(t)) * nodal / 3.0;
  }
  return s;
}

void ScalarField::subtract_mean() {
  const double c = integral() / mesh->area();
  for (double& v : values) v -= c;
}

TriQuadrature triangle_quadrature(const TriMesh& mesh, int tri) {
  const auto& t = mesh.triangles[static_cast<std::size_t>(tri)];
  const Vec2& p0 = mesh.vertices[static_cast<std::size_t>(t[0])];
  const Vec2& p1 = mesh.vertices[static_cast<std::size_t>(t[1])];
  const Vec2& p2 = mesh.vertices[static_cast<std::size_t>(t[2])];
  TriQuadrature q;
  q.weight = mesh.triangle_area(tri) / 3.0;
  auto bary = [&](double l0, double l1, double l2) {
    return Vec2{l0 * p0.x + l1 * p1.x + l2 * p2.x,
                l0 * p0.y + l1 * p1.y + l2 * p2.y};
  };
  q.points[0] = bary(kQa, kQb, kQb);
  q.points[1] = bary(kQb, kQa, kQb);
  q.points[2] = bary(kQb, kQb, kQa);
  return q;
}

void CSRMatrix::apply(const std::vector<double>& x,
                      std::vector<double>& y) const {
  y.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int idx = row_ptr[static_cast<std::size_t>(r)];
         idx < row_ptr[static_cast<std::size_t>(r) + 1]; ++idx) {
      s += val[static_cast<std::size_t>(idx)] *
           x[static_cast<std::size_t>(col[static_cast<std::size_t>(idx)])];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
}

SparseSystem assemble(const TriMesh& mesh, const WeightedForm& form,
                      Gauge gauge) {
  const int n = mesh.n_dofs;
  // per-row coordinate lists, merged deterministically at the end
  std::vector<std::vector<std::pair<int, double>>> rows(
      static_cast<std::size_t>(n));
  std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);

  const std::array<std::array<double, 3>, 3> shape = {{
      {kQa, kQb, kQb},
      {kQb, kQa, kQb},
      {kQb, kQb, kQa},
  }};

  std::array<Vec2, 3> grads;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    mesh.shape_gradients(static_cast<int>(t), grads);
    const TriQuadrature q = triangle_quadrature(mesh, static_cast<int>(t));

    // quadrature of the weights; shape gradients are constant, so the
    // stiffness block needs only the weighted area
    double wa = 0.0, wb = 0.0;
    std::array<double, 3> wm{0.0, 0.0, 0.0};
    std::array<double, 3> load{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = q.points[static_cast<std::size_t>(k)];
      const double av = form.alpha ? form.alpha(p.x, p.y) : 1.0;
      const double bv = form.beta ? form.beta(p.x, p.y) : 1.0;
      check_finite(av, "alpha");
      check_finite(bv, "beta");
      wa += q.weight * av;
      wb += q.weight * bv;
      if (form.mu) {
        const double mv = form.mu(p.x, p.y);
        check_finite(mv, "mu");
        wm[static_cast<std::size_t>(k)] = q.weight * mv;
      }
      if (form.volume_load) {
        const double f = form.volume_load(static_cast<int>(t), p.x, p.y);
        check_finite(f, "volume load");
        for (int c = 0; c < 3; ++c) {
          load[static_cast<std::size_t>(c)] +=
              q.weight * f * shape[static_cast<std::size_t>(k)]
                              [static_cast<std::size_t>(c)];
        }
      }
      if (form.grad_load) {
        const Vec2 gv = form.grad_load(static_cast<int>(t), p.x, p.y);
        check_finite(gv.x, "grad load");
        check_finite(gv.y, "grad load");
        for (int c = 0; c < 3; ++c) {
          load[static_cast<std::size_t>(c)] +=
              q.weight * (gv.x * grads[static_cast<std::size_t>(c)].x +
                          gv.y * grads[static_cast<std::size_t>(c)].y);
        }
      }
    }

    std::array<int, 3> dof;
    for (int c = 0; c < 3; ++c) {
      dof[static_cast<std::size_t>(c)] =
          mesh.dof_of[static_cast<std::size_t>(tri[static_cast<std::size_t>(c)])];
    }
    for (int r = 0; r < 3; ++r) {
      const auto gr = grads[static_cast<std::size_t>(r)];
      for (int c = 0; c < 3; ++c) {
        const auto gc = grads[static_cast<std::size_t>(c)];
        double v = wa * gr.x * gc.x + wb * gr.y * gc.y;
        if (form.mu) {
          for (int k = 0; k < 3; ++k) {
            v += wm[static_cast<std::size_t>(k)] *
                 shape[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] *
                 shape[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
          }
        }
        rows[static_cast<std::size_t>(dof[static_cast<std::size_t>(r)])]
            .emplace_back(dof[static_cast<std::size_t>(c)], v);
      }
      rhs[static_cast<std::size_t>(dof[static_cast<std::size_t>(r)])] +=
          load[static_cast<std::size_t>(r)];
    }
  }

  // boundary line loads
  for (const EdgeLoad& el : form.edge_loads) {
    if (!el.density) continue;
    for (const auto& be : mesh.boundary_edges) {
      if (be.tag != el.tag) continue;
      const Vec2& a = mesh.vertices[static_cast<std::size_t>(be.v0)];
      const Vec2& b = mesh.vertices[static_cast<std::size_t>(be.v1)];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double jac = el.param == EdgeLoad::Param::ArcLength
                             ? std::sqrt(dx * dx + dy * dy)
                             : std::abs(dx);
      const int d0 = mesh.dof_of[static_cast<std::size_t>(be.v0)];
      const int d1 = mesh.dof_of[static_cast<std::size_t>(be.v1)];
      for (const double s : {kEdgeQ0, kEdgeQ1}) {
        const Vec2 p{a.x + s * dx, a.y + s * dy};
        const double f = el.density(a, b, p);
        check_finite(f, "edge load");
        const double w = 0.5 * jac * f;
        rhs[static_cast<std::size_t>(d0)] += w * (1.0 - s);
        rhs[static_cast<std::size_t>(d1)] += w * s;
      }
    }
  }

  SparseSystem sys;
  sys.mesh = &mesh;
  sys.gauge = gauge;
  sys.rhs = std::move(rhs);
  sys.matrix.n = n;
  sys.matrix.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  std::size_t nnz_total = 0;
  for (int r = 0; r < n; ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    std::sort(row.begin(), row.end(),
              [](const auto& l, const auto& rr) { return l.first < rr.first; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (w > 0 && row[w - 1].first == row[i].first) {
        row[w - 1].second += row[i].second;
      } else {
        row[w++] = row[i];
      }
    }
    row.resize(w);
    nnz_total += w;
    sys.matrix.row_ptr[static_cast<std::size_t>(r) + 1] =
        static_cast<int>(nnz_total);
  }
  sys.matrix.col.reserve(nnz_total);
  sys.matrix.val.reserve(nnz_total);
  for (int r = 0; r < n; ++r) {
    for (const auto& [c, v] : rows[static_cast<std::size_t>(r)]) {
      sys.matrix.col.push_back(c);
      sys.matrix.val.push_back(v);
    }
  }
  return sys;
}

ScalarField solve_spd(const SparseSystem& system, const SolveOptions& opts,
                      SolveStats* stats) {
  const CSRMatrix& A = system.matrix;
  const int n = A.n;
  std::vector<double> b = system.rhs;

  double bnorm2 = 0.0, bsum = 0.0;
  for (double v : b) {
    bnorm2 += v * v;
    bsum += v;
  }
  const double bnorm = std::sqrt(bnorm2);

  double compat = 0.0;
  if (system.gauge == Gauge::MeanZero) {
    compat = bnorm > 0.0 ? std::abs(bsum) / bnorm : 0.0;
    if (compat > opts.compat_tol) {
      throw Error(ErrorCode::IncompatibleRHS,
                  "pure-Neumann rhs incompatible: |sum rhs|/|rhs| = " +
                      std::to_string(compat));
    }
    const double shift = bsum / n;
    for (double& v : b) v -= shift;
  }

  ScalarField out = ScalarField::zeros(*system.mesh);
  if (stats) {
    stats->iterations = 0;
    stats->rel_residual = 0.0;
    stats->compat_measure = compat;
  }
  if (bnorm == 0.0) {
    return out;  // zero load, zero solution (after gauge, if any)
  }

  std::vector<double> diag(static_cast<std::size_t>(n), 1.0);
  for (int r = 0; r < n; ++r) {
    for (int idx = A.row_ptr[static_cast<std::size_t>(r)];
         idx < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++idx) {
      if (A.col[static_cast<std::size_t>(idx)] == r) {
        diag[static_cast<std::size_t>(r)] = A.val[static_cast<std::size_t>(idx)];
      }
    }
  }

  const int max_it = opts.max_iterations > 0
                         ? opts.max_iterations
                         : static_cast<int>(20.0 * std::sqrt(double(n))) + 50;

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> r = b;
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<double> p(static_cast<std::size_t>(n));
  std::vector<double> Ap(static_cast<std::size_t>(n));

  auto precondition = [&](const std::vector<double>& rin,
                          std::vector<double>& zout) {
    for (int i = 0; i < n; ++i) {
      zout[static_cast<std::size_t>(i)] =
          rin[static_cast<std::size_t>(i)] / diag[static_cast<std::size_t>(i)];
    }
    if (system.gauge == Gauge::MeanZero) {
      // keep the Krylov space orthogonal to the constant kernel
      double s = 0.0;
      for (double v : zout) s += v;
      s /= n;
      for (double& v : zout) v -= s;
    }
  };

  precondition(r, z);
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) {
    rz += r[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
  }

  double rel = 1.0;
  int it = 0;
  for (; it < max_it; ++it) {
    double rn2 = 0.0;
    for (double v : r) rn2 += v * v;
    rel = std::sqrt(rn2) / bnorm;
    if (rel <= opts.tol) break;

    A.apply(p, Ap);
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) {
      pAp += p[static_cast<std::size_t>(i)] * Ap[static_cast<std::size_t>(i)];
    }
    if (!(pAp > 0.0)) {
      throw Error(ErrorCode::NoConvergence,
                  "CG breakdown: non-positive curvature (system not PD?)");
    }
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
      r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
    }
    precondition(r, z);
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      rz_new += r[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) {
      p[static_cast<std::size_t>(i)] =
          z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
    }
  }
  if (rel > opts.tol) {
    throw Error(ErrorCode::NoConvergence,
                "CG did not reach tol " + std::to_string(opts.tol) + " in " +
                    std::to_string(max_it) +
                    " iterations (residual " + std::to_string(rel) + ")");
  }
  if (stats) {
    stats->iterations = it;
    stats->rel_residual = rel;
  }

  for (std::size_t v = 0; v < system.mesh->vertices.size(); ++v) {
    out.values[v] =
        x[static_cast<std::size_t>(system.mesh->dof_of[v])];
  }
  if (system.gauge == Gauge::MeanZero) {
    out.subtract_mean();
  }
  return out;
}

double integrate(const TriMesh& mesh, const TriDensityFn& density) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const TriQuadrature q = triangle_quadrature(mesh, static_cast<int>(t));
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = q.points[static_cast<std::size_t>(k)];
      s += q.weight * density(static_cast<int>(t), p.x, p.y);
    }
  }
  return s;
}

void write_matrix_market(const CSRMatrix& m, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.n << ' ' << m.n << ' ' << m.val.size() << '\n';
  os.precision(17);
  for (int r = 0; r < m.n; ++r) {
    for (int idx = m.row_ptr[static_cast<std::size_t>(r)];
         idx < m.row_ptr[static_cast<std::size_t>(r) + 1]; ++idx) {
      os << r + 1 << ' ' << m.col[static_cast<std::size_t>(idx)] + 1 << ' '
         << m.val[static_cast<std::size_t>(idx)] << '\n';
    }
  }
}

}  // namespace oscilla
