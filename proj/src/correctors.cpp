#include "oscilla/correctors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oscilla {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTopTol = 1e-10;
}  // namespace

CellEvaluator::CellEvaluator(const TriMesh& cell_mesh,
                             const BoundaryProfile& profile) {
  if (cell_mesh.kind != TriMesh::Kind::Cell) {
    throw Error(ErrorCode::MeshMismatch, "CellEvaluator needs a cell mesh");
  }
  mesh_ = &cell_mesh;
  true_top_ = [&profile](double y) { return profile.eval(y); };
  hx_ = cell_mesh.period() / cell_mesh.nx;
}

CellEvaluator CellEvaluator::on_strip(const TriMesh& strip_mesh,
                                      const BoundaryProfile& profile) {
  if (strip_mesh.kind != TriMesh::Kind::Strip) {
    throw Error(ErrorCode::MeshMismatch, "on_strip needs a strip mesh");
  }
  CellEvaluator ev;
  ev.mesh_ = &strip_mesh;
  const int m = strip_mesh.eps.m();
  const double e = strip_mesh.eps.value();
  ev.true_top_ = [&profile, m, e](double phi) {
    return e * profile.eval(phi * m);
  };
  ev.hx_ = strip_mesh.period() / strip_mesh.nx;
  return ev;
}

int CellEvaluator::locate(double y, double z) const {
  const TriMesh& m = *mesh_;
  const double L = m.period();
  double yw = std::fmod(y, L);
  if (yw < 0.0) yw += L;

  int i = static_cast<int>(yw / hx_);
  i = std::min(std::max(i, 0), m.nx - 1);
  const double xi = std::min(std::max(yw / hx_ - i, 0.0), 1.0);
  const double ghat = (1.0 - xi) * m.top[static_cast<std::size_t>(i)] +
                      xi * m.top[static_cast<std::size_t>(i) + 1];

  double eta = z / ghat;
  if (z < 0.0) {
    if (z < -kTopTol) {
      throw Error(ErrorCode::OutOfDomain, "point below the cell bottom");
    }
    eta = 0.0;
  }
  if (eta >= 1.0) {
    // compare with the true boundary before rejecting: the PL top can dip
    // below it between mesh columns
    if (z > true_top_(yw) * (1.0 + kTopTol)) {
      throw Error(ErrorCode::OutOfDomain, "point above the domain top");
    }
    eta = std::nextafter(1.0, 0.0);
  }
  int j = static_cast<int>(eta * m.nz);
  j = std::min(std::max(j, 0), m.nz - 1);

  const int base = 2 * (i * m.nz + j);
  const Vec2 p{yw, z};
  if ((i + j) % 2 == 0) {
    // diagonal a-c
    const Vec2& a = m.vertices[static_cast<std::size_t>(m.vid(i, j))];
    const Vec2& c = m.vertices[static_cast<std::size_t>(m.vid(i + 1, j + 1))];
    const double s =
        (c.x - a.x) * (p.y - a.y) - (c.y - a.y) * (p.x - a.x);
    return s <= 0.0 ? base : base + 1;
  }
  // diagonal b-d
  const Vec2& b = m.vertices[static_cast<std::size_t>(m.vid(i + 1, j))];
  const Vec2& d = m.vertices[static_cast<std::size_t>(m.vid(i, j + 1))];
  const double s = (d.x - b.x) * (p.y - b.y) - (d.y - b.y) * (p.x - b.x);
  return s >= 0.0 ? base : base + 1;
}

CellEvaluator::Sample CellEvaluator::eval(const ScalarField& u, double y,
                                          double z) const {
  if (u.mesh != mesh_) {
    throw Error(ErrorCode::MeshMismatch,
                "field does not live on the evaluator's mesh");
  }
  const double L = mesh_->period();
  double yw = std::fmod(y, L);
  if (yw < 0.0) yw += L;
  const int tri = locate(yw, z);
  Sample s;
  s.value = u.value_at(tri, {yw, z});
  s.grad = u.gradient(tri);
  return s;
}

CellEvaluator::Sample CellEvaluator::eval_strip_point(const ScalarField& u,
                                                      double phi, double theta,
                                                      EpsilonValue eps) const {
  // phi/eps and theta/eps computed as exact integer multiples
  return eval(u, phi * eps.m(), theta * eps.m());
}

Truncation::Truncation(int order, const TrigPoly& w0, const CellSolution& cell,
                       EpsilonValue eps, const BoundaryProfile& strip_profile)
    : order_(order),
      eps_(eps),
      w0_(w0),
      w0d1_(w0.derivative(1)),
      w0d2_(w0.derivative(2)),
      w0d3_(w0.derivative(3)),
      cell_(&cell),
      eval_(*cell.mesh, cell.profile) {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::Config, "truncation order must be 1 or 2");
  }
  if (!(cell.profile == strip_profile)) {
    throw Error(ErrorCode::MeshMismatch,
                "cell solution profile differs from the strip profile");
  }
  if (order == 2 && !cell.theta.has_value()) {
    throw Error(ErrorCode::Config,
                "second-order truncation needs the Theta cell field");
  }
}

CorrectorSample Truncation::at(double phi, double theta) const {
  const double e = eps_.value();
  const double y = phi * eps_.m();
  const double z = theta * eps_.m();

  const CellEvaluator::Sample X = eval_.eval(cell_->X0, y, z);
  const double d0 = w0_.eval(phi);
  const double d1 = w0d1_.eval(phi);
  const double d2 = w0d2_.eval(phi);

  CorrectorSample s;
  s.value = d0 - e * X.value * d1;
  s.dphi = d1 - X.grad.x * d1 - e * X.value * d2;
  s.dtheta = -X.grad.y * d1;

  if (order_ == 2) {
    const CellEvaluator::Sample T = eval_.eval(*cell_->theta, y, z);
    const double d3 = w0d3_.eval(phi);
    s.value += e * e * T.value * d2;
    s.dphi += e * T.grad.x * d2 + e * e * T.value * d3;
    s.dtheta += e * T.grad.y * d2;
  }
  return s;
}

double norm_rescaled(const TriMesh& strip, NormKind kind,
                     const StripPointFn& f) {
  if (strip.kind != TriMesh::Kind::Strip) {
    throw Error(ErrorCode::MeshMismatch, "rescaled norms need a strip mesh");
  }
  const double inv_eps = static_cast<double>(strip.eps.m());
  double acc = 0.0;
  for (std::size_t t = 0; t < strip.triangles.size(); ++t) {
    const int tri = static_cast<int>(t);
    const TriQuadrature q = triangle_quadrature(strip, tri);
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = q.points[static_cast<std::size_t>(k)];
      const CorrectorSample s = f(tri, p);
      const double c = std::cos(p.y);
      double integrand = s.value * s.value * c;
      if (kind == NormKind::H1) {
        integrand += s.dtheta * s.dtheta * c + s.dphi * s.dphi / c;
      }
      acc += q.weight * integrand;
    }
  }
  return std::sqrt(inv_eps * acc);
}

StripPointFn sample_field(const ScalarField& u) {
  return [&u](int tri, const Vec2& p) {
    const Vec2 g = u.gradient(tri);
    return CorrectorSample{u.value_at(tri, p), g.x, g.y};
  };
}

StripPointFn sample_difference(const ScalarField& u, const Truncation& w) {
  return [&u, &w](int tri, const Vec2& p) {
    const Vec2 g = u.gradient(tri);
    const CorrectorSample t = w.at(p.x, p.y);
    return CorrectorSample{u.value_at(tri, p) - t.value, g.x - t.dphi,
                           g.y - t.dtheta};
  };
}

StripPointFn sample_difference_1d(const ScalarField& u, const TrigPoly& w0) {
  return [&u, &w0, d1 = w0.derivative(1)](int tri, const Vec2& p) {
    const Vec2 g = u.gradient(tri);
    return CorrectorSample{u.value_at(tri, p) - w0.eval(p.x),
                           g.x - d1.eval(p.x), g.y};
  };
}

ScalingReport cell_scaling_check(const CellSolution& cell, EpsilonValue eps,
                                 const TriMesh& strip, double slack,
                                 bool throw_on_violation) {
  const CellEvaluator eval(*cell.mesh, cell.profile);
  const double L = cell.profile.period();
  const double factor = (kTwoPi / L) * eps.value();

  struct Quantity {
    std::string name;
    const ScalarField* field;
    int component;  // 0 value, 1 d/dy, 2 d/dz
  };
  std::vector<Quantity> quantities = {
      {"X", &cell.X0, 0}, {"dX/dy", &cell.X0, 1}, {"dX/dz", &cell.X0, 2}};
  if (cell.theta.has_value()) {
    quantities.push_back({"Theta", &*cell.theta, 0});
    quantities.push_back({"dTheta/dy", &*cell.theta, 1});
    quantities.push_back({"dTheta/dz", &*cell.theta, 2});
  }

  ScalingReport report;
  const int m = eps.m();
  for (const Quantity& qt : quantities) {
    double cell_sq = 0.0;
    if (qt.component == 0) {
      cell_sq = l2_norm_sq(*qt.field);
    } else {
      const TriMesh& cm = *cell.mesh;
      for (std::size_t t = 0; t < cm.triangles.size(); ++t) {
        const Vec2 g = qt.field->gradient(static_cast<int>(t));
        const double v = qt.component == 1 ? g.x : g.y;
        cell_sq += cm.triangle_area(static_cast<int>(t)) * v * v;
      }
    }
    const double lhs =
        integrate(strip, [&](int, double phi, double theta) {
          const CellEvaluator::Sample s =
              eval.eval(*qt.field, phi * m, theta * m);
          const double v = qt.component == 0
                               ? s.value
                               : (qt.component == 1 ? s.grad.x : s.grad.y);
          return v * v * std::cos(theta);
        });
    ScalingReport::Row row;
    row.name = qt.name;
    row.lhs = lhs;
    row.rhs = factor * cell_sq * (1.0 + slack);
    row.ratio = row.rhs > 0.0 ? lhs / (factor * cell_sq) : 0.0;
    row.ok = lhs <= row.rhs || (lhs == 0.0 && row.rhs == 0.0);
    report.all_ok = report.all_ok && row.ok;
    report.rows.push_back(row);
  }

  if (!report.all_ok && throw_on_violation) {
    std::string offenders;
    for (const auto& r : report.rows) {
      if (!r.ok) offenders += (offenders.empty() ? "" : ", ") + r.name;
    }
    throw Error(ErrorCode::BoundViolated,
                "cell scaling bound violated for: " + offenders);
  }
  return report;
}

}  // namespace oscilla
