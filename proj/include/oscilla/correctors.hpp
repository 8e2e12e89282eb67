#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscilla/cell_problems.hpp"
#include "oscilla/trig_poly.hpp"

namespace oscilla {

// Point evaluation of cell fields at strip locations. (phi, theta) maps to
// (y, z) = (phi/eps mod L, theta/eps); the containing triangle comes from
// lattice index arithmetic on the structured cell mesh, O(1) per query.
// Points that land above the piecewise-linear top but inside the true
// boundary (up to 1e-10 relative) are clamped into the top row; anything
// higher is OutOfDomain.
class CellEvaluator {
 public:
  CellEvaluator(const TriMesh& cell_mesh, const BoundaryProfile& profile);

  // same lattice lookup on a strip mesh (top boundary eps * g(phi/eps))
  static CellEvaluator on_strip(const TriMesh& strip_mesh,
                                const BoundaryProfile& profile);

  struct Sample {
    double value = 0.0;
    Vec2 grad;  // cell-coordinate gradient (d/dy, d/dz)
  };

  // triangle containing (y, z) after periodic wrap of y
  int locate(double y, double z) const;
  Sample eval(const ScalarField& u, double y, double z) const;
  Sample eval_strip_point(const ScalarField& u, double phi, double theta,
                          EpsilonValue eps) const;

  const TriMesh& mesh() const { return *mesh_; }

 private:
  CellEvaluator() = default;

  const TriMesh* mesh_ = nullptr;
  std::function<double(double)> true_top_;  // exact boundary height at x
  double hx_ = 0.0;
};

struct CorrectorSample {
  double value = 0.0;
  double dphi = 0.0;
  double dtheta = 0.0;
};

// Corrector truncations on the strip:
//   order 1:  W1 = w0 - eps X (dw0/dphi)
//   order 2:  W2 = W1 + eps^2 Theta (d2w0/dphi2)
// with chain-rule gradients (d/dphi of a cell field contributes 1/eps of
// its y-derivative, d/dtheta contributes 1/eps of its z-derivative):
//   d_phi W1 = w0' - X_y w0' - eps X w0''          d_theta W1 = -X_z w0'
//   d_phi W2 += eps Theta_y w0'' + eps^2 Theta w0'''
//   d_theta W2 += eps Theta_z w0''
class Truncation {
 public:
  Truncation(int order, const TrigPoly& w0, const CellSolution& cell,
             EpsilonValue eps, const BoundaryProfile& strip_profile);

  CorrectorSample at(double phi, double theta) const;
  int order() const { return order_; }

 private:
  int order_;
  EpsilonValue eps_;
  TrigPoly w0_, w0d1_, w0d2_, w0d3_;
  const CellSolution* cell_;
  CellEvaluator eval_;
};

enum class NormKind { L2, H1 };

// (value, d/dphi, d/dtheta) of an arbitrary integrand at a strip quadrature
// point inside the given triangle
using StripPointFn = std::function<CorrectorSample(int tri, const Vec2& p)>;

// Rescaled weighted norms over the strip mesh:
//   |||u|||_L2^2 = eps^-1 int u^2 cos(theta)
//   |||u|||_H1^2 = eps^-1 int ((d_theta u)^2 + (d_phi u)^2/cos^2 + u^2) cos
// computed with the shared triangle quadrature in ascending triangle order.
double norm_rescaled(const TriMesh& strip, NormKind kind,
                     const StripPointFn& f);

// common integrands
StripPointFn sample_field(const ScalarField& u);
StripPointFn sample_difference(const ScalarField& u, const Truncation& w);
// w0 viewed as a theta-independent field on the strip
StripPointFn sample_difference_1d(const ScalarField& u, const TrigPoly& w0);

// Per-cell scaling of cell functions carried to the strip. The strip holds
// 2*pi/(eps L) copies of the cell, each contributing eps^2 times the cell
// integral, so for F in {X, X_y, X_z, Theta, Theta_y, Theta_z}:
//   |F(./eps)|^2_{L2(R^eps, cos)} <= (2*pi/L) eps |F|^2_{L2(Y*)}.
// The check evaluates the left side by strip quadrature and allows the
// given relative slack.
struct ScalingReport {
  struct Row {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool ok = true;
  };
  std::vector<Row> rows;
  bool all_ok = true;
};

ScalingReport cell_scaling_check(const CellSolution& cell, EpsilonValue eps,
                                 const TriMesh& strip, double slack = 1e-2,
                                 bool throw_on_violation = true);

}  // namespace oscilla
