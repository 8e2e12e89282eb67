#pragma once

#include <vector>

#include "oscilla/errors.hpp"

namespace oscilla {

// Real trigonometric polynomial on (0, 2*pi):
//   p(x) = c0 + sum_k a_k cos(k x) + b_k sin(k x).
// Houses the forcing f and the homogenized solution w0; derivatives are
// term-by-term exact, which keeps the corrector machinery free of 1D
// discretization error.
class TrigPoly {
 public:
  struct Mode {
    int k = 1;
    double a = 0.0;  // cosine coefficient
    double b = 0.0;  // sine coefficient
  };

  TrigPoly() = default;
  TrigPoly(double c0, std::vector<Mode> modes);

  static TrigPoly constant(double c) { return TrigPoly(c, {}); }

  double eval(double x) const;
  double c0() const { return c0_; }
  const std::vector<Mode>& modes() const { return modes_; }

  // exact derivative of the given order (1..4)
  TrigPoly derivative(int order) const;

  // max |p| over a dense sample; exact enough for tolerances relative to it
  double max_abs(int samples = 2048) const;

  bool operator==(const TrigPoly& o) const;

 private:
  double c0_ = 0.0;
  std::vector<Mode> modes_;  // sorted by k, unique
};

// Unique 2*pi-periodic solution of  -q0 w0'' + w0 = f  computed mode by
// mode: each (a_k, b_k) is divided by 1 + q0 k^2. Throws NonPositiveQ0.
TrigPoly solve_homogenized(double q0, const TrigPoly& f);

// max over 1024 sample points of |-q0 w0'' + w0 - f|
double residual_check(double q0, const TrigPoly& f, const TrigPoly& w0);

}  // namespace oscilla
