#pragma once

#include <cstdint>
#include <vector>

#include "oscilla/errors.hpp"

namespace oscilla {

// L-periodic oscillation profile g(y) = a0 + sum_k c_k cos(2*pi*k*y/L) +
// s_k sin(2*pi*k*y/L), with L = 2*pi/a for an integer divisor a >= 1.
// Trigonometric polynomials keep g, g' and the mean exact, so the geometric
// compatibility integrals below carry no quadrature error.
//
// A profile is only usable after validate(): 0 < g and max g < pi/2.
class BoundaryProfile {
 public:
  struct Mode {
    int k = 1;       // harmonic index relative to the period L
    double c = 0.0;  // cosine amplitude
    double s = 0.0;  // sine amplitude
  };

  BoundaryProfile() = default;
  BoundaryProfile(double a0, std::vector<Mode> modes, int period_divisor);

  // Checks the raw coefficients and caches g1 = max g and g_min = min g.
  // Throws NonPositiveProfile, TooTall or BadPeriod.
  static BoundaryProfile validated(double a0, std::vector<Mode> modes,
                                   int period_divisor);

  double eval(double y) const;
  double eval_deriv(double y) const;
  double eval_deriv2(double y) const;

  double a0() const { return a0_; }
  const std::vector<Mode>& modes() const { return modes_; }
  int period_divisor() const { return a_; }
  double period() const;         // L = 2*pi/a
  double mean() const { return a0_; }  // (1/L) * integral of g, exact

  bool is_validated() const { return validated_; }
  double g1() const;     // cached max of g (requires validation)
  double g_min() const;  // cached min of g

  bool is_constant() const;

  bool operator==(const BoundaryProfile& other) const;

 private:
  void require_validated() const;

  double a0_ = 1.0;
  std::vector<Mode> modes_;
  int a_ = 1;
  bool validated_ = false;
  double g1_ = 0.0;
  double gmin_ = 0.0;
};

// eps = 1/m. Together with L = 2*pi/a this puts exactly a*m oscillation
// cells across the strip, so the discrete domain is exactly 2*pi-periodic.
class EpsilonValue {
 public:
  EpsilonValue() = default;
  explicit EpsilonValue(int m);

  int m() const { return m_; }
  double value() const { return 1.0 / static_cast<double>(m_); }

  bool operator==(const EpsilonValue& o) const { return m_ == o.m_; }

 private:
  int m_ = 1;
};

}  // namespace oscilla
