#include "oscilla/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oscilla {

TrigPoly::TrigPoly(double c0, std::vector<Mode> modes) : c0_(c0) {
  std::sort(modes.begin(), modes.end(),
            [](const Mode& l, const Mode& r) { return l.k < r.k; });
  for (const Mode& m : modes) {
    if (m.k < 1) {
      throw Error(ErrorCode::Config, "trig poly mode index k must be >= 1");
    }
    if (!modes_.empty() && modes_.back().k == m.k) {
      modes_.back().a += m.a;
      modes_.back().b += m.b;
    } else {
      modes_.push_back(m);
    }
  }
}

double TrigPoly::eval(double x) const {
  double v = c0_;
  for (const Mode& m : modes_) {
    v += m.a * std::cos(m.k * x) + m.b * std::sin(m.k * x);
  }
  return v;
}

TrigPoly TrigPoly::derivative(int order) const {
  if (order < 1 || order > 4) {
    throw Error(ErrorCode::Config, "derivative order must be in 1..4");
  }
  std::vector<Mode> out;
  out.reserve(modes_.size());
  for (const Mode& m : modes_) {
    double a = m.a, b = m.b;
    for (int i = 0; i < order; ++i) {
      // d/dx [a cos + b sin] = b k cos - a k sin
      const double na = b * m.k;
      const double nb = -a * m.k;
      a = na;
      b = nb;
    }
    out.push_back({m.k, a, b});
  }
  return TrigPoly(0.0, std::move(out));
}

double TrigPoly::max_abs(int samples) const {
  double v = 0.0;
  const double h = 2.0 * std::numbers::pi / samples;
  for (int i = 0; i < samples; ++i) {
    v = std::max(v, std::abs(eval(i * h)));
  }
  return v;
}

bool TrigPoly::operator==(const TrigPoly& o) const {
  if (c0_ != o.c0_ || modes_.size() != o.modes_.size()) return false;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].k != o.modes_[i].k || modes_[i].a != o.modes_[i].a ||
        modes_[i].b != o.modes_[i].b)
      return false;
  }
  return true;
}

TrigPoly solve_homogenized(double q0, const TrigPoly& f) {
  if (!(q0 > 0.0)) {
    throw Error(ErrorCode::NonPositiveQ0,
                "homogenized coefficient must be positive, got " +
                    std::to_string(q0));
  }
  std::vector<TrigPoly::Mode> out;
  out.reserve(f.modes().size());
  for (const TrigPoly::Mode& m : f.modes()) {
    const double d = 1.0 + q0 * static_cast<double>(m.k) * m.k;
    out.push_back({m.k, m.a / d, m.b / d});
  }
  return TrigPoly(f.c0(), std::move(out));
}

double residual_check(double q0, const TrigPoly& f, const TrigPoly& w0) {
  const TrigPoly w2 = w0.derivative(2);
  double r = 0.0;
  const int n = 1024;
  const double h = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    const double x = i * h;
    r = std::max(r, std::abs(-q0 * w2.eval(x) + w0.eval(x) - f.eval(x)));
  }
  return r;
}

}  // namespace oscilla
