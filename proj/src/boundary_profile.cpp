#include "oscilla/boundary_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oscilla {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSamplesPerPeriod = 4096;
constexpr double kExtremumTol = 1e-10;
}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveProfile: return "NonPositiveProfile";
    case ErrorCode::TooTall: return "TooTall";
    case ErrorCode::BadPeriod: return "BadPeriod";
    case ErrorCode::Config: return "Config";
    case ErrorCode::NonPositiveQ0: return "NonPositiveQ0";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::DegenerateMesh: return "DegenerateMesh";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::NonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IncompatibleRHS: return "IncompatibleRHS";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::NonDecreasingError: return "NonDecreasingError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

BoundaryProfile::BoundaryProfile(double a0, std::vector<Mode> modes,
                                 int period_divisor)
    : a0_(a0), modes_(std::move(modes)), a_(period_divisor) {}

double BoundaryProfile::period() const { return kTwoPi / a_; }

double BoundaryProfile::eval(double y) const {
  // base frequency 2*pi/L = a
  const double w = static_cast<double>(a_) * y;
  double v = a0_;
  for (const Mode& m : modes_) {
    v += m.c * std::cos(m.k * w) + m.s * std::sin(m.k * w);
  }
  return v;
}

double BoundaryProfile::eval_deriv(double y) const {
  const double w = static_cast<double>(a_) * y;
  double v = 0.0;
  for (const Mode& m : modes_) {
    const double kw = static_cast<double>(m.k) * static_cast<double>(a_);
    v += -m.c * kw * std::sin(m.k * w) + m.s * kw * std::cos(m.k * w);
  }
  return v;
}

double BoundaryProfile::eval_deriv2(double y) const {
  const double w = static_cast<double>(a_) * y;
  double v = 0.0;
  for (const Mode& m : modes_) {
    const double kw = static_cast<double>(m.k) * static_cast<double>(a_);
    v += -(m.c * std::cos(m.k * w) + m.s * std::sin(m.k * w)) * kw * kw;
  }
  return v;
}

bool BoundaryProfile::is_constant() const {
  return std::all_of(modes_.begin(), modes_.end(),
                     [](const Mode& m) { return m.c == 0.0 && m.s == 0.0; });
}

BoundaryProfile BoundaryProfile::validated(double a0, std::vector<Mode> modes,
                                           int period_divisor) {
  if (period_divisor < 1) {
    throw Error(ErrorCode::BadPeriod,
                "profile period divisor a must be a positive integer, got " +
                    std::to_string(period_divisor));
  }
  for (const Mode& m : modes) {
    if (m.k < 1) {
      throw Error(ErrorCode::BadPeriod,
                  "profile mode index k must be >= 1, got " +
                      std::to_string(m.k));
    }
  }
  BoundaryProfile p(a0, std::move(modes), period_divisor);

  // Dense sampling plus Newton refinement on g' sign changes. For
  // bandlimited g with 4096 samples per period this certifies the extrema
  // to ~1e-10.
  const double L = p.period();
  const double h = L / kSamplesPerPeriod;
  double gmax = -1e300;
  double gmin = 1e300;
  auto consider = [&](double y) {
    const double v = p.eval(y);
    gmax = std::max(gmax, v);
    gmin = std::min(gmin, v);
  };
  double prev_d = p.eval_deriv(0.0);
  consider(0.0);
  for (int i = 1; i <= kSamplesPerPeriod; ++i) {
    const double y = i * h;
    consider(y);
    const double d = p.eval_deriv(y);
    if (prev_d == 0.0 || d == 0.0 || (prev_d > 0.0) != (d > 0.0)) {
      // refine the g' root in [y-h, y] with Newton started at the midpoint,
      // falling back to bisection when Newton leaves the bracket
      double lo = y - h, hi = y, root = y - 0.5 * h;
      for (int it = 0; it < 60; ++it) {
        const double dr = p.eval_deriv(root);
        const double d2r = p.eval_deriv2(root);
        double next = root;
        if (d2r != 0.0) next = root - dr / d2r;
        if (!(next > lo && next < hi)) {
          if (dr == 0.0) break;
          if ((dr > 0.0) == (p.eval_deriv(lo) > 0.0)) lo = root; else hi = root;
          next = 0.5 * (lo + hi);
        }
        if (std::abs(next - root) < kExtremumTol) { root = next; break; }
        root = next;
      }
      consider(root);
    }
    prev_d = d;
  }

  if (!(gmin > 0.0)) {
    throw Error(ErrorCode::NonPositiveProfile,
                "profile must stay strictly positive; min g = " +
                    std::to_string(gmin));
  }
  if (!(gmax < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::TooTall, "profile max g1 = " + std::to_string(gmax) +
                                        " must be below pi/2");
  }
  p.g1_ = gmax;
  p.gmin_ = gmin;
  p.validated_ = true;
  return p;
}

void BoundaryProfile::require_validated() const {
  if (!validated_) {
    throw Error(ErrorCode::Config, "profile used before validation");
  }
}

double BoundaryProfile::g1() const {
  require_validated();
  return g1_;
}

double BoundaryProfile::g_min() const {
  require_validated();
  return gmin_;
}

bool BoundaryProfile::operator==(const BoundaryProfile& o) const {
  if (a0_ != o.a0_ || a_ != o.a_ || modes_.size() != o.modes_.size())
    return false;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].k != o.modes_[i].k || modes_[i].c != o.modes_[i].c ||
        modes_[i].s != o.modes_[i].s)
      return false;
  }
  return true;
}

EpsilonValue::EpsilonValue(int m) : m_(m) {
  if (m < 1) {
    throw Error(ErrorCode::Config,
                "epsilon denominator m must be a positive integer, got " +
                    std::to_string(m));
  }
}

}  // namespace oscilla
