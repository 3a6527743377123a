#pragma once

// Parameter state and the piecewise-linear field of
//
//     x' = eps * f(x) + lambda + mu * sin t,
//     f(x) = a x + (b - a) sat(x).
//
// eps = 1, lambda = 0 is the base equation. Every other module reads the
// effective slopes through Params::a_eff()/b_eff().

#include <cmath>
#include <numbers>
#include <utility>

namespace satcycles {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Sign { neg, zero, pos };

inline Sign sign_of(double v) {
  if (v < 0.0) return Sign::neg;
  if (v > 0.0) return Sign::pos;
  return Sign::zero;
}

struct Params {
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double eps = 1.0;
  double lambda = 0.0;

  double a_eff() const { return eps * a; }
  double b_eff() const { return eps * b; }

  // sign(a*b) of the effective slopes; derived on demand.
  Sign product_sign() const { return sign_of(a_eff() * b_eff()); }

  bool finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(mu) && std::isfinite(eps) &&
           std::isfinite(lambda);
  }

  friend bool operator==(const Params&, const Params&) = default;
};

enum class Zone { lower, inner, upper };

inline const char* to_string(Zone z) {
  switch (z) {
    case Zone::lower: return "lower";
    case Zone::inner: return "inner";
    case Zone::upper: return "upper";
  }
  return "?";
}

// |x| = 1 belongs to the inner zone.
inline Zone zone_of(double x) {
  if (x > 1.0) return Zone::upper;
  if (x < -1.0) return Zone::lower;
  return Zone::inner;
}

inline double sat(double x) {
  if (std::abs(x) < 1.0) return x;
  return x > 0.0 ? 1.0 : -1.0;
}

/// The unscaled field f(x) for slopes (a, b). Odd and continuous at +-1.
inline double f_eval(const Params& p, double x) {
  if (x <= -1.0) return p.a * x + (p.a - p.b);
  if (x >= 1.0) return p.a * x + (p.b - p.a);
  return p.b * x;
}

/// Right-hand side of the full equation, including eps, lambda and forcing.
inline double rhs(const Params& p, double t, double x) {
  return p.eps * f_eval(p, x) + p.lambda + p.mu * std::sin(t);
}

// Symmetries of the equation.
//  phase_shifted: t -> t + pi, which maps mu -> -mu.
//  time_reversed: t -> -t, which maps (a, b, lambda) -> (-a, -b, -lambda).
struct SymmetryTransform {
  bool time_reversed = false;
  bool phase_shifted = false;

  friend bool operator==(const SymmetryTransform&, const SymmetryTransform&) = default;
};

inline Params apply(const SymmetryTransform& tr, Params p) {
  if (tr.phase_shifted) p.mu = -p.mu;
  if (tr.time_reversed) {
    p.a = -p.a;
    p.b = -p.b;
    p.lambda = -p.lambda;
  }
  return p;
}

/// Canonical representative with mu >= 0.
inline std::pair<Params, SymmetryTransform> symmetry_reduce(const Params& p) {
  SymmetryTransform tr;
  if (p.mu < 0.0) tr.phase_shifted = true;
  return {apply(tr, p), tr};
}

}  // namespace satcycles
