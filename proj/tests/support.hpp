#pragma once

// Shared test helpers: seeded generators and oracles that do not reuse the
// library's closed forms.

#include <cmath>
#include <numbers>
#include <random>

#include "satcycles/model.hpp"

namespace satcycles::oracle {

class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Params params(double slope = 3.0, double forcing = 5.0) {
    Params p;
    p.a = uniform(-slope, slope);
    p.b = uniform(-slope, slope);
    p.mu = uniform(-forcing, forcing);
    return p;
  }

  Params mixed_params() {
    Params p;
    p.a = -uniform(0.2, 3.0);
    p.b = uniform(0.2, 3.0);
    if (integer(0, 1)) {
      p.a = -p.a;
      p.b = -p.b;
    }
    p.mu = uniform(-4.0, 4.0);
    return p;
  }

 private:
  std::mt19937 rng_;
};

inline double field(const Params& p, double w) {
  // Written from the three branches, not through sat().
  if (w <= -1.0) return p.a * w + (p.a - p.b);
  if (w >= 1.0) return p.a * w + (p.b - p.a);
  return p.b * w;
}

/// Plain n-node trapezoid for int_0^{2 pi} f(x - mu cos t) dt.
inline double trapezoid_M(double x, double mu, const Params& p, int n = 4096) {
  const double h = 2.0 * std::numbers::pi / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += field(p, x - mu * std::cos(k * h));
  return s * h;
}

/// n uniform cells; every cell is cut where x - mu cos t crosses +-1 (located
/// by bisection) and each piece gets 2-point Gauss-Legendre.
inline double quadrature_M(double x, double mu, const Params& p, int n = 4096) {
  const double h = 2.0 * std::numbers::pi / n;
  const auto w = [&](double t) { return x - mu * std::cos(t); };
  const auto gauss = [&](double lo, double hi) {
    const double m = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    const double g = r / std::sqrt(3.0);
    return r * (field(p, w(m - g)) + field(p, w(m + g)));
  };
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    double lo = k * h;
    const double hi = (k + 1) * h;
    double cuts[2];
    int n_cuts = 0;
    for (const double level : {-1.0, 1.0}) {
      const double gl = w(lo) - level, gh = w(hi) - level;
      if ((gl < 0.0) == (gh < 0.0)) continue;
      double u = lo, v = hi, gu = gl;
      for (int i = 0; i < 80; ++i) {
        const double m = 0.5 * (u + v);
        const double gm = w(m) - level;
        if ((gm < 0.0) == (gu < 0.0)) { u = m; gu = gm; } else { v = m; }
      }
      cuts[n_cuts++] = 0.5 * (u + v);
    }
    if (n_cuts == 2 && cuts[0] > cuts[1]) std::swap(cuts[0], cuts[1]);
    for (int c = 0; c < n_cuts; ++c) {
      total += gauss(lo, cuts[c]);
      lo = cuts[c];
    }
    total += gauss(lo, hi);
  }
  return total;
}

}  // namespace satcycles::oracle
