#pragma once

// First-order averaging (Melnikov) function of x' = eps f(x) + mu sin t:
//
//   M_orig(x, mu) = int_0^{2 pi} f(mu (1 - cos t) + x) dt
//   M(x, mu)      = M_orig(x - mu, mu) = int_0^{2 pi} f(x - mu cos t) dt
//
// M is integrated exactly over the zone partition of w(t) = x - mu cos t.
// For ab < 0 its zero set is the axis x = 0 plus one branch mu = phi(x) on
// [0, 1 - b/a] and its mirror images; phi rises from mu2 at x = 0 to its
// maximum mu1 at x1 and falls to -b/a at x = 1 - b/a.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "satcycles/error.hpp"
#include "satcycles/model.hpp"

namespace satcycles {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
};

inline double total_length(const std::vector<Interval>& v) {
  double s = 0.0;
  for (const auto& i : v) s += i.length();
  return s;
}

/// Zone partition of [0, 2 pi] for w(t) = x - mu cos t.
struct ZonePartition {
  std::vector<Interval> inner_intervals;  // |w| <= 1
  std::vector<Interval> upper_intervals;  // w >= 1
  std::vector<Interval> lower_intervals;  // w <= -1

  double inner_measure() const { return total_length(inner_intervals); }
  double upper_measure() const { return total_length(upper_intervals); }
  double lower_measure() const { return total_length(lower_intervals); }

  int zones_visited() const {
    return int(!inner_intervals.empty()) + int(!upper_intervals.empty()) +
           int(!lower_intervals.empty());
  }
  bool one_zonal() const { return zones_visited() == 1; }
};

inline constexpr double arccos_guard = 1e-14;

inline ZonePartition partition(double x, double mu) {
  ZonePartition out;
  const auto bucket = [&](Zone z) -> std::vector<Interval>& {
    return z == Zone::upper ? out.upper_intervals
           : z == Zone::lower ? out.lower_intervals
                              : out.inner_intervals;
  };
  if (mu == 0.0) {
    bucket(zone_of(x)).push_back({0.0, two_pi});
    return out;
  }

  std::vector<double> cuts{0.0, two_pi};
  for (const double level : {1.0, -1.0}) {
    const double c = (x - level) / mu;
    if (std::abs(c) > 1.0 + arccos_guard) continue;
    const double theta = std::acos(std::clamp(c, -1.0, 1.0));
    cuts.push_back(theta);
    cuts.push_back(two_pi - theta);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double w = x - mu * std::cos(0.5 * (lo + hi));
    auto& dst = bucket(zone_of(w));
    if (!dst.empty() && dst.back().hi == lo) {
      dst.back().hi = hi;
    } else {
      dst.push_back({lo, hi});
    }
  }
  return out;
}

namespace detail {

inline double sin_span(const Interval& i) { return std::sin(i.hi) - std::sin(i.lo); }

}  // namespace detail

/// M(x, mu) = int_0^{2 pi} f(x - mu cos t) dt, exact.
inline double M_shift(double x, double mu, const Params& p) {
  if (mu == 0.0) return two_pi * f_eval(p, x);
  const ZonePartition part = partition(x, mu);
  if (part.one_zonal()) return two_pi * f_eval(p, x);
  // Each interval contributes slope * (x len - mu (sin hi - sin lo)) + offset * len.
  const auto piece = [&](const std::vector<Interval>& v, double slope, double offset) {
    double s = 0.0;
    for (const auto& i : v) s += slope * (x * i.length() - mu * detail::sin_span(i)) + offset * i.length();
    return s;
  };
  return piece(part.inner_intervals, p.b, 0.0) + piece(part.upper_intervals, p.a, p.b - p.a) +
         piece(part.lower_intervals, p.a, p.a - p.b);
}

inline double M_orig(double x, double mu, const Params& p) { return M_shift(x + mu, mu, p); }

inline double Mx(double x, double mu, const Params& p) {
  return two_pi * p.a - (p.a - p.b) * partition(x, mu).inner_measure();
}

inline double Mmu(double x, double mu, const Params& p) {
  double s = 0.0;
  for (const auto& i : partition(x, mu).inner_intervals) s += detail::sin_span(i);
  return (p.a - p.b) * s;
}

/// M - [x Mx + mu Mmu - (a - b)(m(A+) - m(A-))]; vanishes identically.
inline double consistency_identity(double x, double mu, const Params& p) {
  const ZonePartition part = partition(x, mu);
  const double rebuilt = x * Mx(x, mu, p) + mu * Mmu(x, mu, p) -
                         (p.a - p.b) * (part.upper_measure() - part.lower_measure());
  return M_shift(x, mu, p) - rebuilt;
}

// ---------------------------------------------------------------------------
// Bifurcation constants and the zero set

struct BifValues {
  double c = 0.0;    // pi b / (b - a), in (0, pi)
  double mu1 = 0.0;  // fold: c / sin c
  double mu2 = 0.0;  // pitchfork: 1 / cos(c / 2)
  double x1 = 0.0;   // fold abscissa: 1 - mu1 cos c
};

inline void require_mixed_sign(const Params& p) {
  if (!(p.a * p.b < 0.0)) throw Error(ErrorCode::bad_regime, "needs ab < 0");
}

inline BifValues bif_values(const Params& p) {
  require_mixed_sign(p);
  BifValues v;
  v.c = std::numbers::pi * p.b / (p.b - p.a);
  v.mu1 = v.c / std::sin(v.c);
  v.mu2 = 1.0 / std::cos(0.5 * v.c);
  v.x1 = 1.0 - v.mu1 * std::cos(v.c);
  if (!(v.c > 0.0 && v.c < std::numbers::pi) || !(v.mu2 < v.mu1) ||
      !(v.mu1 * std::cos(v.c) > p.b / p.a)) {
    throw Error(ErrorCode::bad_regime, "bifurcation constants violate 0 < c < pi, mu2 < mu1");
  }
  return v;
}

/// Right end of the branch domain, where the one-zonal zero sits.
inline double branch_end(const Params& p) { return 1.0 - p.b / p.a; }

/// The unique mu > 0 with M(x, mu) = 0 for x in [0, 1 - b/a].
inline double phi(double x, const Params& p) {
  require_mixed_sign(p);
  const double end = branch_end(p);
  if (x < 0.0 || x > end) {
    throw Error(ErrorCode::bad_regime, "phi is defined on [0, 1 - b/a]");
  }
  const BifValues bv = bif_values(p);
  if (x == 0.0) return bv.mu2;
  if (x == end) return -p.b / p.a;

  double lo = 0.0, hi = 2.0 * bv.mu1;
  double m_lo = M_shift(x, lo, p);
  const double m_hi = M_shift(x, hi, p);
  if (!((m_lo < 0.0) != (m_hi < 0.0)) || m_lo == 0.0 || m_hi == 0.0) {
    throw Error(ErrorCode::bracket_failed, "M(x, .) has no sign change on (0, 2 mu1]");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double mm = M_shift(x, mid, p);
    if (mm == 0.0) return mid;
    if ((mm < 0.0) == (m_lo < 0.0)) {
      lo = mid;
      m_lo = mm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline constexpr double bifurcation_exclusion = 1e-9;

/// Number of simple zeros of x -> M(x, mu): 3 below mu2, 5 between mu2 and
/// mu1, 1 above mu1.
inline int count_simple_zeros(double mu, const Params& p, int cells = 2000) {
  require_mixed_sign(p);
  const BifValues bv = bif_values(p);
  const double amu = std::abs(mu);
  if (std::abs(amu - bv.mu1) <= bifurcation_exclusion ||
      std::abs(amu - bv.mu2) <= bifurcation_exclusion) {
    throw Error(ErrorCode::at_bifurcation, "mu at a fold or pitchfork value");
  }
  const double half = branch_end(p) + 1.0;
  const double h = 2.0 * half / cells;
  const auto M = [&](double x) { return M_shift(x, mu, p); };
  const auto dM = [&](double x) { return Mx(x, mu, p); };

  // Cell centres: symmetric about 0, never exactly on it.
  std::vector<double> xs(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) xs[static_cast<std::size_t>(i)] = -half + (i + 0.5) * h;

  int count = 0;
  double prev_x = xs.front();
  double prev = M(prev_x);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x = xs[i];
    const double cur = M(x);
    if (cur == 0.0) continue;
    if (prev == 0.0) {
      prev = cur;
      prev_x = x;
      continue;
    }
    if ((cur < 0.0) != (prev < 0.0)) {
      ++count;
    } else {
      // A pair of zeros inside one cell shows up as an extremum of M that
      // crosses zero; locate it from the sign change of Mx.
      const double sl = dM(prev_x), sr = dM(x);
      const bool towards_zero = prev > 0.0 ? (sl < 0.0 && sr > 0.0) : (sl > 0.0 && sr < 0.0);
      if (towards_zero) {
        double lo = prev_x, hi = x;
        for (int k = 0; k < 100; ++k) {
          const double mid = 0.5 * (lo + hi);
          if ((dM(mid) < 0.0) == (sl < 0.0)) lo = mid; else hi = mid;
        }
        const double extremum = M(0.5 * (lo + hi));
        if (extremum != 0.0 && (extremum < 0.0) != (prev < 0.0)) count += 2;
      }
    }
    prev = cur;
    prev_x = x;
  }
  return count;
}

/// Sampled branch mu = phi(x) on [0, 1 - b/a].
struct ZeroSetBranch {
  std::vector<std::pair<double, double>> samples;  // (x, phi(x))
  BifValues bif;
};

inline ZeroSetBranch zero_set_branch(const Params& p, int n_samples) {
  require_mixed_sign(p);
  ZeroSetBranch br;
  br.bif = bif_values(p);
  const double end = branch_end(p);
  const int n = std::max(n_samples, 2);
  br.samples.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? end : end * i / (n - 1);
    br.samples.emplace_back(x, phi(x, p));
  }
  return br;
}

struct Polyline {
  int branch_id = 0;
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, mu)
};

/// Zero set of M as plot-ready polylines:
///   0 the axis x = 0, 1 the first-quadrant piece Z1 (branch phi followed by
///   the one-zonal segment x = 1 - b/a, 0 <= mu <= -b/a), 2..4 its images
///   under S1 (x -> -x), S2 (mu -> -mu) and S2 o S1.
inline std::vector<Polyline> zero_set(const Params& p, int n_samples) {
  const ZeroSetBranch br = zero_set_branch(p, n_samples);
  const double end = branch_end(p);
  const double seg_top = -p.b / p.a;
  const double mu_top = 1.25 * std::max({br.bif.mu1, br.bif.mu2, seg_top});

  std::vector<Polyline> out;
  const int n = std::max(n_samples, 2);

  Polyline axis{0, "axis", {}};
  for (int i = 0; i < n; ++i) axis.points.emplace_back(0.0, -mu_top + 2.0 * mu_top * i / (n - 1));
  out.push_back(std::move(axis));

  Polyline z1{1, "Z1", br.samples};
  const int seg_n = std::max(n / 4, 2);
  for (int i = 1; i < seg_n; ++i) {
    z1.points.emplace_back(end, seg_top * (1.0 - static_cast<double>(i) / (seg_n - 1)));
  }

  const auto image = [&](int id, const char* label, double sx, double smu) {
    Polyline l{id, label, {}};
    l.points.reserve(z1.points.size());
    for (const auto& [x, mu] : z1.points) l.points.emplace_back(sx * x, smu * mu);
    return l;
  };
  out.push_back(z1);
  out.push_back(image(2, "S1(Z1)", -1.0, 1.0));
  out.push_back(image(3, "S2(Z1)", 1.0, -1.0));
  out.push_back(image(4, "S2(S1(Z1))", -1.0, -1.0));
  return out;
}

}  // namespace satcycles
