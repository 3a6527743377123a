#pragma once

// Poincare map, half-map, displacement and their exact derivatives, plus
// the global limit-cycle finder.
//
// P(x) = u(2 pi, 0, x), Q(x) = -u(pi, 0, x), d(x) = P(x) - x. With lambda = 0
// the field is odd, so Q o Q = P and the fixed points of Q are the
// symmetric cycles. Derivatives only need the time spent in |u| <= 1:
//
//   P'(x) = exp(2 pi a + (b - a) m(A_in)),  Q'(x) = -exp(pi a + (b - a) m(A_in & [0, pi])).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "satcycles/error.hpp"
#include "satcycles/exactflow.hpp"
#include "satcycles/model.hpp"

namespace satcycles {

enum class ZonalType { one_lower, one_inner, one_upper, two_zonal, three_zonal };
enum class Stability { attracting, repelling, nonhyperbolic };

inline const char* to_string(ZonalType t) {
  switch (t) {
    case ZonalType::one_lower: return "one_lower";
    case ZonalType::one_inner: return "one_inner";
    case ZonalType::one_upper: return "one_upper";
    case ZonalType::two_zonal: return "two_zonal";
    case ZonalType::three_zonal: return "three_zonal";
  }
  return "?";
}

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::attracting: return "attracting";
    case Stability::repelling: return "repelling";
    case Stability::nonhyperbolic: return "nonhyperbolic";
  }
  return "?";
}

struct CycleRecord {
  double x0 = 0.0;  // initial condition at t = 0
  ZonalType zonal_type = ZonalType::one_inner;
  double multiplier = 1.0;  // P'(x0)
  Stability stability = Stability::nonhyperbolic;
  bool symmetric = false;
};

enum class RegimeTag { global_center, center_no_cycles, unique_cycle, mixed_sign };

inline const char* to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::global_center: return "global_center";
    case RegimeTag::center_no_cycles: return "center_no_cycles";
    case RegimeTag::unique_cycle: return "unique_cycle";
    case RegimeTag::mixed_sign: return "mixed_sign";
  }
  return "?";
}

struct Regime {
  RegimeTag tag = RegimeTag::unique_cycle;
  std::string detail;
};

inline constexpr double default_hyperbolic_band = 1e-7;

inline Stability classify_stability(double multiplier, double band = default_hyperbolic_band) {
  if (multiplier < 1.0 - band) return Stability::attracting;
  if (multiplier > 1.0 + band) return Stability::repelling;
  return Stability::nonhyperbolic;
}

// ---------------------------------------------------------------------------
// Maps

inline double poincare_P(const Params& p, double x, const FlowOptions& opt = {}) {
  return advance(p, 0.0, x, two_pi, opt).final_state;
}

inline double half_Q(const Params& p, double x, const FlowOptions& opt = {}) {
  return -advance(p, 0.0, x, std::numbers::pi, opt).final_state;
}

inline double displacement_d(const Params& p, double x, const FlowOptions& opt = {}) {
  return poincare_P(p, x, opt) - x;
}

/// P' from the inner-zone measure of one period.
inline double multiplier_from_measure(const Params& p, double inner_measure) {
  const double a = p.a_eff();
  const double b = p.b_eff();
  return std::exp(two_pi * a + (b - a) * inner_measure);
}

inline double dP(const Params& p, double x, const FlowOptions& opt = {}) {
  return multiplier_from_measure(p, advance(p, 0.0, x, two_pi, opt).a_in_measure);
}

inline double dQ(const Params& p, double x, const FlowOptions& opt = {}) {
  const double a = p.a_eff();
  const double b = p.b_eff();
  const auto traj = advance(p, 0.0, x, std::numbers::pi, opt);
  return -std::exp(std::numbers::pi * a + (b - a) * traj.a_in_half_measure);
}

/// One period of the flow: P, P' and the trajectory they came from.
struct MapSample {
  double x = 0.0;
  double P = 0.0;
  double dP = 1.0;
  Trajectory trajectory;

  double d() const { return P - x; }
  double d_prime() const { return dP - 1.0; }
};

inline MapSample sample_map(const Params& p, double x, const FlowOptions& opt = {}) {
  MapSample s;
  s.x = x;
  s.trajectory = advance(p, 0.0, x, two_pi, opt);
  s.P = s.trajectory.final_state;
  s.dP = multiplier_from_measure(p, s.trajectory.a_in_measure);
  return s;
}

// ---------------------------------------------------------------------------
// Regimes and analytic cycles

/// Classification by the signs of the effective slopes (a, b) and |mu|.
inline Regime classify_regime(const Params& p) {
  const double a = p.a_eff();
  const double b = p.b_eff();
  if (a == 0.0 && b == 0.0) {
    return {RegimeTag::global_center, "x' = mu sin t: every solution is periodic"};
  }
  if (a * b < 0.0) {
    return {RegimeTag::mixed_sign, "ab < 0: one to five cycles depending on mu"};
  }
  if (b == 0.0 && std::abs(p.mu) < 1.0) {
    return {RegimeTag::center_no_cycles, "b = 0, |mu| < 1: a band of periodic solutions, no limit cycles"};
  }
  return {RegimeTag::unique_cycle,
          b < 0.0 ? "unique symmetric cycle, globally attracting"
                  : "unique symmetric cycle, repelling"};
}

inline bool is_center(const Regime& r) {
  return r.tag == RegimeTag::global_center || r.tag == RegimeTag::center_no_cycles;
}

/// min{-b sqrt(a^2 + 1) / a, sqrt(b^2 + 1)}: up to this |mu| a mixed-sign
/// equation has exactly three one-zonal cycles.
inline double three_cycle_bound(const Params& p) {
  const double a = p.a_eff();
  const double b = p.b_eff();
  if (!(a * b < 0.0)) throw Error(ErrorCode::bad_regime, "three-cycle bound needs ab < 0");
  return std::min(-b * std::sqrt(a * a + 1.0) / a, std::sqrt(b * b + 1.0));
}

/// The linear periodic solution of each zone that stays inside its zone.
/// For a zone with slope p and constant q it is
///   v(t) = -q/p - mu (cos t + p sin t) / (p^2 + 1),
/// which oscillates with amplitude |mu| / sqrt(p^2 + 1) about -q/p.
inline std::vector<CycleRecord> analytic_one_zone_cycles(const Params& prm) {
  constexpr double slack = 1e-12;
  std::vector<CycleRecord> out;
  const auto try_zone = [&](Zone zone) {
    const ZoneCoeffs z = zone_coeffs(prm, zone);
    if (std::abs(z.p) < degenerate_slope) return;
    const double centre = -z.q / z.p;
    const double amplitude = std::abs(prm.mu) / std::sqrt(z.p * z.p + 1.0);
    bool inside = false;
    switch (zone) {
      case Zone::upper: inside = centre - amplitude >= 1.0 - slack; break;
      case Zone::lower: inside = centre + amplitude <= -1.0 + slack; break;
      case Zone::inner: inside = std::abs(centre) + amplitude <= 1.0 + slack; break;
    }
    if (!inside) return;
    CycleRecord rec;
    rec.x0 = centre - prm.mu / (z.p * z.p + 1.0);
    rec.multiplier = std::exp(two_pi * z.p);
    rec.stability = classify_stability(rec.multiplier);
    rec.zonal_type = zone == Zone::upper   ? ZonalType::one_upper
                     : zone == Zone::lower ? ZonalType::one_lower
                                           : ZonalType::one_inner;
    rec.symmetric = zone == Zone::inner && prm.lambda == 0.0;
    out.push_back(rec);
  };
  try_zone(Zone::upper);
  try_zone(Zone::lower);
  try_zone(Zone::inner);
  return out;
}

// ---------------------------------------------------------------------------
// Global cycle finder

struct CycleSearchOptions {
  int grid = 4096;
  double root_tol = 1e-11;
  double dedup_tol = 1e-7;
  double hyperbolic_band = default_hyperbolic_band;
  bool check_refinement = true;  // compare root counts on grid and 2*grid
  FlowOptions flow;
};

/// Half-width of the x window that contains every cycle.
inline double search_bound(const Params& p) {
  constexpr double slope_floor = 1e-6;
  const double a = p.a_eff();
  const double b = p.b_eff();
  const double equilibrium =
      std::abs(a) >= slope_floor ? std::abs(1.0 - b / a) + std::abs(p.lambda) / std::abs(a) : 1.0;
  return equilibrium + std::abs(p.mu) * (1.0 + 1.0 / std::max(std::abs(a), slope_floor)) + 1.0;
}

/// Zones visited with positive duration over the recorded window.
inline ZonalType zonal_type_of(const Trajectory& traj, double min_length = 1e-9) {
  bool seen[3] = {false, false, false};
  for (const auto& seg : traj.segments) {
    if (seg.length() > min_length || traj.segments.size() == 1) {
      seen[static_cast<int>(seg.zone)] = true;
    }
  }
  const int n = int(seen[0]) + int(seen[1]) + int(seen[2]);
  if (n == 3) return ZonalType::three_zonal;
  if (n == 2) return ZonalType::two_zonal;
  if (seen[0]) return ZonalType::one_lower;
  if (seen[2]) return ZonalType::one_upper;
  return ZonalType::one_inner;
}

namespace detail {

// Bisection on a function with f(lo) and f(hi) of opposite strict signs.
template <class F>
double bisect_root(F&& f, double lo, double hi, double f_lo, double tol) {
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// A few Newton steps on d using the exact derivative, kept inside [lo, hi]
// and accepted only while |d| decreases.
inline double polish_root(const Params& p, double x, double lo, double hi, const FlowOptions& opt) {
  MapSample s = sample_map(p, x, opt);
  for (int i = 0; i < 4; ++i) {
    if (s.d() == 0.0 || s.d_prime() == 0.0) break;
    const double next = x - s.d() / s.d_prime();
    if (!(next >= lo && next <= hi)) break;
    MapSample trial = sample_map(p, next, opt);
    if (!(std::abs(trial.d()) < std::abs(s.d()))) break;
    x = next;
    s = std::move(trial);
  }
  return x;
}

inline double find_symmetric_root(const Params& p, double bound, const CycleSearchOptions& opt) {
  const auto g = [&](double x) { return half_Q(p, x, opt.flow) - x; };
  double lo = -bound, hi = bound;
  double g_lo = g(lo), g_hi = g(hi);
  for (int i = 0; i < 60 && !(g_lo > 0.0 && g_hi < 0.0); ++i) {
    lo *= 2.0;
    hi *= 2.0;
    g_lo = g(lo);
    g_hi = g(hi);
  }
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  if (!(g_lo > 0.0 && g_hi < 0.0)) {
    throw Error(ErrorCode::bracket_failed, "half-map fixed point not bracketed");
  }
  // Bisect to full precision: |d| = |P'| |dx| can be large for repelling cycles.
  return bisect_root(g, lo, hi, g_lo, 0.0);
}

// Roots of d on a uniform grid of n points over [-bound, bound]. Cells
// without a sign change are split at an interior extremum of d (located
// from the sign of d' = P' - 1) so close root pairs are not skipped.
inline std::vector<double> scan_displacement(const Params& p, double bound, int n,
                                             const CycleSearchOptions& opt) {
  constexpr double double_root_floor = 1e-13;
  std::vector<MapSample> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = -bound + 2.0 * bound * i / (n - 1);
    grid.push_back(sample_map(p, x, opt.flow));
  }
  const auto d = [&](double x) { return displacement_d(p, x, opt.flow); };
  const auto d_prime = [&](double x) { return dP(p, x, opt.flow) - 1.0; };

  std::vector<double> roots;
  const auto refine = [&](double lo, double hi, double d_lo) {
    const double r = bisect_root(d, lo, hi, d_lo, opt.root_tol);
    roots.push_back(polish_root(p, r, lo, hi, opt.flow));
  };
  for (int i = 0; i + 1 < n; ++i) {
    const MapSample& l = grid[static_cast<std::size_t>(i)];
    const MapSample& r = grid[static_cast<std::size_t>(i) + 1];
    const double dl = l.d(), dr = r.d();
    if (dl == 0.0) {
      roots.push_back(l.x);
      continue;
    }
    if ((dl < 0.0) != (dr < 0.0) && dr != 0.0) {
      refine(l.x, r.x, dl);
      continue;
    }
    if (dr == 0.0) continue;  // picked up as the left end of the next cell
    // Extremum pointing towards zero: d' changes sign against the sign of d.
    const double sl = l.d_prime(), sr = r.d_prime();
    const bool towards_zero = dl > 0.0 ? (sl < 0.0 && sr > 0.0) : (sl > 0.0 && sr < 0.0);
    if (!towards_zero) continue;
    const double xe = bisect_root(d_prime, l.x, r.x, sl, opt.root_tol);
    const double de = d(xe);
    if (std::abs(de) <= double_root_floor) {
      roots.push_back(xe);
    } else if ((de < 0.0) != (dl < 0.0)) {
      refine(l.x, xe, dl);
      refine(xe, r.x, de);
    }
  }
  if (!grid.empty() && grid.back().d() == 0.0) roots.push_back(grid.back().x);
  return roots;
}

inline std::vector<double> merge_roots(std::vector<double> roots, double tol) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || r - out.back() > tol) out.push_back(r);
  }
  return out;
}

}  // namespace detail

/// Classify a known fixed point of P.
inline CycleRecord make_cycle_record(const Params& p, double x0, bool symmetric,
                                     const CycleSearchOptions& opt = {}) {
  const MapSample s = sample_map(p, x0, opt.flow);
  CycleRecord rec;
  rec.x0 = x0;
  rec.zonal_type = zonal_type_of(s.trajectory);
  rec.multiplier = s.dP;
  rec.stability = classify_stability(s.dP, opt.hyperbolic_band);
  rec.symmetric = symmetric;
  return rec;
}

/// All limit cycles, sorted by x0. The symmetric cycle (lambda = 0) comes
/// from the strictly decreasing half-map; the rest from sign changes of d.
inline std::vector<CycleRecord> find_all_cycles(const Params& p, const CycleSearchOptions& opt = {}) {
  if (!p.finite()) throw Error(ErrorCode::bad_regime, "non-finite parameters");
  const Regime regime = classify_regime(p);
  const bool symmetric_field = p.lambda == 0.0;
  if (symmetric_field && is_center(regime)) {
    throw Error(ErrorCode::center_regime, std::string(to_string(regime.tag)) + ": " + regime.detail);
  }
  if (p.a_eff() == 0.0 && p.b_eff() == 0.0) return {};  // d = 2 pi lambda != 0

  const double bound = search_bound(p);
  std::optional<double> symmetric_root;
  if (symmetric_field) symmetric_root = detail::find_symmetric_root(p, bound, opt);

  const auto collect = [&](int n) {
    auto roots = detail::scan_displacement(p, bound, n, opt);
    if (symmetric_root) roots.push_back(*symmetric_root);
    return detail::merge_roots(std::move(roots), opt.dedup_tol);
  };
  const auto roots = collect(opt.grid);
  if (opt.check_refinement) {
    const auto finer = collect(2 * opt.grid - 1);
    if (finer.size() != roots.size()) {
      throw Error(ErrorCode::count_unstable, "grid " + std::to_string(opt.grid) + " finds " +
                                                 std::to_string(roots.size()) + " cycles, grid " +
                                                 std::to_string(2 * opt.grid - 1) + " finds " +
                                                 std::to_string(finer.size()));
    }
  }

  std::vector<CycleRecord> cycles;
  for (double r : roots) {
    const bool is_sym = symmetric_root && std::abs(r - *symmetric_root) <= opt.dedup_tol;
    cycles.push_back(make_cycle_record(p, is_sym ? *symmetric_root : r, is_sym, opt));
  }
  return cycles;
}

}  // namespace satcycles
