#pragma once

// Event-driven exact solution of the piecewise-linear equation. Inside a
// zone the equation is x' = p x + q + mu sin t and has a closed form; the
// trajectory is stitched together at the +-1 crossings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "satcycles/error.hpp"
#include "satcycles/model.hpp"

namespace satcycles {

struct ZoneCoeffs {
  double p = 0.0;  // slope
  double q = 0.0;  // constant term
};

inline ZoneCoeffs zone_coeffs(const Params& prm, Zone zone) {
  const double a = prm.a_eff();
  const double b = prm.b_eff();
  switch (zone) {
    case Zone::lower: return {a, (a - b) + prm.lambda};
    case Zone::inner: return {b, prm.lambda};
    case Zone::upper: return {a, (b - a) + prm.lambda};
  }
  return {};
}

inline constexpr double degenerate_slope = 1e-10;

/// Closed-form solution v(t, tau, x) of x' = p x + q + mu sin t.
inline double linear_zone_flow(ZoneCoeffs z, double mu, double tau, double x, double t) {
  const double dt = t - tau;
  if (std::abs(z.p) < degenerate_slope) {
    return x + z.q * dt + mu * (std::cos(tau) - std::cos(t));
  }
  const double growth = std::exp(z.p * dt);
  const double forced = mu * (growth * (z.p * std::sin(tau) + std::cos(tau)) -
                              (z.p * std::sin(t) + std::cos(t))) /
                        (z.p * z.p + 1.0);
  return growth * x + z.q * std::expm1(z.p * dt) / z.p + forced;
}

inline double linear_zone_rate(ZoneCoeffs z, double mu, double t, double v) {
  return z.p * v + z.q + mu * std::sin(t);
}

struct FlowOptions {
  int scan_per_period = 256;    // uniform scan samples per 2 pi before bisection
  double time_tol = 0.0;        // bisection width for crossing times; 0 bisects to adjacent doubles
  double tangency_rate = 1e-9;  // |v'| below this triggers the grazing probe
  double tangency_probe = 1e-9;
  std::size_t switch_cap = 10000;
};

namespace detail {

// Side of `level` (+1 above, -1 below) a solution sitting exactly on the
// level moves into. The rate and its time derivatives at the contact point
// do not depend on which adjacent zone's coefficients are used.
inline int departure_side(ZoneCoeffs z, double mu, double t, double level) {
  constexpr double tiny = 1e-12;
  const double d1 = linear_zone_rate(z, mu, t, level);
  if (std::abs(d1) > tiny) return d1 > 0.0 ? 1 : -1;
  const double d2 = z.p * d1 + mu * std::cos(t);
  if (std::abs(d2) > tiny) return d2 > 0.0 ? 1 : -1;
  const double d3 = z.p * d2 - mu * std::sin(t);
  return d3 >= 0.0 ? 1 : -1;
}

// Zone flow from (tau, x) with the tau-dependent factors hoisted out.
struct ZoneFlow {
  ZoneCoeffs z;
  double mu;
  double tau;
  double x;
  double forcing_at_tau;

  ZoneFlow(ZoneCoeffs zc, double mu_, double tau_, double x_)
      : z(zc), mu(mu_), tau(tau_), x(x_),
        forcing_at_tau(zc.p * std::sin(tau_) + std::cos(tau_)) {}

  double value(double t) const {
    if (std::abs(z.p) < degenerate_slope) return linear_zone_flow(z, mu, tau, x, t);
    const double dt = t - tau;
    const double growth = std::exp(z.p * dt);
    return growth * x + z.q * std::expm1(z.p * dt) / z.p +
           mu * (growth * forcing_at_tau - (z.p * std::sin(t) + std::cos(t))) / (z.p * z.p + 1.0);
  }
  double rate(double t, double v) const { return linear_zone_rate(z, mu, t, v); }
};

// First time in (tau, t_max] at which the zone flow started at (tau, x)
// crosses from `side` of `level` to the other side. Touching the level
// without changing side is not a crossing unless count_touch is set.
inline std::optional<double> first_exit(ZoneCoeffs z, double mu, double tau, double x,
                                        double level, int side, double t_max,
                                        const FlowOptions& opt, bool count_touch = false) {
  if (!(t_max > tau)) return std::nullopt;
  const ZoneFlow flow(z, mu, tau, x);
  struct Probe {
    double gap;   // > 0 on the starting side
    double rate;  // d(gap)/dt
  };
  const auto probe = [&](double s) {
    const double v = flow.value(s);
    return Probe{side * (v - level), side * flow.rate(s, v)};
  };
  const auto gap = [&](double s) { return side * (flow.value(s) - level); };
  // gap(lo) >= 0, gap(hi) < 0
  const auto bisect_gap = [&](double lo, double hi) {
    while (hi - lo > opt.time_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (gap(mid) < 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  // rate(lo) < 0, rate(hi) > 0
  const auto bisect_rate = [&](double lo, double hi) {
    while (hi - lo > opt.time_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (probe(mid).rate > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  const auto is_grazing = [&](double root) {
    if (std::abs(probe(root).rate) >= opt.tangency_rate) return false;
    return gap(root + opt.tangency_probe) >= 0.0;
  };
  constexpr double dip_floor = -1e-14;
  constexpr double touch_tol = 1e-12;

  const double step = two_pi / opt.scan_per_period;
  double s0 = tau;
  double rate0 = probe(s0).rate;
  while (s0 < t_max) {
    const double s1 = std::min(s0 + step, t_max);
    const Probe p1 = probe(s1);
    std::optional<double> root;
    std::optional<double> touch;
    if (p1.gap < 0.0) {
      root = bisect_gap(s0, s1);
    } else if (rate0 < 0.0 && p1.rate > 0.0) {
      const double s_min = bisect_rate(s0, s1);
      const double g_min = gap(s_min);
      if (g_min < dip_floor) root = bisect_gap(s0, s_min);
      else if (g_min <= touch_tol) touch = s_min;
    }
    if (root && !is_grazing(*root)) return std::min(*root, t_max);
    if (count_touch && (root || touch)) return std::min(root ? *root : *touch, t_max);
    s0 = s1;
    rate0 = p1.rate;
  }
  return std::nullopt;
}

}  // namespace detail

/// Smallest s in (tau, t_max] where the zone flow reaches `level`, if any.
/// A tangential touch counts here; advance() only switches zones on a
/// genuine change of side.
inline std::optional<double> first_crossing(ZoneCoeffs z, double mu, double tau, double x,
                                            double level, double t_max,
                                            const FlowOptions& opt = {}) {
  int side;
  if (x > level) side = 1;
  else if (x < level) side = -1;
  else side = detail::departure_side(z, mu, tau, level);
  return detail::first_exit(z, mu, tau, x, level, side, t_max, opt, true);
}

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  Zone zone = Zone::inner;
  double entry_state = 0.0;

  double length() const { return t_end - t_start; }
};

struct Trajectory {
  std::vector<Segment> segments;
  double a_in_measure = 0.0;       // time spent with |u| <= 1
  double a_in_half_measure = 0.0;  // same, restricted to [0, pi]
  double final_state = 0.0;

  double t_start() const { return segments.front().t_start; }
  double t_end() const { return segments.back().t_end; }
  std::size_t switch_count() const { return segments.size() - 1; }
};

namespace detail {

inline Zone initial_zone(const Params& prm, double tau, double x) {
  if (x != 1.0 && x != -1.0) return zone_of(x);
  const int side = departure_side(zone_coeffs(prm, Zone::inner), prm.mu, tau, x);
  if (x == 1.0) return side > 0 ? Zone::upper : Zone::inner;
  return side < 0 ? Zone::lower : Zone::inner;
}

inline double overlap(double lo, double hi, double a, double b) {
  return std::max(0.0, std::min(hi, b) - std::max(lo, a));
}

}  // namespace detail

/// Exact solution of the full equation from (tau, x) to t_end.
inline Trajectory advance(const Params& prm, double tau, double x, double t_end,
                          const FlowOptions& opt = {}) {
  Trajectory traj;
  Zone zone = detail::initial_zone(prm, tau, x);
  if (!(t_end > tau)) {
    traj.segments.push_back({tau, tau, zone, x});
    traj.final_state = x;
    return traj;
  }

  double t = tau;
  double v = x;
  for (;;) {
    const ZoneCoeffs z = zone_coeffs(prm, zone);
    std::optional<double> exit_time;
    double exit_level = 0.0;
    if (zone == Zone::inner) {
      const auto down = detail::first_exit(z, prm.mu, t, v, -1.0, 1, t_end, opt);
      const auto up = detail::first_exit(z, prm.mu, t, v, 1.0, -1, down.value_or(t_end), opt);
      if (up && (!down || *up <= *down)) {
        exit_time = up;
        exit_level = 1.0;
      } else if (down) {
        exit_time = down;
        exit_level = -1.0;
      }
    } else {
      exit_level = zone == Zone::upper ? 1.0 : -1.0;
      const int side = zone == Zone::upper ? 1 : -1;
      exit_time = detail::first_exit(z, prm.mu, t, v, exit_level, side, t_end, opt);
    }

    if (!exit_time) {
      traj.segments.push_back({t, t_end, zone, v});
      traj.final_state = linear_zone_flow(z, prm.mu, t, v, t_end);
      break;
    }
    traj.segments.push_back({t, *exit_time, zone, v});
    if (*exit_time >= t_end) {
      traj.final_state = exit_level;
      break;
    }
    if (traj.segments.size() > opt.switch_cap) {
      throw Error(ErrorCode::switch_cap,
                  "more than " + std::to_string(opt.switch_cap) + " zone switches");
    }
    zone = zone == Zone::inner ? zone_of(2.0 * exit_level) : Zone::inner;
    t = *exit_time;
    v = exit_level;
  }

  for (const auto& seg : traj.segments) {
    if (seg.zone != Zone::inner) continue;
    traj.a_in_measure += seg.length();
    traj.a_in_half_measure += detail::overlap(seg.t_start, seg.t_end, 0.0, std::numbers::pi);
  }
  return traj;
}

/// State of the trajectory at time t in [t_start, t_end].
inline double state_at(const Params& prm, const Trajectory& traj, double t) {
  auto it = std::upper_bound(traj.segments.begin(), traj.segments.end(), t,
                             [](double s, const Segment& seg) { return s < seg.t_end; });
  if (it == traj.segments.end()) it = std::prev(traj.segments.end());
  return linear_zone_flow(zone_coeffs(prm, it->zone), prm.mu, it->t_start, it->entry_state, t);
}

/// Fixed-step classical RK4 on the continuous right-hand side. Test oracle only.
inline double rk4_oracle(const Params& prm, double tau, double x, double t_end, double step) {
  const double span = t_end - tau;
  if (span <= 0.0) return x;
  const auto n = static_cast<long>(std::ceil(span / step));
  const double h = span / static_cast<double>(n);
  double v = x;
  for (long i = 0; i < n; ++i) {
    const double t = tau + static_cast<double>(i) * h;
    const double k1 = rhs(prm, t, v);
    const double k2 = rhs(prm, t + 0.5 * h, v + 0.5 * h * k1);
    const double k3 = rhs(prm, t + 0.5 * h, v + 0.5 * h * k2);
    const double k4 = rhs(prm, t + h, v + h * k3);
    v += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  }
  return v;
}

}  // namespace satcycles
