#pragma once

// Three-zonal periodic solutions of x' = f(x) + mu sin t + lambda described
// by their four zone-transition times t1 < t2 < t3 < t4 < t1 + 2 pi:
//
//   leaves x >= 1 downwards at t1, reaches -1 at t2, stays below -1 until
//   t3, climbs back through the inner zone to +1 at t4, and closes the
//   period in the upper zone.
//
// residual_direct evaluates the four transition conditions with the per-zone
// closed form; residual_3z is the equivalent exponential-trigonometric form
// written with g(t, s). Both vanish on the same crossing sequences.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "satcycles/error.hpp"
#include "satcycles/exactflow.hpp"
#include "satcycles/model.hpp"
#include "satcycles/poincare.hpp"

namespace satcycles {

struct CrossingSequence {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double lambda = 0.0;

  std::array<double, 4> times() const { return {t1, t2, t3, t4}; }
  bool ordered() const { return t1 < t2 && t2 < t3 && t3 < t4 && t4 < t1 + two_pi; }
};

using Residual4 = std::array<double, 4>;

inline double inf_norm(const Residual4& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

/// g(t, s) = (mu s (s sin t + cos t) + b (s^2 + 1)) / (s^2 + 1).
inline double g_aux(double t, double s, const Params& p) {
  const double s2 = s * s + 1.0;
  return (p.mu * s * (s * std::sin(t) + std::cos(t)) + p.b_eff() * s2) / s2;
}

inline Residual4 residual_3z(const Params& p, const CrossingSequence& cs) {
  const double a = p.a_eff();
  const double b = p.b_eff();
  const double lam = cs.lambda;
  const double pi = std::numbers::pi;
  const auto g = [&](double t, double s) { return g_aux(t, s, p); };
  return {
      std::exp(-b * cs.t1) * (g(cs.t1, b) + lam) + std::exp(-b * cs.t2) * (g(cs.t2 + pi, b) - lam),
      std::exp(-a * cs.t2) * (g(cs.t2 + pi, a) - lam) - std::exp(-a * cs.t3) * (g(cs.t3 + pi, a) - lam),
      std::exp(-b * cs.t3) * (g(cs.t3 + pi, b) - lam) + std::exp(-b * cs.t4) * (g(cs.t4, b) + lam),
      std::exp(-a * cs.t1) * (g(cs.t1, a) + lam) -
          std::exp(-a * (cs.t4 - two_pi)) * (g(cs.t4, a) + lam),
  };
}

/// [u(t2,t1,1)+1, u(t3,t2,-1)+1, u(t4,t3,-1)-1, u(t1+2pi,t4,1)-1].
inline Residual4 residual_direct(const Params& p, const CrossingSequence& cs) {
  Params q = p;
  q.lambda = cs.lambda;
  const auto leg = [&](Zone zone, double from, double x, double to) {
    return linear_zone_flow(zone_coeffs(q, zone), q.mu, from, x, to);
  };
  return {
      leg(Zone::inner, cs.t1, 1.0, cs.t2) + 1.0,
      leg(Zone::lower, cs.t2, -1.0, cs.t3) + 1.0,
      leg(Zone::inner, cs.t3, -1.0, cs.t4) - 1.0,
      leg(Zone::upper, cs.t4, 1.0, cs.t1 + two_pi) - 1.0,
  };
}

/// Crossing times of the cycle through x0 at t = 0, if it follows the
/// upper -> inner -> lower -> inner -> upper pattern once per period.
inline std::optional<CrossingSequence> extract_crossings(const Params& p, double x0,
                                                         const FlowOptions& opt = {}) {
  const Trajectory traj = advance(p, 0.0, x0, 2.0 * two_pi, opt);
  const auto& segs = traj.segments;
  for (std::size_t k = 0; k + 4 < segs.size(); ++k) {
    if (segs[k].zone != Zone::upper || segs[k + 1].zone != Zone::inner) continue;
    const double t1 = segs[k].t_end;
    if (t1 >= two_pi) break;
    if (segs[k + 2].zone != Zone::lower || segs[k + 3].zone != Zone::inner ||
        segs[k + 4].zone != Zone::upper) {
      return std::nullopt;
    }
    CrossingSequence cs{t1, segs[k + 1].t_end, segs[k + 2].t_end, segs[k + 3].t_end, p.lambda};
    if (!cs.ordered()) return std::nullopt;
    // exactly four transitions per period
    if (segs[k + 4].t_end < t1 + two_pi - 1e-9) return std::nullopt;
    return cs;
  }
  return std::nullopt;
}

struct NewtonOptions {
  double jacobian_step = 1e-7;
  double tolerance = 1e-10;  // residual infinity norm
  int max_iterations = 100;
  int max_halvings = 40;
  double collapse_gap = 1e-9;  // adjacent times closer than this: degenerate sequence
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton on residual_direct with a central-difference Jacobian.
inline CrossingSequence solve_crossing_system(const Params& p, const CrossingSequence& guess,
                                              const NewtonOptions& opt = {},
                                              NewtonReport* report = nullptr) {
  if (!guess.ordered()) throw Error(ErrorCode::order_violated, "initial guess is not ordered");
  using Vec4 = Eigen::Vector4d;
  const auto to_seq = [&](const Vec4& v) {
    return CrossingSequence{v[0], v[1], v[2], v[3], guess.lambda};
  };
  const auto eval = [&](const Vec4& v) {
    const Residual4 r = residual_direct(p, to_seq(v));
    return Vec4(r[0], r[1], r[2], r[3]);
  };

  Vec4 t(guess.t1, guess.t2, guess.t3, guess.t4);
  Vec4 r = eval(t);
  int it = 0;
  for (; r.lpNorm<Eigen::Infinity>() >= opt.tolerance; ++it) {
    if (it >= opt.max_iterations) {
      throw Error(ErrorCode::no_convergence,
                  "residual " + std::to_string(r.lpNorm<Eigen::Infinity>()) + " after " +
                      std::to_string(it) + " Newton iterations");
    }
    const double min_gap = std::min({t[1] - t[0], t[2] - t[1], t[3] - t[2], t[0] + two_pi - t[3]});
    if (min_gap < opt.collapse_gap) {
      // Iterates sliding onto a degenerate sequence: there is no nearby
      // three-zonal solution.
      throw Error(ErrorCode::no_convergence,
                  "crossing times collapsed at residual " + std::to_string(r.lpNorm<Eigen::Infinity>()));
    }
    Eigen::Matrix4d jac;
    for (int j = 0; j < 4; ++j) {
      Vec4 tp = t, tm = t;
      tp[j] += opt.jacobian_step;
      tm[j] -= opt.jacobian_step;
      jac.col(j) = (eval(tp) - eval(tm)) / (2.0 * opt.jacobian_step);
    }
    const Vec4 step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) throw Error(ErrorCode::no_convergence, "singular crossing Jacobian");

    bool any_ordered = false;
    bool accepted = false;
    double scale = 1.0;
    for (int h = 0; h <= opt.max_halvings; ++h, scale *= 0.5) {
      const Vec4 trial = t + scale * step;
      if (!to_seq(trial).ordered()) continue;
      any_ordered = true;
      const Vec4 rt = eval(trial);
      if (rt.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>()) {
        t = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!any_ordered) throw Error(ErrorCode::order_violated, "no damped step keeps t1 < t2 < t3 < t4");
    if (!accepted) {
      throw Error(ErrorCode::no_convergence,
                  "Newton stalled at residual " + std::to_string(r.lpNorm<Eigen::Infinity>()));
    }
  }

  // Normalise to t1 in [0, 2 pi).
  const double shift = two_pi * std::floor(t[0] / two_pi);
  if (shift != 0.0) t.array() -= shift;
  if (report) {
    report->iterations = it;
    report->residual = r.lpNorm<Eigen::Infinity>();
  }
  return to_seq(t);
}

// ---------------------------------------------------------------------------
// lambda(x): the bias that makes x a periodic initial condition.

struct LambdaOptions {
  double tolerance = 1e-10;  // |d(x; lambda)|
  int max_doublings = 60;
  FlowOptions flow;
};

/// The unique lambda with d(x; lambda) = 0; d is strictly increasing in lambda.
inline double lambda_of_x(const Params& p, double x, const LambdaOptions& opt = {}) {
  const auto d = [&](double lam) {
    Params q = p;
    q.lambda = lam;
    return displacement_d(q, x, opt.flow);
  };
  double bound = 10.0 * (1.0 + std::abs(p.a_eff()) + std::abs(p.b_eff()) + std::abs(p.mu));
  double lo = -bound, hi = bound;
  double d_lo = d(lo), d_hi = d(hi);
  for (int i = 0; !(d_lo <= 0.0 && d_hi >= 0.0); ++i) {
    if (i >= opt.max_doublings) {
      throw Error(ErrorCode::bracket_failed, "lambda bracket did not close after doubling");
    }
    bound *= 2.0;
    lo = -bound;
    hi = bound;
    d_lo = d(lo);
    d_hi = d(hi);
  }
  if (d_lo == 0.0) return lo;
  if (d_hi == 0.0) return hi;
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double dm = d(mid);
    if (std::abs(dm) < opt.tolerance * 1e-3 || dm == 0.0) break;
    if (dm < 0.0) lo = mid; else hi = mid;
  }
  if (!(std::abs(d(mid)) < opt.tolerance)) {
    throw Error(ErrorCode::no_convergence, "lambda bisection did not reach the tolerance");
  }
  return mid;
}

/// Local extrema of lambda(x) on [x_min, x_max]: parameter folds where the
/// lambda-perturbed equation has a nonhyperbolic cycle through x.
/// Bracketed by sign changes of the finite-difference slope of lambda and
/// refined on P'(x; lambda(x)) - 1, which has the sign of -lambda'(x).
inline std::vector<double> lambda_extrema(const Params& p, double x_min, double x_max, int n,
                                          const LambdaOptions& opt = {}) {
  std::vector<double> xs(static_cast<std::size_t>(n)), lam(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = x_min + (x_max - x_min) * i / (n - 1);
    lam[static_cast<std::size_t>(i)] = lambda_of_x(p, xs[static_cast<std::size_t>(i)], opt);
  }
  const auto slope_sign = [&](double x) {
    Params q = p;
    q.lambda = lambda_of_x(p, x, opt);
    return dP(q, x, opt.flow) - 1.0;
  };
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double left = lam[i] - lam[i - 1];
    const double right = lam[i + 1] - lam[i];
    if (left == 0.0 || right == 0.0 || (left < 0.0) == (right < 0.0)) continue;
    double lo = xs[i - 1], hi = xs[i + 1];
    double s_lo = slope_sign(lo);
    if ((s_lo < 0.0) == (slope_sign(hi) < 0.0)) {
      out.push_back(xs[i]);
      continue;
    }
    for (int k = 0; k < 60 && hi - lo > 1e-12; ++k) {
      const double mid = 0.5 * (lo + hi);
      const double sm = slope_sign(mid);
      if ((sm < 0.0) == (s_lo < 0.0)) {
        lo = mid;
        s_lo = sm;
      } else {
        hi = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace satcycles
