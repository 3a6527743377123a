// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "satcycles/satcycles.hpp"
#include "support.hpp"

using namespace satcycles;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Params kStd{-1.0, 1.0, 0.0};

std::vector<double> melnikov_zeros(double mu) {
  std::vector<double> zeros;
  const double w = 3.0 + mu;
  const int n = 20001;
  const auto M = [&](double x) { return M_orig(x, mu, kStd); };
  double x0 = -w, m0 = M(x0);
  for (int i = 1; i < n; ++i) {
    const double x1 = -w + 2 * w * i / (n - 1);
    const double m1 = M(x1);
    if ((m0 < 0) != (m1 < 0)) {
      double lo = x0, hi = x1, mlo = m0;
      for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double mm = M(mid);
        if ((mm < 0) == (mlo < 0)) { lo = mid; mlo = mm; } else { hi = mid; }
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    m0 = m1;
  }
  return zeros;
}

double scale(double v) { return std::max(1.0, std::abs(v)); }

Outcome criterion_1() {
  Outcome o;
  std::ostringstream out, err;
  cli::CommonOptions opt;
  opt.params = kStd;
  o.check(cli::cmd_bifvalues(opt, out, err) == 0, "bifvalues failed");
  const BifValues v = bif_values(kStd);
  o.check(std::abs(v.c - pi / 2) < 1e-12, "c");
  o.check(std::abs(v.mu1 - 1.5707963) < 1e-7, "mu1 " + fmt("%.10f", v.mu1));
  o.check(std::abs(v.mu2 - 1.4142136) < 1e-7, "mu2 " + fmt("%.10f", v.mu2));
  o.check(std::abs(v.x1 - 1.0) < 1e-7, "x1 " + fmt("%.10f", v.x1));
  o.check(out.str().find("mu1: 1.57079632679") != std::string::npos, "report text");
  o.detail = o.pass ? "c=" + fmt("%.9f", v.c) + " mu1=" + fmt("%.9f", v.mu1) + " mu2=" + fmt("%.9f", v.mu2) +
                          " x1=" + fmt("%.9f", v.x1)
                    : o.detail;
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const int c1 = count_simple_zeros(1.0, kStd), c2 = count_simple_zeros(1.5, kStd),
            c3 = count_simple_zeros(2.0, kStd);
  o.check(c1 == 3 && c2 == 5 && c3 == 1, "counts");
  o.detail = (o.pass ? "" : o.detail + " ") + "counts " + std::to_string(c1) + "/" + std::to_string(c2) + "/" +
             std::to_string(c3);
  return o;
}

Outcome criterion_3() {
  Outcome o;
  cli::CommonOptions opt;
  opt.params = kStd;
  const auto rows = cli::scan_rows(opt, cli::ScanOptions{1.0, 2.0, 3, {0.05}});
  const int want[3] = {3, 5, 1};
  double worst = 0.0;
  std::string counts;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    counts += (k ? "/" : "") + std::to_string(r.cycle_count);
    o.check(r.cycle_count == want[k], "count at mu=" + fmt("%g", r.mu));
    const auto zeros = melnikov_zeros(r.mu);
    o.check(zeros.size() == r.cycle_initials.size(), "zero count at mu=" + fmt("%g", r.mu));
    for (std::size_t i = 0; i < std::min(zeros.size(), r.cycle_initials.size()); ++i) {
      worst = std::max(worst, std::abs(zeros[i] - r.cycle_initials[i]));
    }
  }
  o.check(worst <= 0.1, "distance " + fmt("%.3g", worst));
  if (o.pass) o.detail = "counts " + counts + ", max |x0 - Melnikov zero| = " + fmt("%.4f", worst);
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const auto cyc = find_all_cycles({-1.0, 1.0, 1.2});
  o.check(cyc.size() == 3, "count " + std::to_string(cyc.size()));
  if (cyc.size() == 3) {
    const double want[3] = {-2.6, -0.6, 1.4};
    const Stability st[3] = {Stability::attracting, Stability::repelling, Stability::attracting};
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, std::abs(cyc[static_cast<std::size_t>(k)].x0 - want[k]));
      o.check(cyc[static_cast<std::size_t>(k)].stability == st[k], "stability");
    }
    o.check(worst < 1e-6, "x0 error " + fmt("%.3g", worst));
    if (o.pass) o.detail = "x0 {-2.6, -0.6, 1.4} to " + fmt("%.1e", worst) + ", {attracting, repelling, attracting}";
  }
  return o;
}

Outcome criterion_5() {
  Outcome o;
  double worst = 0.0;
  for (const double mu : {0.5, 1.0, 7.0}) {
    const Params p{0.0, 0.0, mu};
    for (int k = 0; k < 100; ++k) worst = std::max(worst, std::abs(displacement_d(p, -5.0 + 10.0 * k / 99)));
  }
  o.check(worst < 1e-10, "global center |d| " + fmt("%.3g", worst));
  const Params band{2.0, 0.0, 0.5};
  o.check(classify_regime(band).tag == RegimeTag::center_no_cycles, "band regime");
  bool refused = false;
  try {
    find_all_cycles(band);
  } catch (const Error& e) {
    refused = e.code() == ErrorCode::center_regime;
  }
  o.check(refused, "center not refused");
  double band_worst = 0.0;
  for (int k = 0; k <= 100; ++k) band_worst = std::max(band_worst, std::abs(displacement_d(band, -1.0 + k / 100.0)));
  o.check(band_worst < 1e-10, "band |d| " + fmt("%.3g", band_worst));
  const auto one = find_all_cycles({-1.0, -2.0, 5.0});
  o.check(one.size() == 1 && one[0].stability == Stability::attracting, "unique attracting cycle");
  if (o.pass) {
    o.detail = "max|d| center " + fmt("%.1e", worst) + ", band " + fmt("%.1e", band_worst) +
               ", (-1,-2,5) one attracting cycle";
  }
  return o;
}

Outcome criterion_6() {
  Outcome o;
  const double m = M_shift(1.0, pi / 2, kStd), mx = Mx(1.0, pi / 2, kStd), mp = Mx(0.0, std::sqrt(2.0), kStd);
  o.check(std::abs(m) < 1e-9, "M(1, pi/2)");
  o.check(std::abs(mx) < 1e-9, "Mx(1, pi/2)");
  o.check(std::abs(mp) < 1e-9, "Mx(0, sqrt 2)");
  if (o.pass) {
    o.detail = "|M|=" + fmt("%.1e", std::abs(m)) + " |Mx|=" + fmt("%.1e", std::abs(mx)) +
               " |Mx(0,mu2)|=" + fmt("%.1e", std::abs(mp));
  }
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const double m = M_shift(1.0, 2.0, kStd);
  const double q = oracle::quadrature_M(1.0, 2.0, kStd, 4096);
  o.check(std::abs(m - (2 * pi - 8)) < 1e-9, "closed form " + fmt("%.15g", m));
  o.check(std::abs(m - q) < 1e-8, "quadrature " + fmt("%.3g", std::abs(m - q)));
  if (o.pass) o.detail = "M(1,2)=" + fmt("%.12f", m) + ", |M - quad| = " + fmt("%.1e", std::abs(m - q));
  return o;
}

Outcome criterion_8() {
  Outcome o;
  oracle::Gen g(2024);
  // flow semigroup and RK4 oracle
  double semi = 0.0, oracle = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Params p = g.params();
    const double x = g.uniform(-5, 5);
    const double tau = g.uniform(0, 2 * pi), s = tau + g.uniform(0, 2 * pi), t = s + g.uniform(0, 2 * pi);
    const double direct = advance(p, tau, x, t).final_state;
    const double split = advance(p, s, advance(p, tau, x, s).final_state, t).final_state;
    semi = std::max(semi, std::abs(direct - split) / scale(direct));
    const double exact = advance(p, 0.0, x, 2 * pi).final_state;
    oracle = std::max(oracle, std::abs(exact - rk4_oracle(p, 0.0, x, 2 * pi, 1e-4)) / scale(exact));
  }
  o.check(semi < 1e-8, "semigroup " + fmt("%.3g", semi));
  o.check(oracle < 1e-6, "rk4 " + fmt("%.3g", oracle));
  // half-map
  const Params q{-1.0, 1.0, 1.5};
  double qq = 0.0;
  bool decreasing = true;
  double prev_q = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = -5.0 + 10.0 * i / 49;
    const double P = poincare_P(q, x);
    const double Q = half_Q(q, x);
    qq = std::max(qq, std::abs(half_Q(q, Q) - P) / scale(P));
    if (i && !(Q < prev_q)) decreasing = false;
    prev_q = Q;
  }
  o.check(qq < 1e-8, "QoQ " + fmt("%.3g", qq));
  o.check(decreasing, "Q not decreasing");
  // dP
  double dp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Params p = g.params(1.5, 5.0);
    const double x = g.uniform(-5, 5), h = 1e-5;
    const double fd = (poincare_P(p, x + h) - poincare_P(p, x - h)) / (2 * h);
    dp = std::max(dp, std::abs(dP(p, x) - fd) / std::abs(fd));
  }
  o.check(dp < 1e-4, "dP rel " + fmt("%.3g", dp));
  // Melnikov symmetries and identity
  double sym = 0.0, ident = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Params p = g.params();
    const double x = g.uniform(-4, 4), mu = g.uniform(-4, 4);
    const double m = M_shift(x, mu, p);
    sym = std::max({sym, std::abs(M_shift(-x, mu, p) + m), std::abs(M_shift(x, -mu, p) - m)});
    ident = std::max(ident, std::abs(consistency_identity(x, mu, p)));
  }
  o.check(sym < 1e-12, "M symmetry " + fmt("%.3g", sym));
  o.check(ident < 1e-9, "identity " + fmt("%.3g", ident));
  // crossing residuals
  const Params small{-0.05, 0.05, 1.5};
  double res = 0.0;
  int three = 0;
  for (const auto& c : find_all_cycles(small)) {
    if (c.zonal_type != ZonalType::three_zonal) continue;
    ++three;
    const auto cs = extract_crossings(small, c.x0);
    o.check(cs.has_value(), "crossing pattern");
    if (cs) res = std::max(res, inf_norm(residual_direct(small, *cs)));
  }
  o.check(three > 0, "no three-zonal cycle");
  o.check(res < 1e-8, "residual_direct " + fmt("%.3g", res));
  if (o.pass) {
    o.detail = "semigroup " + fmt("%.1e", semi) + ", rk4 " + fmt("%.1e", oracle) + ", QoQ " + fmt("%.1e", qq) +
               ", dP " + fmt("%.1e", dp) + ", sym " + fmt("%.1e", sym) + ", identity " + fmt("%.1e", ident) +
               ", residual " + fmt("%.1e", res);
  }
  return o;
}

Outcome criterion_9() {
  Outcome o;
  const ZeroSetBranch br = zero_set_branch(kStd, 400);
  std::size_t top = 0;
  for (std::size_t k = 1; k < br.samples.size(); ++k) {
    if (br.samples[k].second > br.samples[top].second) top = k;
  }
  bool unimodal = true;
  for (std::size_t k = 1; k < br.samples.size(); ++k) {
    const bool rising = br.samples[k].second > br.samples[k - 1].second;
    if ((k <= top) != rising) unimodal = false;
  }
  const double dx = 2.0 / 399;
  o.check(unimodal, "not unimodal");
  o.check(std::abs(br.samples[top].first - 1.0) <= dx, "argmax " + fmt("%.4f", br.samples[top].first));
  o.check(std::abs(br.samples[top].second - pi / 2) <= 1e-4, "max " + fmt("%.6f", br.samples[top].second));
  const double phi0 = phi(1e-9, kStd), phi2 = phi(2.0, kStd);
  o.check(std::abs(phi0 - std::sqrt(2.0)) < 1e-6, "phi(0+) " + fmt("%.9f", phi0));
  o.check(std::abs(br.samples.front().second - std::sqrt(2.0)) < 1e-6, "phi(0)");
  o.check(std::abs(phi2 - 1.0) < 1e-6, "phi(2) " + fmt("%.9f", phi2));
  if (o.pass) {
    o.detail = "max at (" + fmt("%.4f", br.samples[top].first) + ", " + fmt("%.8f", br.samples[top].second) +
               "), phi(0+)=" + fmt("%.8f", phi0) + ", phi(2)=" + fmt("%.8f", phi2);
  }
  return o;
}

Outcome criterion_10() {
  Outcome o;
  double worst = 0.0;
  std::size_t rows = 0;
  const struct {
    Params p;
    double x0;
  } cases[] = {{{-1.0, 1.0, 1.2}, 1.4}, {{-1.0, 1.0, 1.2}, -0.6}, {{-1.0, -2.0, 5.0}, -1.6515372211879},
               {{-0.05, 0.05, 1.5}, -1.49902779102}, {{-1.0, 1.0, 0.0}, 2.0}};
  for (const auto& c : cases) {
    cli::CommonOptions opt;
    opt.params = c.p;
    std::ostringstream out, err;
    o.check(cli::cmd_orbit3d(opt, c.x0, 1000, out, err) == 0, "orbit3d failed");
    const CsvTable t = parse_csv(out.str());
    for (const auto& r : t.rows) {
      const double y = std::stod(r[2]), z = std::stod(r[3]);
      worst = std::max(worst, std::abs(y * y + z * z - c.p.mu * c.p.mu));
      ++rows;
    }
  }
  o.check(worst < 1e-12, "cylinder " + fmt("%.3g", worst));
  if (o.pass) o.detail = std::to_string(rows) + " rows, max |y^2+z^2-mu^2| = " + fmt("%.1e", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 bifurcation constants", criterion_1},
      {"2 Melnikov zero counts 3/5/1", criterion_2},
      {"3 flow counts at eps=0.05 vs Melnikov zeros", criterion_3},
      {"4 three one-zonal cycles at mu=1.2", criterion_4},
      {"5 regimes: centers and unique cycle", criterion_5},
      {"6 fold and pitchfork signatures", criterion_6},
      {"7 M(1,2) = 2pi - 8 and quadrature", criterion_7},
      {"8 property suites", criterion_8},
      {"9 zero-set branch geometry", criterion_9},
      {"10 orbit3d on the invariant cylinder", criterion_10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
