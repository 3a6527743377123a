#pragma once

// Subcommand bodies of the satcycles CLI. Each takes parsed options and two
// streams and returns the process exit code, so tests can drive them
// without spawning a process.
//
// Exit codes: 0 success, 2 analytic-regime refusal, 3 numeric
// non-convergence, 4 I/O.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "satcycles/crossings.hpp"
#include "satcycles/csv.hpp"
#include "satcycles/error.hpp"
#include "satcycles/exactflow.hpp"
#include "satcycles/melnikov.hpp"
#include "satcycles/model.hpp"
#include "satcycles/poincare.hpp"

namespace satcycles::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_regime = 2;
inline constexpr int exit_numeric = 3;
inline constexpr int exit_io = 4;

inline constexpr const char* version = "1.0.0";

struct CommonOptions {
  Params params;
  std::string out;  // CSV destination; empty means the primary stream
  double tol_root = 1e-11;
  double tol_residual = 1e-10;
  int grid = 4096;
  int threads = 0;  // 0: hardware concurrency

  CycleSearchOptions search() const {
    CycleSearchOptions s;
    s.grid = grid;
    s.root_tol = tol_root;
    return s;
  }
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::center_regime:
    case ErrorCode::bad_regime:
    case ErrorCode::at_bifurcation:
      return exit_regime;
    case ErrorCode::io_failure:
      return exit_io;
    default:
      return exit_numeric;
  }
}

/// Runs a command body, turning library errors into exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

inline std::vector<std::string> metadata(const CommonOptions& o, const std::string& command) {
  return {
      " satcycles " + std::string(version) + " " + command,
      " a=" + format_real(o.params.a) + " b=" + format_real(o.params.b) +
          " mu=" + format_real(o.params.mu) + " eps=" + format_real(o.params.eps) +
          " lambda=" + format_real(o.params.lambda),
      " tol_root=" + format_real(o.tol_root) + " tol_residual=" + format_real(o.tol_residual) +
          " grid=" + std::to_string(o.grid),
  };
}

inline void emit_table(const CommonOptions& o, const CsvTable& table, std::ostream& out) {
  const std::string text = to_csv(table);
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

// ---------------------------------------------------------------------------

inline int cmd_regime(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Params& p = o.params;
    const Regime r = classify_regime(p);
    out << "regime: " << to_string(r.tag) << "\n";
    out << "detail: " << r.detail << "\n";
    if (r.tag == RegimeTag::mixed_sign) {
      out << "three_cycle_bound: " << format_real(three_cycle_bound(p), 12) << "\n";
      const BifValues bv = bif_values(p);
      out << "c: " << format_real(bv.c, 12) << "\n";
      out << "mu1: " << format_real(bv.mu1, 12) << "\n";
      out << "mu2: " << format_real(bv.mu2, 12) << "\n";
      out << "x1: " << format_real(bv.x1, 12) << "\n";
    }
    return exit_ok;
  });
}

inline int cmd_bifvalues(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BifValues bv = bif_values(o.params);
    out << "c: " << format_real(bv.c, 12) << "\n";
    out << "mu1: " << format_real(bv.mu1, 12) << "\n";
    out << "mu2: " << format_real(bv.mu2, 12) << "\n";
    out << "x1: " << format_real(bv.x1, 12) << "\n";
    return exit_ok;
  });
}

inline int cmd_cycles(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cycles = find_all_cycles(o.params, o.search());
    CsvTable t;
    t.comments = metadata(o, "cycles");
    t.header = {"x0", "zonal_type", "multiplier", "stability", "symmetric"};
    for (const auto& c : cycles) {
      t.rows.push_back({format_real(c.x0, 12), to_string(c.zonal_type), format_real(c.multiplier, 12),
                        to_string(c.stability), c.symmetric ? "1" : "0"});
    }
    if (!o.out.empty()) write_text_file(o.out, to_csv(t));
    out << cycles.size() << " limit cycle(s)\n";
    for (const auto& row : t.rows) {
      out << "  x0=" << row[0] << "  " << row[1] << "  multiplier=" << row[2] << "  " << row[3]
          << (row[4] == "1" ? "  symmetric" : "") << "\n";
    }
    return exit_ok;
  });
}

// ---------------------------------------------------------------------------
// scan

struct ScanOptions {
  double mu_min = 0.5;
  double mu_max = 2.5;
  int n = 81;
  std::vector<double> eps_list{1.0};
};

struct ScanRow {
  double mu = 0.0;
  double eps = 1.0;
  int cycle_count = 0;  // -1 when the count could not be settled
  std::vector<double> cycle_initials;
  std::vector<double> multipliers;
  std::string note;
};

inline int worker_count(int requested) {
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Rows sorted by (eps, mu); grid points are solved by a worker pool and
/// written back by index.
inline std::vector<ScanRow> scan_rows(const CommonOptions& o, const ScanOptions& s) {
  if (s.n < 2) throw Error(ErrorCode::bad_regime, "scan needs n >= 2");
  std::vector<double> eps = s.eps_list;
  std::sort(eps.begin(), eps.end());
  const double mu_lo = std::min(s.mu_min, s.mu_max), mu_hi = std::max(s.mu_min, s.mu_max);
  std::vector<ScanRow> rows;
  for (double e : eps) {
    for (int i = 0; i < s.n; ++i) {
      ScanRow r;
      r.eps = e;
      r.mu = mu_lo + (mu_hi - mu_lo) * i / (s.n - 1);
      rows.push_back(r);
    }
  }
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      ScanRow& r = rows[i];
      Params p = o.params;
      p.mu = r.mu;
      p.eps = r.eps;
      try {
        const auto cycles = find_all_cycles(p, o.search());
        r.cycle_count = static_cast<int>(cycles.size());
        for (const auto& c : cycles) {
          r.cycle_initials.push_back(c.x0);
          r.multipliers.push_back(c.multiplier);
        }
      } catch (const Error& e) {
        r.cycle_count = -1;
        r.note = e.what();
      }
    }
  };
  const int n_workers = std::min<int>(worker_count(o.threads), static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string join_reals(const std::vector<double>& v, int digits = 12) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += format_real(v[i], digits);
  }
  return s;
}

inline CsvTable scan_table(const CommonOptions& o, const ScanOptions& s, const std::vector<ScanRow>& rows) {
  CsvTable t;
  t.comments = metadata(o, "scan");
  t.comments.push_back(" mu_min=" + format_real(s.mu_min) + " mu_max=" + format_real(s.mu_max) +
                       " n=" + std::to_string(s.n));
  t.header = {"mu", "eps", "count", "x0s", "multipliers"};
  for (const auto& r : rows) {
    t.rows.push_back({format_real(r.mu, 12), format_real(r.eps, 12), std::to_string(r.cycle_count),
                      join_reals(r.cycle_initials), join_reals(r.multipliers)});
  }
  return t;
}

inline int cmd_scan(const CommonOptions& o, const ScanOptions& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = scan_rows(o, s);
    emit_table(o, scan_table(o, s, rows), out);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].note.empty()) {
        err << "warning: eps=" << format_real(rows[i].eps) << " mu=" << format_real(rows[i].mu)
            << ": " << rows[i].note << "\n";
      }
      if (i == 0 || rows[i].eps != rows[i - 1].eps) continue;
      if (rows[i].cycle_count != rows[i - 1].cycle_count) {
        err << "transition eps=" << format_real(rows[i].eps) << " mu in ["
            << format_real(rows[i - 1].mu, 12) << ", " << format_real(rows[i].mu, 12)
            << "]: " << rows[i - 1].cycle_count << " -> " << rows[i].cycle_count << "\n";
      }
    }
    return exit_ok;
  });
}

// ---------------------------------------------------------------------------

inline int cmd_melnikov(const CommonOptions& o, double x, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Params& p = o.params;
    const double mu = p.mu;
    const ZonePartition part = partition(x, mu);
    out << "M_orig: " << format_real(M_orig(x, mu, p)) << "\n";
    out << "M_shift: " << format_real(M_shift(x, mu, p)) << "\n";
    out << "Mx: " << format_real(Mx(x, mu, p)) << "\n";
    out << "Mmu: " << format_real(Mmu(x, mu, p)) << "\n";
    out << "identity_residual: " << format_real(consistency_identity(x, mu, p), 3) << "\n";
    out << "inner_measure: " << format_real(part.inner_measure()) << "\n";
    out << "upper_measure: " << format_real(part.upper_measure()) << "\n";
    out << "lower_measure: " << format_real(part.lower_measure()) << "\n";
    if (p.a * p.b < 0.0) {
      const BifValues bv = bif_values(p);
      const double amu = std::abs(mu);
      if (std::abs(amu - bv.mu1) > bifurcation_exclusion && std::abs(amu - bv.mu2) > bifurcation_exclusion) {
        out << "simple_zeros: " << count_simple_zeros(mu, p) << "\n";
      } else {
        out << "simple_zeros: at_bifurcation\n";
      }
    }
    return exit_ok;
  });
}

inline int cmd_zeroset(const CommonOptions& o, int n, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto lines = zero_set(o.params, n);
    CsvTable t;
    t.comments = metadata(o, "zeroset");
    const BifValues bv = bif_values(o.params);
    t.comments.push_back(" c=" + format_real(bv.c) + " mu1=" + format_real(bv.mu1) +
                         " mu2=" + format_real(bv.mu2) + " x1=" + format_real(bv.x1));
    t.header = {"branch", "label", "x", "mu"};
    for (const auto& l : lines) {
      for (const auto& [x, mu] : l.points) {
        t.rows.push_back({std::to_string(l.branch_id), l.label, format_real(x), format_real(mu)});
      }
    }
    emit_table(o, t, out);
    return exit_ok;
  });
}

inline int cmd_orbit3d(const CommonOptions& o, double x0, int n, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Params& p = o.params;
    if (n < 1) throw Error(ErrorCode::bad_regime, "orbit3d needs n >= 1");
    const Trajectory traj = advance(p, 0.0, x0, two_pi);
    const double d = traj.final_state - x0;
    if (std::abs(d) >= 1e-6) {
      err << "warning: x0=" << format_real(x0) << " is not a cycle (|d(x0)| = " << format_real(std::abs(d), 3)
          << ")\n";
    }
    CsvTable t;
    t.comments = metadata(o, "orbit3d");
    t.comments.push_back(" x0=" + format_real(x0) + " n=" + std::to_string(n));
    t.header = {"t", "x", "y", "z"};
    const double mu2 = p.mu * p.mu;
    const double cyl_tol = 1e-12 * std::max(1.0, mu2);
    for (int k = 0; k <= n; ++k) {
      const double tk = two_pi * k / n;
      const double y = -p.mu * std::sin(tk);
      const double z = -p.mu * std::cos(tk);
      if (std::abs(y * y + z * z - mu2) > cyl_tol) {
        throw Error(ErrorCode::no_convergence, "row off the invariant cylinder");
      }
      t.rows.push_back({format_real(tk), format_real(state_at(p, traj, tk)), format_real(y), format_real(z)});
    }
    emit_table(o, t, out);
    return exit_ok;
  });
}

inline int cmd_crossings(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Params& p = o.params;
    const auto cycles = find_all_cycles(p, o.search());
    NewtonOptions nopt;
    nopt.tolerance = o.tol_residual;
    int found = 0;
    for (const auto& c : cycles) {
      if (c.zonal_type != ZonalType::three_zonal) continue;
      const auto seq = extract_crossings(p, c.x0);
      if (!seq) {
        out << "x0=" << format_real(c.x0, 12) << ": three-zonal with a non-standard crossing pattern\n";
        continue;
      }
      ++found;
      NewtonReport rep;
      const CrossingSequence solved = solve_crossing_system(p, *seq, nopt, &rep);
      out << "x0=" << format_real(c.x0, 12) << (c.symmetric ? " (symmetric)" : "") << "\n";
      out << "  t1..t4: " << format_real(seq->t1, 12) << " " << format_real(seq->t2, 12) << " "
          << format_real(seq->t3, 12) << " " << format_real(seq->t4, 12) << "\n";
      out << "  residual_direct: " << format_real(inf_norm(residual_direct(p, *seq)), 3) << "\n";
      out << "  residual_3z: " << format_real(inf_norm(residual_3z(p, *seq)), 3) << "\n";
      out << "  newton: " << rep.iterations << " iteration(s), residual_direct "
          << format_real(rep.residual, 3) << ", residual_3z " << format_real(inf_norm(residual_3z(p, solved)), 3)
          << "\n";
    }
    if (found == 0) out << "no three-zonal cycles\n";
    return exit_ok;
  });
}

}  // namespace satcycles::cli
