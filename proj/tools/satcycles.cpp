#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satcycles/commands.hpp"

namespace cli = satcycles::cli;

int main(int argc, char** argv) {
  CLI::App app{"Limit cycles of x' = a x + (b - a) sat(x) + mu sin t"};
  app.set_version_flag("--version", cli::version);
  app.set_config("--config", "", "key=value config file");
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.require_subcommand(1);
  app.fallthrough();

  cli::CommonOptions opt;
  app.add_option("--a", opt.params.a, "outer slope");
  app.add_option("--b", opt.params.b, "inner slope");
  app.add_option("--mu", opt.params.mu, "forcing amplitude");
  app.add_option("--eps", opt.params.eps, "slope scale epsilon");
  app.add_option("--lambda", opt.params.lambda, "constant bias");
  app.add_option("--out", opt.out, "CSV output path");
  app.add_option("--tol-root", opt.tol_root, "cycle root tolerance")->capture_default_str();
  app.add_option("--tol-residual", opt.tol_residual, "crossing residual tolerance")->capture_default_str();
  app.add_option("--grid", opt.grid, "displacement scan cells")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "scan workers (0: all cores)");

  auto* regime = app.add_subcommand("regime", "classify the parameter regime");
  auto* cycles = app.add_subcommand("cycles", "list all limit cycles");
  auto* bifvalues = app.add_subcommand("bifvalues", "bifurcation constants c, mu1, mu2, x1");
  auto* crossings = app.add_subcommand("crossings", "crossing times of three-zonal cycles");

  cli::ScanOptions scan_opt;
  auto* scan = app.add_subcommand("scan", "cycle counts over a mu grid");
  scan->add_option("--mu-min", scan_opt.mu_min)->capture_default_str();
  scan->add_option("--mu-max", scan_opt.mu_max)->capture_default_str();
  scan->add_option("--n", scan_opt.n, "grid points")->capture_default_str()->check(CLI::Range(2, 1000000));
  scan->add_option("--eps-list", scan_opt.eps_list, "epsilon values")->delimiter(',');

  double mel_x = 0.0;
  auto* melnikov = app.add_subcommand("melnikov", "evaluate M, Mx, Mmu at (x, mu)");
  melnikov->add_option("--x", mel_x)->required();

  int zs_n = 400;
  auto* zeroset = app.add_subcommand("zeroset", "zero set of M as polylines");
  zeroset->add_option("--n", zs_n, "samples per branch")->capture_default_str()->check(CLI::PositiveNumber);

  double orbit_x0 = 0.0;
  int orbit_n = 512;
  auto* orbit3d = app.add_subcommand("orbit3d", "cycle on the invariant cylinder");
  orbit3d->add_option("--x0", orbit_x0)->required();
  orbit3d->add_option("--n", orbit_n, "samples per period")->capture_default_str()->check(CLI::PositiveNumber);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*regime) return cli::cmd_regime(opt, out, err);
  if (*cycles) return cli::cmd_cycles(opt, out, err);
  if (*bifvalues) return cli::cmd_bifvalues(opt, out, err);
  if (*crossings) return cli::cmd_crossings(opt, out, err);
  if (*scan) return cli::cmd_scan(opt, scan_opt, out, err);
  if (*melnikov) return cli::cmd_melnikov(opt, mel_x, out, err);
  if (*zeroset) return cli::cmd_zeroset(opt, zs_n, out, err);
  if (*orbit3d) return cli::cmd_orbit3d(opt, orbit_x0, orbit_n, out, err);
  return 1;
}
