// lelab: command line front end for the critical Lane-Emden verification lab.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laneemden/orchestrator.hpp"

using namespace laneemden;

namespace {

PointSpec parse_point(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--point", "expected N:p, got '" + s + "'");
  return {std::stoi(s.substr(0, colon)), s.substr(colon + 1)};
}

void print_point(const PointSummary& p) {
  std::printf("%-12s %-7s", p.tag.empty() ? ("N" + std::to_string(p.spec.N) + "_p" + p.spec.p).c_str() : p.tag.c_str(),
              p.status.c_str());
  if (!p.nullity_shooting.empty()) {
    std::printf(" nullity");
    for (std::size_t i = 0; i < p.nullity_shooting.size(); ++i) {
      std::printf(" %d", p.nullity_shooting[i]);
      if (i < p.nullity_spectral.size()) std::printf("/%d", p.nullity_spectral[i]);
    }
  }
  if (p.decay) std::printf("  decay u %.4f v %.4f", p.decay->u_exponent, p.decay->v_exponent);
  std::printf("  %s\n", p.passed() ? "PASS" : "FAIL");
  if (!p.warning.empty()) std::printf("  warning: %s\n", p.warning.c_str());
  if (!p.error.empty()) std::printf("  error: %s\n", p.error.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification lab for ground states of the critical Lane-Emden system"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file with option values; flags override it");

  RunConfig cfg;
  int N = 0;
  std::string p;
  std::vector<std::string> points;
  std::string out = cfg.out_dir.string();
  std::string cache = "reuse";
  bool no_spectral = false;

  app.add_option("--N", N, "space dimension (>= 3)");
  app.add_option("--p", p, "exponent: integer, decimal or ratio like 11/4");
  app.add_option("--point", points, "sweep point N:p (repeatable)");
  app.add_option("--ell-max", cfg.ell_max, "largest channel analyzed")->capture_default_str();
  app.add_option("--rmax", cfg.r_max, "outer radius of the profile grid")->capture_default_str();
  app.add_option("--tol", cfg.rtol, "ODE relative tolerance")->capture_default_str();
  app.add_option("--quad-tol", cfg.quad_tol, "quadrature relative tolerance")->capture_default_str();
  app.add_option("--eigen-window", cfg.eigen_window, "eigenvalue-one window")->capture_default_str();
  app.add_option("--per-decade", cfg.per_decade, "profile nodes per decade")->capture_default_str();
  app.add_option("--spectral-nodes", cfg.spectral_nodes, "coarse quadrature size")->capture_default_str();
  app.add_option("--workers", cfg.workers, "worker threads for sweeps")->capture_default_str();
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--cache", cache, "cache policy")->check(CLI::IsMember({"reuse", "recompute"}))->capture_default_str();
  app.add_flag("--no-spectral", no_spectral, "skip the quadrature eigenvalue method");

  auto* solve = app.add_subcommand("solve", "ground state only");
  auto* kernel = app.add_subcommand("kernel", "channel kernel analysis");
  auto* identity = app.add_subcommand("identity", "integral identities, monotonicity and inequalities");
  auto* decay = app.add_subcommand("decay", "far-field decay laws and bootstrap");
  auto* sweep = app.add_subcommand("sweep", "everything, for every configured point");
  auto* verify = app.add_subcommand("verify", "acceptance suite");
  for (auto* sub : {solve, kernel, identity, decay, sweep, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests exit 0 through CLI11; real usage errors map to 2
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    cfg.out_dir = out;
    cfg.cache = cache_policy_from_string(cache);
    for (const std::string& s : points) cfg.points.push_back(parse_point(s));
    if (!p.empty()) cfg.points.push_back({N, p});

    if (verify->parsed()) {
      cfg.validate();
      const VerifySummary s = verify_suite(cfg, [](const std::string& line) { std::cout << line << std::endl; });
      std::cout << (s.all_passed() ? "all criteria passed" : "some criteria failed") << "\n";
      return s.all_passed() ? 0 : 1;
    }

    if (cfg.points.empty()) {
      if (!sweep->parsed()) throw std::invalid_argument("--N and --p are required");
      cfg.points = acceptance_points();
    }

    AnalysisParts parts;
    if (solve->parsed()) parts = {false, false, false, false};
    if (kernel->parsed()) parts = {true, true, false, false};
    if (identity->parsed()) parts = {false, false, true, false};
    if (decay->parsed()) parts = {false, false, false, true};
    if (no_spectral) parts.spectral = false;

    const SweepManifest m = run(cfg, parts);
    for (const PointSummary& pt : m.points) print_point(pt);
    if (sweep->parsed()) {
      const auto files = emit_plot_data(m);
      std::printf("%zu plot data files under %s\n", files.size(), cfg.out_dir.string().c_str());
    }
    return m.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
