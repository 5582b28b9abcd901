#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "laneemden/orchestrator.hpp"
#include "laneemden/profile_io.hpp"

namespace laneemden {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

CriterionResult criterion(int id, std::string name) {
  CriterionResult c;
  c.id = id;
  c.name = std::move(name);
  return c;
}

struct Analyzed {
  PointSpec spec;
  PointAnalysis analysis;
  PointVerdicts verdicts;
};

CriterionResult bubble_oracle(const RunConfig& cfg) {
  CriterionResult c = criterion(1, "closed-form bubble at N=4, p=q=3");
  const auto t0 = Clock::now();
  const GroundStateProfile prof = solve_ground_state(pair_from_text(4, "3"), cfg.solver_options());
  c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  double err = 0;
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    const double r = prof.grid.nodes[i];
    if (r > 50.0) break;
    const double exact = 1.0 / (1.0 + r * r / 8.0);
    err = std::max({err, std::abs(prof.u[i] - exact) / exact, std::abs(prof.v[i] - exact) / exact});
  }
  const double gamma_err = std::abs(prof.gamma_star - 1.0);
  c.passed = err <= 1e-5 && gamma_err <= 1e-8 && c.seconds < 10.0;
  c.detail = "max rel error " + fmt("%.2e", err) + ", |gamma-1| " + fmt("%.2e", gamma_err);
  return c;
}

CriterionResult hyperbola_algebra() {
  CriterionResult c = criterion(2, "hyperbola algebra and inequality lemma");
  const auto t0 = Clock::now();
  std::mt19937 rng(20240611u);
  double worst = 0;
  bool lemma = true;
  int lemma_points = 0;
  for (int N = 3; N <= 8; ++N) {
    const double lo = 2.0 / (N - 2);
    const double serrin = static_cast<double>(N) / (N - 2);
    // sampled p spans up to 4 (N+2)/(N-2), with q following from the curve
    std::uniform_real_distribution<double> dist(lo * 1.001, 4.0 * (N + 2.0) / (N - 2.0));
    for (int k = 0; k < 100; ++k) {
      const CriticalPair pair = pair_from_p(N, dist(rng));
      worst = std::max({worst, hyperbola_residual(pair), scaling_exponent_identity(pair)});
    }
    for (int k = 0; k < 100; ++k) {
      const double p = lo + (serrin - lo) * (k + 0.5) / 100.0;
      lemma = lemma && check_inequality_lemma(pair_from_p(N, p)).verdict;
      ++lemma_points;
    }
  }
  c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  c.passed = worst <= 1e-12 && lemma && c.seconds < 1.0;
  c.detail = "worst residual " + fmt("%.1e", worst) + ", lemma " + (lemma ? "true" : "false") + " on " +
             std::to_string(lemma_points) + " grid points";
  return c;
}

std::string table_text(const std::vector<int>& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + "]";
}

CriterionResult nullity_table(const std::vector<Analyzed>& pts, double seconds) {
  CriterionResult c = criterion(3, "nullity table by shooting and spectral methods");
  c.seconds = seconds;
  bool ok = true;
  std::string detail;
  for (const Analyzed& a : pts) {
    std::vector<int> sh, sp;
    for (const ChannelRecord& rec : a.analysis.channels) {
      sh.push_back(rec.shooting.nullity);
      sp.push_back(rec.spectral ? rec.spectral->nullity_spectral : -1);
    }
    ok = ok && a.verdicts.nullity.value_or(false) && a.verdicts.agreement.value_or(false);
    detail += (detail.empty() ? "" : "; ") + point_tag(a.analysis.pair) + " " + table_text(sh) + "/" + table_text(sp);
  }
  c.passed = ok && seconds < 300.0;
  c.detail = detail;
  return c;
}

CriterionResult generators(const std::vector<Analyzed>& pts) {
  CriterionResult c = criterion(4, "generator residuals and eigenvector match");
  double res = 0, dev = 0, shoot = 0;
  bool ok = true;
  for (const Analyzed& a : pts) {
    for (const GeneratorCheck& g : a.analysis.generators) {
      res = std::max(res, g.residual);
      shoot = std::max(shoot, g.shooting_deviation < 0 ? INFINITY : g.shooting_deviation);
      dev = std::max(dev, g.mode_deviation < 0 ? INFINITY : g.mode_deviation);
    }
    ok = ok && a.verdicts.generators.value_or(false);
  }
  c.passed = ok && res <= 1e-6 && dev <= 1e-3;
  c.detail = "max residual " + fmt("%.1e", res) + ", max eigenvector deviation " + fmt("%.1e", dev) +
             ", max shooting kernel deviation " + fmt("%.1e", shoot);
  return c;
}

CriterionResult identity_check(const std::vector<Analyzed>& pts) {
  CriterionResult c = criterion(5, "integral identity at R = 1, 5, 20");
  double even = 0, odd = 0;
  for (const Analyzed& a : pts) {
    for (const IdentityCase& ic : a.analysis.identities) {
      for (const PohozaevSample& s : ic.poho) {
        (ic.solution.ell == 1 ? odd : even) = std::max(ic.solution.ell == 1 ? odd : even, s.residual);
      }
    }
  }
  c.passed = even <= 1e-6 && odd <= 1e-10;
  c.detail = "ell in {0,2} max residual " + fmt("%.1e", even) + ", ell=1 max " + fmt("%.1e", odd);
  return c;
}

CriterionResult decay_laws(const std::vector<Analyzed>& pts) {
  CriterionResult c = criterion(6, "far-field decay laws");
  bool ok = true;
  std::string detail;
  for (const Analyzed& a : pts) {
    const DecayFit& d = *a.analysis.decay;
    const int N = a.analysis.pair.N;
    bool point_ok = std::abs(d.v_exponent - (N - 2.0)) <= 0.02 * (N - 2.0);
    std::string line = point_tag(a.analysis.pair) + " v " + fmt("%.4f", d.v_exponent);
    if (a.analysis.pair.regime == Regime::LogCase) {
      point_ok = point_ok && d.log_drift <= 0.05;
      line += ", log drift " + fmt("%.4f", d.log_drift);
    } else {
      point_ok = point_ok && std::abs(d.u_exponent - d.expected_u_exponent) <= 0.02 * d.expected_u_exponent;
      line += ", u " + fmt("%.4f", d.u_exponent) + " vs " + fmt("%.4g", d.expected_u_exponent);
    }
    ok = ok && point_ok;
    detail += (detail.empty() ? "" : "; ") + line;
  }
  c.passed = ok;
  c.detail = detail;
  return c;
}

CriterionResult monotonicity(const std::vector<Analyzed>& pts) {
  CriterionResult c = criterion(7, "monotonicity and energy divergence for (0,1) starts");
  bool ok = true;
  double min_growth = INFINITY;
  int changes = 0;
  for (const Analyzed& a : pts) {
    for (const MonotonicityCase& mc : a.analysis.monotonicity) {
      min_growth = std::min(min_growth, mc.divergence.growth);
      changes += mc.report.sign_changes;
      ok = ok && mc.report.strictly_monotone && mc.report.sign_changes == 0 && mc.divergence.diverges(1.5);
    }
  }
  c.passed = ok;
  c.detail = "sign changes " + std::to_string(changes) + ", smallest growth factor " + fmt("%.3f", min_growth);
  return c;
}

CriterionResult bootstrap(const std::vector<Analyzed>& pts) {
  CriterionResult c = criterion(8, "decay-rate bootstrap limits");
  bool ok = true;
  std::string detail;
  for (const Analyzed& a : pts) {
    const BootstrapResult& b = *a.analysis.bootstrap;
    ok = ok && a.verdicts.bootstrap.value_or(false);
    detail += (detail.empty() ? "" : "; ") + point_tag(a.analysis.pair) + " (" + fmt("%.4f", b.alpha_limit) + ", " +
              fmt("%.4f", b.beta_limit) + ")";
  }
  c.passed = ok;
  c.detail = detail;
  return c;
}

std::string strip_status(const std::string& manifest) {
  nlohmann::json j = nlohmann::json::parse(manifest);
  for (auto& p : j["points"]) {
    p.erase("status");
    p.erase("warning");
  }
  return j.dump();
}

CriterionResult determinism(const RunConfig& base) {
  CriterionResult c = criterion(9, "determinism and cache integrity");
  const auto t0 = Clock::now();
  RunConfig cfg = base;
  cfg.points = {{4, "3"}};
  cfg.ell_max = 2;
  cfg.workers = 1;
  cfg.out_dir = base.out_dir / "determinism";
  std::error_code ec;
  fs::remove_all(cfg.out_dir, ec);

  std::vector<std::string> problems;
  cfg.cache = CachePolicy::Recompute;
  const SweepManifest first = run(cfg);
  const fs::path report = first.points[0].dir / "report.json";
  const std::string report_a = read_file(report);
  const std::string manifest_a = read_file(cfg.out_dir / "manifest.json");

  cfg.cache = CachePolicy::Reuse;
  const std::uint64_t before = solver_invocations();
  const SweepManifest second = run(cfg);
  const std::uint64_t invocations = solver_invocations() - before;
  if (second.points[0].status != "cached") problems.push_back("rerun did not use the cache");
  if (invocations != 0) problems.push_back("rerun invoked the solver");
  if (read_file(report) != report_a) problems.push_back("report bytes differ");
  if (strip_status(read_file(cfg.out_dir / "manifest.json")) != strip_status(manifest_a)) {
    problems.push_back("manifest differs");
  }

  // tamper with the cached profile: scale u on a band of nodes by 1%
  const CriticalPair pair = pair_from_text(4, "3");
  const fs::path dir = first.points[0].dir;
  GroundStateProfile tampered = *load_profile(dir, pair);
  for (std::size_t i = tampered.grid.size() / 3; i < tampered.grid.size() / 3 + 40; ++i) tampered.u[i] *= 1.01;
  tampered.finalize();
  save_profile(tampered, dir);
  AnalysisParts only_identities;
  only_identities.channels = only_identities.spectral = only_identities.decay = false;
  const PointVerdicts unchecked = judge(analyze_point(tampered, cfg, only_identities));
  if (unchecked.identities.value_or(true)) problems.push_back("tampered profile passed the identity checks");

  const SweepManifest third = run(cfg);
  const PointSummary& t = third.points[0];
  if (t.status != "solved" || t.warning.empty()) problems.push_back("tampered cache entry was not rejected");
  if (read_file(report) != report_a) problems.push_back("report after recompute differs");

  c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  c.passed = problems.empty();
  if (c.passed) {
    c.detail = "byte-identical report on rerun, tampered entry rejected (" + t.warning + ")";
  } else {
    for (const std::string& p : problems) c.detail += (c.detail.empty() ? "" : "; ") + p;
  }
  return c;
}

std::string line_for(const CriterionResult& c) {
  return std::string(c.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " " + c.name + ": " + c.detail +
         " [" + fmt("%.1f", c.seconds) + " s]";
}

}  // namespace

bool VerifySummary::all_passed() const {
  for (const CriterionResult& c : criteria) {
    if (!c.passed) return false;
  }
  return !criteria.empty();
}

VerifySummary verify_suite(const RunConfig& config, const std::function<void(const std::string&)>& line) {
  RunConfig cfg = config;
  cfg.validate();
  VerifySummary out;
  auto record = [&](CriterionResult c) {
    if (line) line(line_for(c));
    out.criteria.push_back(std::move(c));
  };

  record(bubble_oracle(cfg));
  record(hyperbola_algebra());

  const auto t0 = Clock::now();
  std::vector<Analyzed> pts;
  const fs::path point_root = cfg.out_dir / "points";
  for (const PointSpec& spec : acceptance_points()) {
    const CriticalPair pair = pair_from_text(spec.N, spec.p);
    const fs::path dir = point_root / point_tag(pair);
    std::string status, warning;
    const GroundStateProfile prof = obtain_profile(pair, cfg, dir, status, warning);
    if (!warning.empty() && line) line("note: " + point_tag(pair) + ": " + warning);
    Analyzed a{spec, analyze_point(prof, cfg), {}};
    a.verdicts = judge(a.analysis);
    write_file_atomic(dir / "report.json", point_report(a.analysis));
    pts.push_back(std::move(a));
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  record(nullity_table(pts, seconds));
  record(generators(pts));
  record(identity_check(pts));
  record(decay_laws(pts));
  record(monotonicity(pts));
  record(bootstrap(pts));
  record(determinism(cfg));

  nlohmann::json j = nlohmann::json::array();
  for (const CriterionResult& c : out.criteria) {
    j.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  write_file_atomic(cfg.out_dir / "verify_report.json", j.dump(2) + "\n");
  return out;
}

}  // namespace laneemden
