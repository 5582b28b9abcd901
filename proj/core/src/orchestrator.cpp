#include "laneemden/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "laneemden/profile_io.hpp"

namespace laneemden {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(CachePolicy c) { return c == CachePolicy::Reuse ? "reuse" : "recompute"; }

CachePolicy cache_policy_from_string(const std::string& s) {
  if (s == "reuse") return CachePolicy::Reuse;
  if (s == "recompute") return CachePolicy::Recompute;
  throw std::invalid_argument("cache policy must be reuse or recompute, got '" + s + "'");
}

void RunConfig::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(rtol, "rtol");
  positive(quad_tol, "quad_tol");
  positive(eigen_window, "eigen_window");
  positive(null_threshold, "null_threshold");
  positive(r_start, "r_start");
  if (ell_max < 2) throw std::invalid_argument("ell_max must be at least 2");
  if (!(r_max > r_start * 10)) throw std::invalid_argument("r_max must exceed r_start by a decade");
  if (per_decade < 20) throw std::invalid_argument("per_decade must be at least 20");
  if (spectral_nodes < 400 || spectral_nodes % 40 != 0) {
    throw std::invalid_argument("spectral_nodes must be a multiple of 40 and at least 400");
  }
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  // inadmissible points are not rejected here; run() records them as failed and carries on
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.rtol = rtol;
  o.r_start = r_start;
  o.r_max = r_max;
  o.per_decade = per_decade;
  return o;
}

SpectralOptions RunConfig::spectral_options() const {
  SpectralOptions o;
  const int panels = spectral_nodes / o.per_panel;
  o.uniform_panels = panels / 5;
  o.geometric_panels = panels - o.uniform_panels;
  o.window = eigen_window;
  return o;
}

std::vector<PointSpec> acceptance_points() { return {{3, "3"}, {4, "3"}, {5, "1"}, {5, "2"}}; }

namespace {

double closest_to_one(const std::vector<SpectralMode>& modes, std::size_t& idx) {
  double best = INFINITY;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double d = std::abs(modes[i].eigenvalue - 1.0);
    if (d < best) {
      best = d;
      idx = i;
    }
  }
  return best;
}

/// Deviation of a spectral eigenvector from the closed-form generator on r <= r_max.
double mode_deviation(const GroundStateProfile& prof, const SpectralMode& m, int ell) {
  const CriticalPair& pair = prof.pair;
  std::vector<std::array<double, 2>> g(m.r.size(), {0.0, 0.0});
  double xg = 0, gg = 0, big = 0;
  for (std::size_t i = 0; i < m.r.size(); ++i) {
    const double r = m.r[i];
    if (r > prof.grid.r_max()) continue;
    const ProfilePoint pt = prof.at(r);
    if (ell == 1) {
      g[i] = {pt.du, pt.dv};
    } else {
      g[i] = {r * pt.du + pair.alpha * pt.u, r * pt.dv + pair.beta * pt.v};
    }
    xg += m.psi[i] * g[i][0] + m.phi[i] * g[i][1];
    gg += g[i][0] * g[i][0] + g[i][1] * g[i][1];
    big = std::max({big, std::abs(g[i][0]), std::abs(g[i][1])});
  }
  if (gg == 0.0 || big == 0.0) return INFINITY;
  const double c = xg / gg;
  double dev = 0;
  for (std::size_t i = 0; i < m.r.size(); ++i) {
    if (m.r[i] > prof.grid.r_max()) continue;
    dev = std::max({dev, std::abs(m.psi[i] - c * g[i][0]), std::abs(m.phi[i] - c * g[i][1])});
  }
  return dev / big;
}

ChannelOptions channel_options(const RunConfig& cfg) {
  ChannelOptions o;
  o.rtol = cfg.rtol;
  o.null_threshold = cfg.null_threshold;
  return o;
}

}  // namespace

PointAnalysis analyze_point(const GroundStateProfile& prof, const RunConfig& cfg, const AnalysisParts& parts) {
  PointAnalysis a;
  a.pair = prof.pair;
  a.profile = prof;
  a.ode_residual = ode_residual(prof);
  a.scalar_reduction = check_scalar_reduction(prof);
  a.quotient = sobolev_quotient(prof);
  const CriticalPair& pair = prof.pair;

  if (parts.decay) {
    a.decay = fit_decay(prof);
    a.bootstrap = decay_bootstrap(pair.canonical());
  }

  const ChannelOptions copt = channel_options(cfg);
  if (parts.channels) {
    const SpectralOptions sopt = cfg.spectral_options();
    for (int ell = 0; ell <= cfg.ell_max; ++ell) {
      ChannelRecord rec;
      rec.ell = ell;
      rec.shooting = kernel_nullity_shooting(prof, ell, copt);
      if (parts.spectral) rec.spectral = channel_nullity_spectral(prof, ell, sopt, rec.shooting.nullity);
      if (parts.decay && rec.shooting.kernel) rec.kernel_decay = verify_linearized_decay(*rec.shooting.kernel, pair);
      a.channels.push_back(std::move(rec));
    }
    for (int ell = 0; ell <= 1; ++ell) {
      GeneratorCheck g;
      g.ell = ell;
      const ChannelSolution gen = known_generators(prof, ell);
      g.residual = channel_residual(prof, gen);
      const ChannelRecord& rec = a.channels[static_cast<std::size_t>(ell)];
      if (rec.shooting.kernel) g.shooting_deviation = scaled_deviation(*rec.shooting.kernel, gen);
      if (rec.spectral && !rec.spectral->modes.empty()) {
        std::size_t idx = 0;
        closest_to_one(rec.spectral->modes, idx);
        g.mode_deviation = mode_deviation(prof, rec.spectral->modes[idx], ell);
      }
      a.generators.push_back(g);
    }
  }

  if (parts.identities) {
    struct Case {
      const char* label;
      int ell;
      bool generator;
      double ca, cb;
    };
    const Case cases[] = {{"ell0 generator", 0, true, 0, 0},     {"ell0 start (0,1)", 0, false, 0, 1},
                          {"ell1 generator", 1, true, 0, 0},     {"ell1 start (1,0)", 1, false, 1, 0},
                          {"ell2 start (1,0)", 2, false, 1, 0},  {"ell2 start (0,1)", 2, false, 0, 1}};
    const std::vector<double> radii = {1.0, 5.0, 20.0};
    for (const Case& c : cases) {
      IdentityCase ic;
      ic.label = c.label;
      ic.solution = c.generator ? known_generators(prof, c.ell) : integrate_linearized(prof, c.ell, c.ca, c.cb, copt);
      ic.report = identity_report(prof, ic.solution, radii);
      ic.poho = check_poho_identity(prof, ic.solution, radii);
      a.identities.push_back(std::move(ic));
    }
    const double s_energy = (pair.p + 1.0) / pair.p;
    for (int ell : {0, 2}) {
      MonotonicityCase mc;
      mc.ell = ell;
      const ChannelSolution s = integrate_linearized(prof, ell, 0.0, 1.0, copt);
      mc.report = monotonicity_check(s);
      mc.divergence = energy_divergence(solution_component(s, true), pair.N, ell, s_energy);
      a.monotonicity.push_back(mc);
    }
    a.sign_structure = check_sign_structure(prof, integrate_linearized(prof, 2, 1.0, 0.0, copt));
    a.inequalities = inequality_ratios(prof, {a.identities[0].solution, a.identities[2].solution});
  }
  return a;
}

bool PointVerdicts::all() const {
  for (const auto& v : {nullity, agreement, generators, identities, monotonicity, decay, bootstrap}) {
    if (v && !*v) return false;
  }
  return true;
}

namespace {

bool within(double value, double expected, double rel) { return std::abs(value - expected) <= rel * std::abs(expected); }

}  // namespace

PointVerdicts judge(const PointAnalysis& a) {
  PointVerdicts v;
  const int N = a.pair.N;
  if (!a.channels.empty()) {
    bool table = true, agree = true, have_spectral = false;
    for (const ChannelRecord& rec : a.channels) {
      const int expected = rec.ell <= 1 ? 1 : 0;
      table = table && rec.shooting.nullity == expected;
      if (rec.spectral) {
        have_spectral = true;
        agree = agree && rec.spectral->nullity_spectral == expected && rec.spectral->agree;
      }
    }
    v.nullity = table;
    if (have_spectral) v.agreement = agree;
    bool gens = true;
    for (const GeneratorCheck& g : a.generators) {
      gens = gens && g.residual <= 1e-6 && g.shooting_deviation >= 0 && g.shooting_deviation <= 1e-5;
      if (have_spectral) gens = gens && g.mode_deviation >= 0 && g.mode_deviation <= 1e-3;
    }
    v.generators = gens;
  }
  if (!a.identities.empty()) {
    bool ok = true;
    for (const IdentityCase& ic : a.identities) {
      for (const PohozaevSample& s : ic.poho) {
        // the identity's coefficient vanishes at ell = 1, so I1 + I2 itself must be zero
        ok = ok && s.residual <= (ic.solution.ell == 1 ? 1e-10 : 1e-6);
      }
    }
    v.identities = ok;
    bool mono = true;
    for (const MonotonicityCase& mc : a.monotonicity) {
      mono = mono && mc.report.strictly_monotone && mc.report.sign_changes == 0 && mc.divergence.diverges(1.5);
    }
    v.monotonicity = mono;
  }
  if (a.decay) {
    const DecayFit& d = *a.decay;
    bool ok = within(d.v_exponent, N - 2.0, 0.02);
    if (a.pair.regime == Regime::LogCase) {
      ok = ok && d.log_flag && d.log_drift <= 0.05;
    } else {
      ok = ok && within(d.u_exponent, d.expected_u_exponent, 0.02) && within(d.v_exponent, d.expected_v_exponent, 0.02);
    }
    v.decay = ok;
  }
  if (a.bootstrap) {
    const BootstrapResult& b = *a.bootstrap;
    const double eta = 1e-3;
    const CriticalPair c = a.pair.canonical();
    const double alpha_target = c.regime == Regime::SubSerrin ? (N - 2.0) * c.p - 2.0 : N - 2.0;
    v.bootstrap = b.strictly_increasing && std::abs(b.alpha_limit - alpha_target) <= 10 * eta &&
                  std::abs(b.beta_limit - (N - 2.0)) <= 10 * eta;
  }
  return v;
}

namespace {

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json vec(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

json verdict(const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); }

json verdicts_json(const PointVerdicts& v) {
  return {{"nullity", verdict(v.nullity)},
          {"agreement", verdict(v.agreement)},
          {"generators", verdict(v.generators)},
          {"identities", verdict(v.identities)},
          {"monotonicity", verdict(v.monotonicity)},
          {"decay", verdict(v.decay)},
          {"bootstrap", verdict(v.bootstrap)},
          {"all", v.all()}};
}

json decay_json(const DecayFit& d) {
  return {{"u_exponent", number(d.u_exponent)},
          {"v_exponent", number(d.v_exponent)},
          {"a_p", number(d.a_p)},
          {"b_p", number(d.b_p)},
          {"log_flag", d.log_flag},
          {"expected_u_exponent", number(d.expected_u_exponent)},
          {"expected_v_exponent", number(d.expected_v_exponent)},
          {"fit_residual", number(d.fit_residual)},
          {"log_drift", number(d.log_drift)},
          {"ratio_drift", number(d.ratio_drift)},
          {"window", {number(d.window_lo), number(d.window_hi)}}};
}

}  // namespace

std::string point_report(const PointAnalysis& a) {
  json j;
  const CriticalPair& pair = a.pair;
  j["point"] = {{"N", pair.N},
                {"p", exponent_text(pair)},
                {"p_value", pair.p},
                {"q_value", number(pair.q)},
                {"alpha", number(pair.alpha)},
                {"beta", number(pair.beta)},
                {"regime", to_string(pair.regime)}};
  j["ground_state"] = {{"gamma_star", number(a.profile.gamma_star)},
                       {"u0", a.profile.u0},
                       {"nodes", a.profile.grid.size()},
                       {"r_max", a.profile.grid.r_max()},
                       {"ode_residual", number(a.ode_residual)},
                       {"scalar_reduction_residual", number(a.scalar_reduction)},
                       {"minimization_quotient", number(a.quotient)}};
  if (a.decay) j["decay"] = decay_json(*a.decay);
  if (a.bootstrap) {
    const BootstrapResult& b = *a.bootstrap;
    j["bootstrap"] = {{"alpha", vec(b.alpha)},
                      {"beta", vec(b.beta)},
                      {"alpha_limit", number(b.alpha_limit)},
                      {"beta_limit", number(b.beta_limit)},
                      {"alpha_expected", number(b.alpha_expected)},
                      {"beta_expected", number(b.beta_expected)},
                      {"steps_to_saturation", b.steps_to_saturation},
                      {"strictly_increasing", b.strictly_increasing}};
  }
  json channels = json::array();
  for (const ChannelRecord& rec : a.channels) {
    const ConnectionMatrix& m = rec.shooting.matrix;
    json c = {{"ell", rec.ell},
              {"nullity_shooting", rec.shooting.nullity},
              {"connection_matrix",
               {{number(m.entries[0][0]), number(m.entries[0][1])}, {number(m.entries[1][0]), number(m.entries[1][1])}}},
              {"singular_values", {number(m.singular_values[0]), number(m.singular_values[1])}},
              {"singular_ratio", number(m.margin())},
              {"null_direction", {number(m.null_direction[0]), number(m.null_direction[1])}}};
    if (rec.spectral) {
      c["nullity_spectral"] = rec.spectral->nullity_spectral;
      c["eigenvalues_near_one"] = vec(rec.spectral->eigenvalues_near_one);
      c["agree"] = rec.spectral->agree;
      std::vector<double> top(rec.spectral->spectrum.begin(),
                              rec.spectral->spectrum.begin() +
                                  static_cast<std::ptrdiff_t>(std::min<std::size_t>(8, rec.spectral->spectrum.size())));
      c["leading_eigenvalues"] = vec(top);
    }
    if (rec.kernel_decay) {
      const LinearizedDecay& d = *rec.kernel_decay;
      c["kernel_decay"] = {{"psi_exponent", number(d.psi_exponent)},
                           {"phi_exponent", number(d.phi_exponent)},
                           {"psi_log_exponent", number(d.psi_log_exponent)},
                           {"psi_bound", number(d.psi_bound)},
                           {"phi_bound", number(d.phi_bound)},
                           {"bound_satisfied", d.bound_satisfied}};
    }
    channels.push_back(c);
  }
  if (!a.channels.empty()) j["channels"] = channels;
  if (!a.generators.empty()) {
    json g = json::array();
    for (const GeneratorCheck& c : a.generators) {
      g.push_back({{"ell", c.ell},
                   {"residual", number(c.residual)},
                   {"spectral_mode_deviation", c.mode_deviation < 0 ? json(nullptr) : number(c.mode_deviation)},
                   {"shooting_deviation", c.shooting_deviation < 0 ? json(nullptr) : number(c.shooting_deviation)}});
    }
    j["generators"] = g;
  }
  if (!a.identities.empty()) {
    json ids = json::array();
    for (const IdentityCase& ic : a.identities) {
      const IdentityReport& r = ic.report;
      json poho = json::array();
      for (const PohozaevSample& s : ic.poho) {
        poho.push_back({{"R", s.R}, {"lhs", number(s.lhs)}, {"rhs", number(-s.integral)}, {"residual", number(s.residual)}});
      }
      json norms;
      for (const auto& [k, val] : r.energy_norms) norms[k] = number(val);
      ids.push_back({{"case", ic.label},
                     {"ell", r.ell},
                     {"radii", vec(r.radii)},
                     {"I1", vec(r.I1_values)},
                     {"I2", vec(r.I2_values)},
                     {"derivative_residuals", {{"I1", number(r.derivative_residuals.I1)}, {"I2", number(r.derivative_residuals.I2)}}},
                     {"identity", poho},
                     {"integrability_tail", number(r.integrability_tail)},
                     {"energy_norms", norms}});
    }
    j["identities"] = ids;
    json mono = json::array();
    for (const MonotonicityCase& mc : a.monotonicity) {
      mono.push_back({{"ell", mc.ell},
                      {"strictly_monotone", mc.report.strictly_monotone},
                      {"direction", mc.report.direction},
                      {"sign_changes", mc.report.sign_changes},
                      {"phi_decreasing", mc.report.phi_decreasing},
                      {"psi_increasing_on_positivity", mc.report.psi_increasing_on_positivity},
                      {"positivity_end", number(mc.report.positivity_end)},
                      {"divergence_radii", vec(mc.divergence.radii)},
                      {"divergence_norms", vec(mc.divergence.norms)},
                      {"divergence_growth", number(mc.divergence.growth)}});
    }
    j["monotonicity"] = mono;
  }
  if (a.sign_structure) {
    const SignStructure& s = *a.sign_structure;
    j["sign_structure"] = {{"sigma", s.sigma},
                           {"r1", s.r1 ? json(*s.r1) : json(nullptr)},
                           {"r2", s.r2 ? json(*s.r2) : json(nullptr)},
                           {"phi_positive_near_zero", s.phi_positive_near_zero},
                           {"phi_positive_before_min", s.phi_positive_before_min},
                           {"outside_signs_hold", s.outside_signs_hold},
                           {"R", number(s.R)},
                           {"integral_at_R", number(s.integral_at_R)},
                           {"integral_negative", s.integral_negative},
                           {"lhs_at_R", number(s.lhs_at_R)},
                           {"tail_radii", vec(s.tail_radii)},
                           {"tail_lhs", vec(s.tail_lhs)},
                           {"tail_away_from_zero", s.tail_away_from_zero},
                           {"note", s.note}};
  }
  if (a.inequalities) {
    const InequalityTable& t = *a.inequalities;
    json rows = json::array();
    for (const InequalityRow& r : t.rows) {
      rows.push_back({{"function", r.function},
                      {"ell", r.ell},
                      {"sobolev_lower", number(r.sobolev_lower)},
                      {"hardy", number(r.hardy)},
                      {"sobolev_grad_t", number(r.sobolev_grad_t)},
                      {"sobolev_grad_s", number(r.sobolev_grad_s)}});
    }
    j["inequalities"] = {{"inv_s", t.inv_s}, {"inv_t", t.inv_t}, {"exponent_defect", t.exponent_defect}, {"rows", rows}};
  }
  j["verdicts"] = verdicts_json(judge(a));
  return j.dump(2) + "\n";
}

std::string spectrum_csv(const ChannelKernelReport& r) {
  std::vector<double> all;
  all.reserve(2 * r.spectrum.size());
  for (double mu : r.spectrum) {
    all.push_back(mu);
    all.push_back(-mu);
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  std::string out = "index,eigenvalue\n";
  char buf[64];
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof buf, all[i]);
    out += std::to_string(i) + ',' + std::string(buf, res.ptr) + '\n';
  }
  return out;
}

bool SweepManifest::all_passed() const {
  return std::all_of(points.begin(), points.end(), [](const PointSummary& p) { return p.passed(); });
}

GroundStateProfile obtain_profile(const CriticalPair& pair, const RunConfig& cfg, const fs::path& dir,
                                  std::string& status, std::string& warning) {
  if (cfg.cache == CachePolicy::Reuse) {
    try {
      if (auto cached = load_profile(dir, pair)) {
        const RadialGrid expected = RadialGrid::log_uniform(cfg.r_start, cfg.r_max, cfg.per_decade);
        const bool same_grid = cached->grid.size() == expected.size() &&
                               std::abs(cached->grid.r_start() - expected.r_start()) <= 1e-12 * expected.r_start() &&
                               std::abs(cached->grid.r_max() - expected.r_max()) <= 1e-9 * expected.r_max() &&
                               cached->rtol == cfg.rtol;
        if (!same_grid) {
          warning = "cached profile was computed with different solver settings; recomputing";
        } else {
          const CacheCheck check = validate_profile(*cached);
          if (check.ok) {
            status = "cached";
            return *cached;
          }
          warning = "cached profile rejected (" + check.reason + "); recomputing";
        }
      }
    } catch (const std::exception& e) {
      warning = std::string("cached profile unreadable (") + e.what() + "); recomputing";
    }
  }
  GroundStateProfile prof = solve_ground_state(pair, cfg.solver_options());
  save_profile(prof, dir);
  status = "solved";
  return prof;
}

namespace {

PointSummary process_point(const PointSpec& spec, const RunConfig& cfg, const AnalysisParts& parts) {
  PointSummary s;
  s.spec = spec;
  try {
    const CriticalPair pair = pair_from_text(spec.N, spec.p);
    s.tag = point_tag(pair);
    s.dir = cfg.out_dir / s.tag;
    fs::create_directories(s.dir);
    const GroundStateProfile prof = obtain_profile(pair, cfg, s.dir, s.status, s.warning);
    s.artifacts.push_back("gs_" + s.tag + ".csv");
    s.artifacts.push_back("gs_" + s.tag + ".json");
    const PointAnalysis a = analyze_point(prof, cfg, parts);
    for (const ChannelRecord& rec : a.channels) {
      s.nullity_shooting.push_back(rec.shooting.nullity);
      if (rec.spectral) {
        s.nullity_spectral.push_back(rec.spectral->nullity_spectral);
        const std::string name = "spec_" + s.tag + "_l" + std::to_string(rec.ell) + ".csv";
        write_file_atomic(s.dir / name, spectrum_csv(*rec.spectral));
        s.artifacts.push_back(name);
      }
    }
    s.verdicts = judge(a);
    s.decay = a.decay;
    write_file_atomic(s.dir / "report.json", point_report(a));
    s.artifacts.push_back("report.json");
  } catch (const std::exception& e) {
    s.status = "failed";
    s.error = e.what();
  }
  return s;
}

}  // namespace

SweepManifest run(const RunConfig& cfg, const AnalysisParts& parts) {
  cfg.validate();
  SweepManifest m;
  m.out_dir = cfg.out_dir;
  fs::create_directories(cfg.out_dir);
  m.points.resize(cfg.points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.points.size(); i = next++) {
      m.points[i] = process_point(cfg.points[i], cfg, parts);
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), cfg.points.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_workers; ++k) pool.emplace_back(worker);
  }
  write_file_atomic(cfg.out_dir / "manifest.json", manifest_json(m));
  return m;
}

std::string manifest_json(const SweepManifest& m) {
  json pts = json::array();
  for (const PointSummary& p : m.points) {
    json e = {{"N", p.spec.N},
              {"p", p.spec.p},
              {"tag", p.tag},
              {"status", p.status},
              {"dir", p.tag},
              {"artifacts", p.artifacts},
              {"nullity_shooting", p.nullity_shooting},
              {"nullity_spectral", p.nullity_spectral},
              {"verdicts", verdicts_json(p.verdicts)},
              {"passed", p.passed()}};
    if (!p.error.empty()) e["error"] = p.error;
    if (!p.warning.empty()) e["warning"] = p.warning;
    pts.push_back(e);
  }
  json j = {{"points", pts}, {"all_passed", m.all_passed()}};
  return j.dump(2) + "\n";
}

std::vector<fs::path> emit_plot_data(const SweepManifest& m) {
  std::vector<fs::path> written;
  char buf[64];
  auto num = [&](double x) {
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  for (const PointSummary& p : m.points) {
    if (p.status == "failed") continue;
    const CriticalPair pair = pair_from_text(p.spec.N, p.spec.p);
    const auto prof = load_profile(p.dir, pair);
    if (!prof) continue;
    const int N = pair.N;
    const bool log_case = pair.regime == Regime::LogCase;
    std::string profile = log_case ? "r,u,v,r_pow_u_over_log_r\n" : "r,u,v\n";
    for (std::size_t i = 0; i < prof->grid.size(); ++i) {
      const double r = prof->grid.nodes[i];
      profile += num(r) + ',' + num(prof->u[i]) + ',' + num(prof->v[i]);
      if (log_case) profile += ',' + (r > 1.0 ? num(std::pow(r, N - 2) * prof->u[i] / std::log(r)) : std::string("nan"));
      profile += '\n';
    }
    written.push_back(p.dir / "plot_profile.csv");
    write_file_atomic(written.back(), profile);

    if (p.decay) {
      const DecayFit& d = *p.decay;
      std::string fit = "r,u,v,u_fit,v_fit\n";
      for (std::size_t i = 0; i < prof->grid.size(); ++i) {
        const double r = prof->grid.nodes[i];
        if (r < d.window_lo || r > d.window_hi) continue;
        fit += num(r) + ',' + num(prof->u[i]) + ',' + num(prof->v[i]) + ',' + num(d.a_p * std::pow(r, -d.u_exponent)) + ',' +
               num(d.b_p * std::pow(r, -d.v_exponent)) + '\n';
      }
      written.push_back(p.dir / "plot_decay_fit.csv");
      write_file_atomic(written.back(), fit);
    }

    std::string scatter = "ell,index,eigenvalue\n";
    bool any = false;
    for (const std::string& name : p.artifacts) {
      if (name.rfind("spec_", 0) != 0) continue;
      const std::size_t l = name.rfind("_l");
      const std::string ell = name.substr(l + 2, name.size() - l - 6);
      const std::string body = read_file(p.dir / name);
      std::size_t pos = body.find('\n') + 1;
      while (pos < body.size()) {
        const std::size_t end = body.find('\n', pos);
        scatter += ell + ',' + body.substr(pos, end - pos) + '\n';
        pos = end + 1;
      }
      any = true;
    }
    if (any) {
      written.push_back(p.dir / "plot_eigenvalues.csv");
      write_file_atomic(written.back(), scatter);
    }

    const fs::path report = p.dir / "report.json";
    if (fs::exists(report)) {
      const json j = json::parse(read_file(report));
      if (j.contains("identities")) {
        std::string traces = "case,ell,R,lhs,rhs\n";
        for (const json& c : j["identities"]) {
          for (const json& s : c["identity"]) {
            auto field = [&](const char* k) { return s[k].is_null() ? std::string("nan") : num(s[k].get<double>()); };
            traces += '"' + c["case"].get<std::string>() + "\"," + std::to_string(c["ell"].get<int>()) + ',' + field("R") +
                      ',' + field("lhs") + ',' + field("rhs") + '\n';
          }
        }
        written.push_back(p.dir / "plot_identity.csv");
        write_file_atomic(written.back(), traces);
      }
    }
  }
  return written;
}

}  // namespace laneemden
