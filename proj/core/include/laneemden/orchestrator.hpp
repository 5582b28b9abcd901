#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "laneemden/channels.hpp"
#include "laneemden/identities.hpp"
#include "laneemden/spectral.hpp"

namespace laneemden {

enum class CachePolicy { Reuse, Recompute };
std::string to_string(CachePolicy c);
CachePolicy cache_policy_from_string(const std::string& s);

struct PointSpec {
  int N = 0;
  std::string p;  ///< "3", "2.5" or "11/4"
};

struct RunConfig {
  std::vector<PointSpec> points;
  int ell_max = 6;
  double rtol = 1e-12;          ///< ODE relative tolerance
  double quad_tol = 1e-10;      ///< relative tolerance of adaptive quadrature
  double eigen_window = 5e-3;   ///< half-width of the eigenvalue-one cluster
  double null_threshold = 1e-6; ///< singular-value ratio counted as zero
  double r_start = 1e-3;
  double r_max = 1e3;
  int per_decade = 400;
  int spectral_nodes = 400;     ///< coarse quadrature size; the fine grid doubles it
  std::filesystem::path out_dir = "lelab_out";
  CachePolicy cache = CachePolicy::Reuse;
  int workers = 1;

  /// Throws std::invalid_argument on non-positive tolerances, ell_max < 2 or a bad grid. Point
  /// admissibility is checked per point by run().
  void validate() const;
  SolverOptions solver_options() const;
  SpectralOptions spectral_options() const;
};

/// Which parts of the per-point analysis to run.
struct AnalysisParts {
  bool channels = true;
  bool spectral = true;
  bool identities = true;
  bool decay = true;
};

struct ChannelRecord {
  int ell = 0;
  ShootingNullity shooting;
  std::optional<ChannelKernelReport> spectral;
  std::optional<LinearizedDecay> kernel_decay;
};

struct GeneratorCheck {
  int ell = 0;
  double residual = 0;         ///< channel-equation residual of the closed-form generator
  double mode_deviation = -1;  ///< spectral eigenvector against the generator; -1 if not computed
  double shooting_deviation = -1;
};


struct IdentityCase {
  std::string label;  ///< e.g. "ell0 generator", "ell2 basis (1,0)"
  ChannelSolution solution;
  IdentityReport report;
  std::vector<PohozaevSample> poho;
};

struct MonotonicityCase {
  int ell = 0;
  MonotonicityReport report;
  DivergenceWitness divergence;
};

/// Everything computed for one (N, p).
struct PointAnalysis {
  CriticalPair pair;
  GroundStateProfile profile;
  double ode_residual = 0;
  double scalar_reduction = 0;
  double quotient = 0;
  std::optional<DecayFit> decay;
  std::optional<BootstrapResult> bootstrap;
  std::vector<ChannelRecord> channels;
  std::vector<GeneratorCheck> generators;
  std::vector<IdentityCase> identities;
  std::vector<MonotonicityCase> monotonicity;
  std::optional<SignStructure> sign_structure;
  std::optional<InequalityTable> inequalities;
};

PointAnalysis analyze_point(const GroundStateProfile& profile, const RunConfig& config,
                            const AnalysisParts& parts = {});

/// Pass/fail per family of checks; unset when the part was not run.
struct PointVerdicts {
  std::optional<bool> nullity;      ///< shooting table equals [1, 1, 0, ...]
  std::optional<bool> agreement;    ///< spectral nullity equals shooting nullity on every channel
  std::optional<bool> generators;   ///< residuals <= 1e-6 and eigenvectors within 1e-3
  std::optional<bool> identities;   ///< derivative formulas, identity residuals, ell=1 exactness
  std::optional<bool> monotonicity; ///< strict monotonicity and divergence witness
  std::optional<bool> decay;        ///< far-field exponents
  std::optional<bool> bootstrap;
  bool all() const;
};

PointVerdicts judge(const PointAnalysis& a);

/// Deterministic JSON report of one point (no timings, no paths).
std::string point_report(const PointAnalysis& a);

/// Index/eigenvalue CSV of the full (+-) spectrum of one channel.
std::string spectrum_csv(const ChannelKernelReport& r);

struct PointSummary {
  PointSpec spec;
  std::string tag;
  std::string status;  ///< solved | cached | failed
  std::string error;
  std::string warning;
  std::filesystem::path dir;
  std::vector<std::string> artifacts;  ///< file names relative to dir
  std::vector<int> nullity_shooting, nullity_spectral;
  PointVerdicts verdicts;
  std::optional<DecayFit> decay;
  bool passed() const { return status != "failed" && verdicts.all(); }
};

struct SweepManifest {
  std::filesystem::path out_dir;
  std::vector<PointSummary> points;
  bool all_passed() const;
};

/// Resolves, solves or loads, analyzes and reports every configured point. Per-point failures
/// are recorded without aborting the sweep.
SweepManifest run(const RunConfig& config, const AnalysisParts& parts = {});

std::string manifest_json(const SweepManifest& m);

/// Ground state for a point honoring the cache policy. `status` is set to solved or cached and
/// `warning` to the reason a cached entry was rejected.
GroundStateProfile obtain_profile(const CriticalPair& pair, const RunConfig& config, const std::filesystem::path& dir,
                                  std::string& status, std::string& warning);

/// Two-column plot data next to each point's artifacts. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const SweepManifest& m);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct VerifySummary {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

/// Runs the acceptance checks; `line` receives one verdict line per criterion as it finishes.
VerifySummary verify_suite(const RunConfig& config, const std::function<void(const std::string&)>& line = {});

/// The four test points of the acceptance table.
std::vector<PointSpec> acceptance_points();

}  // namespace laneemden
