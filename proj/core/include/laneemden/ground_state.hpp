#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "laneemden/hyperbola.hpp"
#include "laneemden/radial.hpp"

namespace laneemden {

struct RadialGrid {
  std::vector<double> nodes;

  static RadialGrid log_uniform(double r_start, double r_max, int per_decade);
  double r_start() const { return nodes.front(); }
  double r_max() const { return nodes.back(); }
  std::size_t size() const { return nodes.size(); }
  /// Spacing in log r if the nodes are log-uniform, NaN otherwise.
  double log_step() const;
  /// Throws std::invalid_argument when the grid is not strictly increasing.
  void validate() const;
};

/// A radial function with first and second derivative, defined on (0, r_end].
struct RadialFunction {
  std::function<std::array<double, 3>(double)> eval;
  double r_end = std::numeric_limits<double>::infinity();
  /// Interpolation nodes; the function is smooth between consecutive knots. May be empty.
  std::vector<double> knots;
};

/// u, v and derivatives at one radius. Second derivatives come from the ODE.
struct ProfilePoint {
  double u = 0, du = 0, d2u = 0;
  double v = 0, dv = 0, d2v = 0;
};

/// Far-field model used beyond the last node. The component with the smaller
/// exponent ("slow") may carry a slower particular term or a log correction.
struct FarField {
  int N = 0;
  bool slow_is_u = true;
  double e_slow = 0, e_fast = 0;  ///< source exponents of the slow / fast equation
  bool log_case = false;
  double b = 0;        ///< fast ~ b r^{2-N} + D r^{2-j_fast}
  double D = 0, j_fast = 0;
  double A = 0;        ///< slow ~ A r^{2-N} + C r^{2-j_slow}, or L r^{2-N} log r + A r^{2-N}
  double C = 0, j_slow = 0;
  double L = 0;

  /// {slow, slow', slow'', fast, fast', fast''}
  std::array<double, 6> eval(double r) const;
};

class GroundStateProfile {
 public:
  CriticalPair pair;
  RadialGrid grid;
  std::vector<double> u, v, du, dv;
  double gamma_star = 0.0;
  double u0 = 1.0;
  double rtol = 1e-12;

  /// Builds interpolation tables and the far-field model; call after filling the arrays.
  void finalize();
  ProfilePoint at(double r) const;
  const FarField& far_field() const { return tail_; }
  /// Copy restricted to the nodes up to the first one at or beyond r_cut.
  GroundStateProfile truncated(double r_cut) const;
  RadialFunction component_u() const;
  RadialFunction component_v() const;
  /// Potentials p v^{p-1}, q u^{q-1} at r.
  std::pair<double, double> potentials(double r) const;

 private:
  HermiteTrack tu_, tv_;
  FarField tail_;
};

enum class Classification { UHitZero, VHitZero, Survived };
std::string to_string(Classification c);

struct ShootingOutcome {
  Classification classification = Classification::Survived;
  double r_event = std::numeric_limits<double>::infinity();
};

struct RadialTrajectory {
  std::vector<double> r, u, du, v, dv;
  ShootingOutcome outcome;
};

struct SolverOptions {
  double rtol = 1e-12;
  double r_start = 1e-3;
  double r_max = 1e3;
  int per_decade = 400;
  double classify_horizon = 1e15;  ///< radius out to which bisection runs are classified
  double bisection_width = 1e-15;  ///< relative bracket width at which bisection stops
};

/// Fourth-order Taylor start {u, u', v, v'} at r.
State<4> series_start(const CriticalPair& pair, double u0, double v0, double r);

/// Integrates from the series start to r_end, stopping at the first zero of u or v.
/// Samples are recorded at `nodes` (if given) up to the stopping radius.
RadialTrajectory integrate_radial(const CriticalPair& pair, double u0, double gamma, double r_end,
                                  const SolverOptions& opt = {},
                                  const std::vector<double>* nodes = nullptr);

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GroundStateProfile shoot_bisection(const CriticalPair& pair, double u0, double gamma_lo,
                                   double gamma_hi, const SolverOptions& opt = {});

/// Bisection with a bracket found by geometric expansion around gamma = 1.
GroundStateProfile solve_ground_state(const CriticalPair& pair, const SolverOptions& opt = {});

/// Integrates the profile at a known gamma onto the log-uniform grid of `opt`.
GroundStateProfile profile_at(const CriticalPair& pair, double u0, double gamma, const SolverOptions& opt);

/// Number of shooting solves since process start.
std::uint64_t solver_invocations();

GroundStateProfile rescale_profile(const GroundStateProfile& profile, double delta);

struct DecayFit {
  double u_exponent = 0, v_exponent = 0;
  double a_p = 0, b_p = 0;
  bool log_flag = false;
  double expected_u_exponent = 0, expected_v_exponent = 0;
  double fit_residual = 0;  ///< rms of the log-log residuals
  double log_drift = 0;     ///< relative change of the log coefficient across the last decade
  double ratio_drift = 0;   ///< spread of r^{N-2} u / log r over the last decade
  double window_lo = 0, window_hi = 0;
};

/// Log-log least squares on the outer 30% of the radial range.
DecayFit fit_decay(const GroundStateProfile& profile);

/// Minimization quotient of a radial function.
double sobolev_quotient(const CriticalPair& pair, const RadialFunction& f);
double sobolev_quotient(const GroundStateProfile& profile);

/// Residual of the equivalent scalar equation with v recovered from u.
double check_scalar_reduction(const GroundStateProfile& profile);

/// Maximum relative residual of the radial system over interior nodes (finite differences).
double ode_residual(const GroundStateProfile& profile);

/// Positivity and strict decrease at every node.
bool profile_shape_ok(const GroundStateProfile& profile);

}  // namespace laneemden
