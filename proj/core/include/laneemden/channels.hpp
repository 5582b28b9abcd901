#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "laneemden/ground_state.hpp"

namespace laneemden {

/// Solution (psi, phi) of the channel-ell linearized pair on the profile grid.
struct ChannelSolution {
  int ell = 0;
  double a = 0, b = 0;  ///< leading r^ell coefficients at the origin
  std::vector<double> r, psi, dpsi, d2psi, phi, dphi, d2phi;
  // far-field frame coefficients from extract_connection
  double A_psi = 0, B_psi = 0, A_phi = 0, B_phi = 0;
  double fit_disagreement = 0;

  std::size_t size() const { return r.size(); }
  double r_max() const { return r.back(); }
  RadialFunction psi_fn() const;
  RadialFunction phi_fn() const;
};

struct ChannelOptions {
  double rtol = 1e-12;
  double r_match = 1.0;    ///< radius at which the bilinear form is evaluated
  double R_far = 1e10;     ///< start radius of the inward decaying runs
  double null_threshold = 1e-6;
};

/// Fills psi'' and phi'' from the channel equations.
void fill_second_derivatives(const GroundStateProfile& profile, ChannelSolution& s);

ChannelSolution known_generators(const GroundStateProfile& profile, int ell);

ChannelSolution integrate_linearized(const GroundStateProfile& profile, int ell, double a, double b,
                                     const ChannelOptions& opt = {});

struct ConnectionFit {
  double A_psi = 0, B_psi = 0, A_phi = 0, B_phi = 0;
  double disagreement = 0;  ///< two-radius fit against the derivative-based extraction
  bool consistent() const { return disagreement <= 0.01; }
};

/// Coefficients in the far-field frame r^ell, r^{-(ell+N-2)} from values at 0.8 r_max and r_max.
ConnectionFit extract_connection(const ChannelSolution& s, int N);

struct ConnectionMatrix {
  int ell = 0;
  std::array<std::array<double, 2>, 2> entries{};  ///< column j = (A_psi, A_phi) of basis start j
  std::array<double, 2> singular_values{};          ///< descending
  std::array<double, 2> null_direction{};           ///< right singular vector of the smallest value
  double margin() const { return singular_values[0] > 0 ? singular_values[1] / singular_values[0] : 0.0; }
};

struct ShootingNullity {
  int nullity = 0;
  ConnectionMatrix matrix;
  std::optional<ChannelSolution> kernel;  ///< reconstructed solution when nullity == 1
};

/// Growing-mode coefficients of a regular solution from the conserved bilinear form
/// against an orthonormalized pair of decaying solutions. Returns {A_psi, A_phi}.
std::array<double, 2> growth_coefficients(const GroundStateProfile& profile, const ChannelSolution& s,
                                          const ChannelOptions& opt = {});

ShootingNullity kernel_nullity_shooting(const GroundStateProfile& profile, int ell, const ChannelOptions& opt = {});

/// Maximum relative residual of the channel equations on interior nodes (finite differences in log r).
double channel_residual(const GroundStateProfile& profile, const ChannelSolution& s);

struct MonotonicityReport {
  bool strictly_monotone = false;
  int direction = 0;          ///< +1 increasing, -1 decreasing (of r^{-ell} psi as computed)
  int sign_changes = 0;
  bool phi_decreasing = false;    ///< (r^{-ell} phi)' < 0 after sign normalization
  bool psi_increasing_on_positivity = false;
  double positivity_end = 0;      ///< end of the interval where r^{-ell} psi > 0 (r_max if none)
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

MonotonicityReport monotonicity_check(const ChannelSolution& s);

struct LinearizedDecay {
  double psi_exponent = 0, phi_exponent = 0;
  double psi_log_exponent = 0;  ///< exponent of |psi| / log r (log-corrected fit)
  double psi_bound = 0, phi_bound = 0;
  bool bound_satisfied = false;
};

LinearizedDecay verify_linearized_decay(const ChannelSolution& s, const CriticalPair& pair, double eta = 0.05);

/// max |x - c g| / max |g| over both components after least-squares scaling.
double scaled_deviation(const ChannelSolution& x, const ChannelSolution& g);

}  // namespace laneemden
