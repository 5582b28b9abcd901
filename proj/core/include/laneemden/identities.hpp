#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laneemden/channels.hpp"

namespace laneemden {

/// The boundary quantities I1 = R^{N-1}(v'' psi - v' psi'), I2 = R^{N-1}(u'' phi - u' phi').
struct BoundaryTerms {
  double I1 = 0, I2 = 0;
  double scale = 0;  ///< largest single product entering I1 or I2
  double sum() const { return I1 + I2; }
};

BoundaryTerms compute_I(const GroundStateProfile& profile, const ChannelSolution& s, double R);

/// ell(ell+N-2) - (N-1), the coefficient of the identity's right side.
double pohozaev_coefficient(int N, int ell);

struct DerivativeResiduals {
  double I1 = 0, I2 = 0;  ///< max relative mismatch of dI/dr against the closed-form derivative
};

DerivativeResiduals check_derivative_formulas(const GroundStateProfile& profile, const ChannelSolution& s);

struct PohozaevSample {
  double R = 0;
  double lhs = 0;       ///< I1 + I2
  double integral = 0;  ///< int_0^R c (u' phi + v' psi) r^{N-3} dr; rhs = -integral
  double residual = 0;  ///< |lhs + integral| over the largest single term
};

/// int_0^R c_ell (u' phi + v' psi) r^{N-3} dr including the series piece below the first node.
double pohozaev_integral(const GroundStateProfile& profile, const ChannelSolution& s, double R);

std::vector<PohozaevSample> check_poho_identity(const GroundStateProfile& profile, const ChannelSolution& s,
                                                const std::vector<double>& radii);

struct SignStructure {
  double sigma = 1;                ///< global sign making psi positive near the origin
  std::optional<double> r1, r2;    ///< first zeros of psi, phi (normalized); empty if none up to r_max
  bool phi_positive_near_zero = false;
  bool phi_positive_before_min = false;  ///< phi > 0 on (0, min(r1, r2))
  bool outside_signs_hold = true;        ///< psi < 0 on (r1,r2) or phi < 0 on (r2,r1) when finite
  double R = 0;                          ///< min(r1, r2), or r_max when no finite zero
  double integral_at_R = 0;
  bool integral_negative = false;
  double lhs_at_R = 0;
  std::vector<double> tail_radii, tail_lhs;  ///< I1 + I2 approaching r_max
  bool tail_away_from_zero = false;          ///< |I1 + I2| increasing toward r_max
  std::string note;
};

/// Sign facts used to exclude channels ell >= 2. Never throws on failed sign assumptions;
/// those are reported in the fields.
SignStructure check_sign_structure(const GroundStateProfile& profile, const ChannelSolution& s);

/// Samples of a radial function with first and second derivatives.
struct GridFunction {
  std::vector<double> r, f, df, d2f;
};

GridFunction profile_component(const GroundStateProfile& profile, bool want_u);
GridFunction solution_component(const ChannelSolution& s, bool want_psi);

struct EnergyNorm {
  double value = 0;
  bool diverging = false;  ///< the last decade carries more than half of the integral
};

/// (int |f'' + (N-1) f'/r - ell(ell+N-2) f/r^2|^s r^{N-1} dr)^{1/s} over the sampled range.
EnergyNorm energy_norm(const GridFunction& f, int N, int ell, double s);

/// The same norm of chi_R f, with chi_R a smooth cutoff equal to 1 on [0, R/2] and 0 beyond R.
double truncated_energy_norm(const GridFunction& f, int N, int ell, double s, double R);

struct DivergenceWitness {
  std::vector<double> radii, norms;
  double growth = 0;  ///< norm at the last radius over norm at the first
  bool diverges(double factor = 1.5) const { return growth > factor; }
};

DivergenceWitness energy_divergence(const GridFunction& f, int N, int ell, double s,
                                    const std::vector<double>& radii = {50.0, 100.0, 200.0});

struct InequalityRow {
  std::string function;  ///< "u", "v", "psi", "phi"
  int ell = 0;
  double sobolev_lower = 0;   ///< ||f||_{E^{(p+1)/p}} / ||f||_{L^{q+1}}
  double hardy = 0;           ///< ||f||_{E^{(q+1)/q}} / ||f'/r||_{L^{(q+1)/q}}
  double sobolev_grad_t = 0;  ///< ||f||_{E^{(p+1)/p}} / ||f'||_{L^t}
  double sobolev_grad_s = 0;  ///< ||f||_{E^{(q+1)/q}} / ||f'||_{L^s}
};

struct InequalityTable {
  double inv_s = 0, inv_t = 0;
  double exponent_defect = 0;  ///< |1/s + 1/t - 1|
  std::vector<InequalityRow> rows;
};

/// Exponents of the gradient embeddings: 1/s = q/(q+1) - 1/N, 1/t = p/(p+1) - 1/N.
std::pair<double, double> gradient_exponents(const CriticalPair& pair);

InequalityTable inequality_ratios(const GroundStateProfile& profile, const std::vector<ChannelSolution>& kernels);

/// int (|I1| + |I2|) dr over [R/2, R].
double integrability_tail(const GroundStateProfile& profile, const ChannelSolution& s, double R);

struct IdentityReport {
  CriticalPair pair;
  int ell = 0;
  std::vector<double> radii, I1_values, I2_values;
  DerivativeResiduals derivative_residuals;
  std::vector<double> poho_residuals;
  double integrability_tail = 0;
  std::map<std::string, double> energy_norms;  ///< keyed "psi:s" / "phi:s"
};

IdentityReport identity_report(const GroundStateProfile& profile, const ChannelSolution& s,
                               const std::vector<double>& radii = {1.0, 5.0, 20.0});

}  // namespace laneemden
