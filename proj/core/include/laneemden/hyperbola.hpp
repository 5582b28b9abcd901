#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace laneemden {

enum class Regime { SubSerrin, LogCase, SuperSerrin };

std::string to_string(Regime r);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Point (N, p, q) on 1/(p+1) + 1/(q+1) = (N-2)/N with its scaling exponents.
///
/// The regime is decided by the smaller of the two exponents, which is the one
/// that controls the slow far-field law.
struct CriticalPair {
  int N = 0;
  double p = 0.0;
  double q = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Regime regime = Regime::SuperSerrin;
  std::optional<Rational> p_exact;  ///< set when p was given as an integer ratio

  /// Same point with p <= q (roles of the two equations interchanged if needed).
  CriticalPair canonical() const;
  bool is_canonical() const { return p <= q; }
  double serrin_exponent() const { return static_cast<double>(N) / (N - 2); }
};

class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

CriticalPair pair_from_p(int N, double p);
CriticalPair pair_from_p(int N, Rational p);

/// Parses "3", "2.5" or "11/4".
CriticalPair pair_from_text(int N, const std::string& p_text);

double hyperbola_residual(const CriticalPair& pair);
double scaling_exponent_identity(const CriticalPair& pair);

struct InequalityLemma {
  double lhs = 0.0;
  double mid = 0.0;
  bool verdict = false;
};

/// Requires the canonical pair to be in the SubSerrin regime.
InequalityLemma check_inequality_lemma(const CriticalPair& pair);

struct BootstrapResult {
  std::vector<double> alpha;  ///< alpha_1, alpha_2, ...
  std::vector<double> beta;   ///< beta_1, beta_2, ...
  double alpha_limit = 0.0;
  double beta_limit = 0.0;
  double alpha_expected = 0.0;  ///< eta -> 0 limit
  double beta_expected = 0.0;
  int steps_to_saturation = 0;
  bool strictly_increasing = false;
};

/// Decay-rate bootstrap on the canonical pair (q >= p), started from alpha_1 = 0.
BootstrapResult decay_bootstrap(const CriticalPair& pair, double eta = 1e-3);

}  // namespace laneemden
