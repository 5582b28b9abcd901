#include "laneemden/hyperbola.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace laneemden {

namespace {

constexpr double kRegimeBand = 1e-12;

void check_dimension(int N) {
  if (N < 3) throw AdmissibilityError("dimension N must be at least 3, got " + std::to_string(N));
}

void fill_exponents(CriticalPair& c) {
  const double pq1 = c.p * c.q - 1.0;
  c.alpha = 2.0 * (c.p + 1.0) / pq1;
  c.beta = 2.0 * (c.q + 1.0) / pq1;
}

Regime regime_from_double(int N, double smaller) {
  const double s = static_cast<double>(N) / (N - 2);
  if (std::abs(smaller - s) <= kRegimeBand * s) return Regime::LogCase;
  return smaller < s ? Regime::SubSerrin : Regime::SuperSerrin;
}

Regime regime_from_rational(int N, Rational r) {
  // compare num/den with N/(N-2)
  const std::int64_t lhs = r.num * (N - 2);
  const std::int64_t rhs = r.den * N;
  if (lhs == rhs) return Regime::LogCase;
  return lhs < rhs ? Regime::SubSerrin : Regime::SuperSerrin;
}

Rational normalized(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::SubSerrin: return "SubSerrin";
    case Regime::LogCase: return "LogCase";
    case Regime::SuperSerrin: return "SuperSerrin";
  }
  return "unknown";
}

CriticalPair CriticalPair::canonical() const {
  if (is_canonical()) return *this;
  CriticalPair c = *this;
  std::swap(c.p, c.q);
  std::swap(c.alpha, c.beta);
  c.p_exact.reset();
  return c;
}

CriticalPair pair_from_p(int N, double p) {
  check_dimension(N);
  const double lo = 2.0 / (N - 2);
  if (!(p > lo) || !std::isfinite(p)) {
    throw AdmissibilityError("exponent p must exceed 2/(N-2) = " + std::to_string(lo));
  }
  CriticalPair c;
  c.N = N;
  c.p = p;
  // 1/(q+1) = (N-2)/N - 1/(p+1), written to avoid cancellation
  c.q = (2.0 * p + N + 2.0) / ((N - 2.0) * p - 2.0);
  fill_exponents(c);
  c.regime = regime_from_double(N, std::min(c.p, c.q));
  return c;
}

CriticalPair pair_from_p(int N, Rational p) {
  check_dimension(N);
  if (p.den == 0) throw AdmissibilityError("zero denominator in p");
  p = normalized(p.num, p.den);
  // p > 2/(N-2)  <=>  num (N-2) > 2 den
  if (p.num * (N - 2) <= 2 * p.den) {
    throw AdmissibilityError("exponent p must exceed 2/(N-2) = " + std::to_string(2.0 / (N - 2)));
  }
  CriticalPair c = pair_from_p(N, p.value());
  c.p_exact = p;
  const Rational q = normalized(2 * p.num + (N + 2) * p.den, (N - 2) * p.num - 2 * p.den);
  c.q = q.value();
  fill_exponents(c);
  c.regime = regime_from_rational(N, c.p <= c.q ? p : q);
  return c;
}

CriticalPair pair_from_text(int N, const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw AdmissibilityError("cannot parse exponent '" + text + "'");
    }
    return v;
  };
  if (slash != std::string::npos) {
    const std::string_view sv(text);
    return pair_from_p(N, Rational{parse_int(sv.substr(0, slash)), parse_int(sv.substr(slash + 1))});
  }
  if (text.find_first_of(".eE") == std::string::npos) {
    return pair_from_p(N, Rational{parse_int(text), 1});
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw AdmissibilityError("cannot parse exponent '" + text + "'");
  return pair_from_p(N, v);
}

double hyperbola_residual(const CriticalPair& c) {
  const double target = (c.N - 2.0) / c.N;
  return std::abs(1.0 / (c.p + 1.0) + 1.0 / (c.q + 1.0) - target) / target;
}

double scaling_exponent_identity(const CriticalPair& c) {
  return std::abs(c.alpha + c.beta - (c.N - 2.0));
}

InequalityLemma check_inequality_lemma(const CriticalPair& pair) {
  const CriticalPair c = pair.canonical();
  if (c.regime != Regime::SubSerrin) {
    throw AdmissibilityError("inequality lemma needs 2/(N-2) < p < N/(N-2); regime is " +
                             to_string(c.regime));
  }
  const double n2 = c.N - 2.0;
  InequalityLemma out;
  out.lhs = (c.p * n2 - 2.0) * (c.q - 1.0);
  out.mid = 4.0 - n2 * (c.p - 1.0);
  out.verdict = out.lhs > out.mid && out.mid > 2.0;
  return out;
}

BootstrapResult decay_bootstrap(const CriticalPair& pair, double eta) {
  if (!(eta > 0.0 && eta < 0.1)) throw std::invalid_argument("eta must lie in (0, 0.1)");
  const CriticalPair c = pair.canonical();
  const double n2 = c.N - 2.0;
  const bool sub = c.regime == Regime::SubSerrin;

  auto beta_next = [&](double a) {
    const double gain = sub ? (c.p * n2 - 2.0) * (c.q - 1.0) : n2 * (c.q - 1.0);
    return std::min(n2, gain - 2.0 + a) - eta;
  };
  auto alpha_next = [&](double b) { return std::min(n2, n2 * (c.p - 1.0) - 2.0 + b) - eta; };

  BootstrapResult r;
  r.alpha.push_back(0.0);
  constexpr int kMaxIter = 64;
  constexpr double kStable = 1e-14;
  for (int n = 0; n < kMaxIter; ++n) {
    r.beta.push_back(beta_next(r.alpha.back()));
    const double a = alpha_next(r.beta.back());
    const bool stable = std::abs(a - r.alpha.back()) <= kStable &&
                        (r.beta.size() < 2 || std::abs(r.beta.back() - r.beta[r.beta.size() - 2]) <= kStable);
    if (stable) break;
    r.alpha.push_back(a);
  }
  if (r.alpha.size() >= static_cast<std::size_t>(kMaxIter)) {
    throw std::runtime_error("decay bootstrap did not stabilize within 64 iterations");
  }
  r.alpha_limit = r.alpha.back();
  r.beta_limit = r.beta.back();
  r.alpha_expected = sub ? n2 * c.p - 2.0 : n2;
  r.beta_expected = n2;

  auto saturation_index = [](const std::vector<double>& s) {
    std::size_t i = 0;
    while (i < s.size() && std::abs(s[i] - s.back()) > 1e-14) ++i;
    return i;
  };
  auto increasing_until = [](const std::vector<double>& s, std::size_t stop) {
    for (std::size_t i = 1; i <= stop && i < s.size(); ++i) {
      if (!(s[i] > s[i - 1])) return false;
    }
    return true;
  };
  const std::size_t sa = saturation_index(r.alpha);
  const std::size_t sb = saturation_index(r.beta);
  r.steps_to_saturation = static_cast<int>(std::max(sa, sb)) + 1;
  r.strictly_increasing = increasing_until(r.alpha, sa) && increasing_until(r.beta, sb);
  return r;
}

}  // namespace laneemden
