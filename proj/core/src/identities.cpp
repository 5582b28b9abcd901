#include "laneemden/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace laneemden {

namespace {

inline double spow(double x, double e) { return std::copysign(std::pow(std::abs(x), e), x); }

// Hermite tracks of one channel solution, built once
struct SolutionTracks {
  HermiteTrack psi, phi;
  explicit SolutionTracks(const ChannelSolution& s)
      : psi(s.r, s.psi, s.dpsi, s.d2psi), phi(s.r, s.phi, s.dphi, s.d2phi) {}
};

void require_in_range(const ChannelSolution& s, double R) {
  if (!(R >= s.r.front() * (1 - 1e-12) && R <= s.r.back() * (1 + 1e-12))) {
    throw std::out_of_range("radius outside the solution grid");
  }
}

BoundaryTerms boundary_terms(const GroundStateProfile& prof, const SolutionTracks& tr, double R) {
  const CriticalPair& c = prof.pair;
  const auto g = prof.at(R);
  const auto psi = tr.psi(R), phi = tr.phi(R);
  const double d2v = -(c.N - 1.0) / R * g.dv - spow(g.u, c.q);
  const double d2u = -(c.N - 1.0) / R * g.du - spow(g.v, c.p);
  const double w = std::pow(R, c.N - 1);
  BoundaryTerms b;
  b.I1 = w * (d2v * psi[0] - g.dv * psi[1]);
  b.I2 = w * (d2u * phi[0] - g.du * phi[1]);
  b.scale = w * std::max({std::abs(d2v * psi[0]), std::abs(g.dv * psi[1]), std::abs(d2u * phi[0]),
                          std::abs(g.du * phi[1])});
  return b;
}

// 5-point Gauss-Legendre in log r on each grid interval overlapping [a, b]
template <class F>
double integrate_on_nodes(const std::vector<double>& nodes, F&& g, double a, double b) {
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                              0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  double total = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double lo = std::max(a, nodes[i]), hi = std::min(b, nodes[i + 1]);
    if (!(hi > lo)) continue;
    const double la = std::log(lo), lb = std::log(hi);
    const double half = 0.5 * (lb - la), mid = 0.5 * (lb + la);
    for (int k = 0; k < 5; ++k) {
      const double r = std::exp(mid + half * x[k]);
      total += half * w[k] * g(r) * r;
    }
  }
  return total;
}

double pohozaev_integral(const GroundStateProfile& prof, const ChannelSolution& s, const SolutionTracks& tr,
                         double R) {
  const CriticalPair& c = prof.pair;
  const double coef = pohozaev_coefficient(c.N, s.ell);
  if (coef == 0.0) return 0.0;
  const double r0 = s.r.front();
  // series piece: u' ~ -gamma^p r/N, v' ~ -u0^q r/N, (psi, phi) ~ (a, b) r^ell
  const double lead = -(std::pow(prof.gamma_star, c.p) * s.b + std::pow(prof.u0, c.q) * s.a) / c.N;
  const double origin = lead * std::pow(r0, s.ell + c.N - 1) / (s.ell + c.N - 1.0);
  auto g = [&](double r) {
    const auto pt = prof.at(r);
    return (pt.du * tr.phi(r)[0] + pt.dv * tr.psi(r)[0]) * std::pow(r, c.N - 3);
  };
  return coef * (origin + integrate_on_nodes(s.r, g, r0, R));
}

double lp_integral(const RadialFunction& f, double lo, double hi, int N, const std::function<double(double, const std::array<double, 3>&)>& h) {
  return integrate_log_piecewise([&](double r) { return h(r, f.eval(r)) * std::pow(r, N - 1); }, lo, hi, f.knots, 1e-10);
}

}  // namespace

double pohozaev_coefficient(int N, int ell) { return ell * (ell + N - 2.0) - (N - 1.0); }

BoundaryTerms compute_I(const GroundStateProfile& prof, const ChannelSolution& s, double R) {
  require_in_range(s, R);
  return boundary_terms(prof, SolutionTracks(s), R);
}

DerivativeResiduals check_derivative_formulas(const GroundStateProfile& prof, const ChannelSolution& s) {
  const CriticalPair& c = prof.pair;
  const std::size_t n = s.size();
  if (n < 16) throw std::invalid_argument("solution grid too short");
  const SolutionTracks tr(s);
  const double coef = pohozaev_coefficient(c.N, s.ell);
  std::vector<double> I1(n), I2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = boundary_terms(prof, tr, s.r[i]);
    I1[i] = b.I1;
    I2[i] = b.I2;
  }
  const double h = std::log(s.r[1] / s.r[0]);
  const auto d1 = uniform_derivative(I1, h), d2 = uniform_derivative(I2, h);
  DerivativeResiduals out;
  for (std::size_t i = 3; i + 3 < n; ++i) {
    const double r = s.r[i];
    const auto g = prof.at(r);
    const double P = c.p * std::pow(std::abs(g.v), c.p - 1.0), Q = c.q * std::pow(std::abs(g.u), c.q - 1.0);
    const double w = std::pow(r, c.N - 1);
    const double a1 = -Q * g.du * s.psi[i] * w, a2 = P * g.dv * s.phi[i] * w;
    const double a3 = -coef * g.dv * s.psi[i] / (r * r) * w;
    const double b3 = -coef * g.du * s.phi[i] / (r * r) * w;
    // d/dr = (d/d log r) / r; the two coupling terms appear with opposite signs in I2'
    const double e1 = std::abs(d1[i] / r - (a1 + a2 + a3)) / (std::abs(a1) + std::abs(a2) + std::abs(a3) + 1e-300);
    const double e2 = std::abs(d2[i] / r - (-a2 - a1 + b3)) / (std::abs(a1) + std::abs(a2) + std::abs(b3) + 1e-300);
    out.I1 = std::max(out.I1, e1);
    out.I2 = std::max(out.I2, e2);
  }
  return out;
}

double pohozaev_integral(const GroundStateProfile& prof, const ChannelSolution& s, double R) {
  require_in_range(s, R);
  return pohozaev_integral(prof, s, SolutionTracks(s), R);
}

std::vector<PohozaevSample> check_poho_identity(const GroundStateProfile& prof, const ChannelSolution& s,
                                                const std::vector<double>& radii) {
  const SolutionTracks tr(s);
  std::vector<PohozaevSample> out;
  for (double R : radii) {
    require_in_range(s, R);
    const auto b = boundary_terms(prof, tr, R);
    PohozaevSample smp;
    smp.R = R;
    smp.lhs = b.sum();
    smp.integral = pohozaev_integral(prof, s, tr, R);
    const double scale = std::max(b.scale, std::abs(smp.integral));
    smp.residual = scale > 0 ? std::abs(smp.lhs + smp.integral) / scale : 0.0;
    out.push_back(smp);
  }
  return out;
}

SignStructure check_sign_structure(const GroundStateProfile& prof, const ChannelSolution& s) {
  if (s.ell < 2) throw std::invalid_argument("sign structure applies to channels ell >= 2");
  const std::size_t n = s.size();
  const SolutionTracks tr(s);
  SignStructure rep;
  rep.sigma = s.psi.front() < 0 ? -1.0 : 1.0;
  auto first_zero = [&](const std::vector<double>& f) -> std::optional<double> {
    const double start = rep.sigma * f.front() >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i < n; ++i) {
      if (start * rep.sigma * f[i] <= 0) {
        const double t = f[i - 1] / (f[i - 1] - f[i]);
        return s.r[i - 1] + t * (s.r[i] - s.r[i - 1]);
      }
    }
    return std::nullopt;
  };
  rep.r1 = first_zero(s.psi);
  rep.r2 = first_zero(s.phi);
  rep.phi_positive_near_zero = rep.sigma * s.phi.front() > 0;
  const double inf = std::numeric_limits<double>::infinity();
  const double m = std::min(rep.r1.value_or(inf), rep.r2.value_or(inf));
  rep.R = std::isfinite(m) ? m : s.r_max();
  rep.phi_positive_before_min = true;
  for (std::size_t i = 0; i < n && s.r[i] < m; ++i) {
    if (rep.sigma * s.phi[i] <= 0) {
      rep.phi_positive_before_min = false;
      break;
    }
  }
  if (std::isfinite(m)) {
    const bool psi_first = rep.r1.value_or(inf) < rep.r2.value_or(inf);
    const double lo = m, hi = psi_first ? rep.r2.value_or(s.r_max()) : rep.r1.value_or(s.r_max());
    const std::vector<double>& f = psi_first ? s.psi : s.phi;
    for (std::size_t i = 0; i < n; ++i) {
      if (s.r[i] > lo * (1 + 1e-9) && s.r[i] < hi * (1 - 1e-9) && rep.sigma * f[i] >= 0) {
        rep.outside_signs_hold = false;
        break;
      }
    }
  }
  rep.integral_at_R = rep.sigma * pohozaev_integral(prof, s, tr, rep.R);
  rep.integral_negative = rep.integral_at_R < 0;
  rep.lhs_at_R = rep.sigma * boundary_terms(prof, tr, rep.R).sum();
  for (double f : {0.125, 0.25, 0.5, 1.0}) {
    const double R = f * s.r_max();
    if (R < s.r.front()) continue;
    rep.tail_radii.push_back(R);
    rep.tail_lhs.push_back(rep.sigma * boundary_terms(prof, tr, R).sum());
  }
  rep.tail_away_from_zero = rep.tail_lhs.size() >= 2;
  for (std::size_t i = 1; i < rep.tail_lhs.size(); ++i) {
    if (!(std::abs(rep.tail_lhs[i]) > std::abs(rep.tail_lhs[i - 1]))) rep.tail_away_from_zero = false;
  }
  if (!rep.phi_positive_near_zero) {
    rep.note = "phi is not positive near the origin after normalizing psi; the sign argument does not apply";
  } else if (!std::isfinite(m)) {
    rep.note = "no finite zero observed up to r_max";
  }
  return rep;
}

GridFunction profile_component(const GroundStateProfile& prof, bool want_u) {
  const CriticalPair& c = prof.pair;
  GridFunction g;
  g.r = prof.grid.nodes;
  const std::size_t n = g.r.size();
  g.f = want_u ? prof.u : prof.v;
  g.df = want_u ? prof.du : prof.dv;
  g.d2f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double other = want_u ? spow(prof.v[i], c.p) : spow(prof.u[i], c.q);
    g.d2f[i] = -(c.N - 1.0) / g.r[i] * g.df[i] - other;
  }
  return g;
}

GridFunction solution_component(const ChannelSolution& s, bool want_psi) {
  GridFunction g;
  g.r = s.r;
  g.f = want_psi ? s.psi : s.phi;
  g.df = want_psi ? s.dpsi : s.dphi;
  g.d2f = want_psi ? s.d2psi : s.d2phi;
  return g;
}

namespace {

// Simpson in log r on a log-uniform grid, trapezoid on a trailing odd interval
double integrate_samples(const std::vector<double>& r, const std::vector<double>& y, std::size_t count) {
  if (count < 2) return 0.0;
  const double h = std::log(r[1] / r[0]);
  double total = 0;
  std::size_t i = 0;
  for (; i + 2 < count; i += 2) total += h / 3.0 * (y[i] * r[i] + 4.0 * y[i + 1] * r[i + 1] + y[i + 2] * r[i + 2]);
  if (i + 1 < count) total += 0.5 * h * (y[i] * r[i] + y[i + 1] * r[i + 1]);
  return total;
}

}  // namespace

EnergyNorm energy_norm(const GridFunction& f, int N, int ell, double s) {
  const std::size_t n = f.r.size();
  const double lam = ell * (ell + N - 2.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = f.r[i];
    const double L = f.d2f[i] + (N - 1.0) * f.df[i] / r - lam * f.f[i] / (r * r);
    y[i] = std::pow(std::abs(L), s) * std::pow(r, N - 1);
  }
  const double total = integrate_samples(f.r, y, n);
  std::size_t cut = 0;
  while (cut < n && f.r[cut] < f.r.back() / 10.0) ++cut;
  const double head = integrate_samples(f.r, y, cut + 1);
  EnergyNorm out;
  out.value = std::pow(total, 1.0 / s);
  out.diverging = total > 0 && (total - head) > 0.5 * total;
  return out;
}

double truncated_energy_norm(const GridFunction& f, int N, int ell, double s, double R) {
  if (R > f.r.back() * (1 + 1e-12)) throw std::out_of_range("cutoff radius beyond the sampled range");
  const double lam = ell * (ell + N - 2.0);
  std::vector<double> y;
  std::vector<double> rr;
  for (std::size_t i = 0; i < f.r.size() && f.r[i] <= R; ++i) {
    const double r = f.r[i];
    double chi = 1, dchi = 0, d2chi = 0;
    if (r > 0.5 * R) {
      const double x = (r - 0.5 * R) / (0.5 * R);
      chi = 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
      dchi = -30.0 * x * x * (1 - x) * (1 - x) * (2.0 / R);
      d2chi = -60.0 * x * (1 - x) * (1 - 2 * x) * (4.0 / (R * R));
    }
    const double Lf = f.d2f[i] + (N - 1.0) * f.df[i] / r - lam * f.f[i] / (r * r);
    const double L = chi * Lf + 2.0 * dchi * f.df[i] + f.f[i] * (d2chi + (N - 1.0) * dchi / r);
    y.push_back(std::pow(std::abs(L), s) * std::pow(r, N - 1));
    rr.push_back(r);
  }
  return std::pow(integrate_samples(rr, y, y.size()), 1.0 / s);
}

DivergenceWitness energy_divergence(const GridFunction& f, int N, int ell, double s, const std::vector<double>& radii) {
  DivergenceWitness w;
  w.radii = radii;
  for (double R : radii) w.norms.push_back(truncated_energy_norm(f, N, ell, s, R));
  w.growth = w.norms.front() > 0 ? w.norms.back() / w.norms.front() : std::numeric_limits<double>::infinity();
  return w;
}

std::pair<double, double> gradient_exponents(const CriticalPair& c) {
  return {c.q / (c.q + 1.0) - 1.0 / c.N, c.p / (c.p + 1.0) - 1.0 / c.N};
}

InequalityTable inequality_ratios(const GroundStateProfile& prof, const std::vector<ChannelSolution>& kernels) {
  const CriticalPair& c = prof.pair;
  const int N = c.N;
  InequalityTable tab;
  std::tie(tab.inv_s, tab.inv_t) = gradient_exponents(c);
  tab.exponent_defect = std::abs(tab.inv_s + tab.inv_t - 1.0);
  const double sp = (c.p + 1.0) / c.p, sq = (c.q + 1.0) / c.q;
  const double s = 1.0 / tab.inv_s, t = 1.0 / tab.inv_t;

  auto row = [&](const std::string& name, int ell, const RadialFunction& f, double lo, double hi, bool p_side) {
    const double lam = ell * (ell + N - 2.0);
    auto lap = [&](double r, const std::array<double, 3>& e) {
      return std::abs(e[2] + (N - 1.0) * e[1] / r - lam * e[0] / (r * r));
    };
    InequalityRow out;
    out.function = name;
    out.ell = ell;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.sobolev_lower = out.hardy = out.sobolev_grad_t = out.sobolev_grad_s = nan;
    if (p_side) {
      const double E = std::pow(lp_integral(f, lo, hi, N, [&](double r, auto& e) { return std::pow(lap(r, e), sp); }), 1.0 / sp);
      const double Lq = std::pow(lp_integral(f, lo, hi, N, [&](double, auto& e) { return std::pow(std::abs(e[0]), c.q + 1.0); }),
                                 1.0 / (c.q + 1.0));
      const double Gt = std::pow(lp_integral(f, lo, hi, N, [&](double, auto& e) { return std::pow(std::abs(e[1]), t); }), 1.0 / t);
      out.sobolev_lower = E / Lq;
      out.sobolev_grad_t = E / Gt;
    } else {
      const double E = std::pow(lp_integral(f, lo, hi, N, [&](double r, auto& e) { return std::pow(lap(r, e), sq); }), 1.0 / sq);
      const double H = std::pow(lp_integral(f, lo, hi, N, [&](double r, auto& e) { return std::pow(std::abs(e[1]) / r, sq); }),
                                1.0 / sq);
      const double Gs = std::pow(lp_integral(f, lo, hi, N, [&](double, auto& e) { return std::pow(std::abs(e[1]), s); }), 1.0 / s);
      out.hardy = E / H;
      out.sobolev_grad_s = E / Gs;
    }
    return out;
  };
  tab.rows.push_back(row("u", 0, prof.component_u(), 1e-8, 1e12, true));
  tab.rows.push_back(row("v", 0, prof.component_v(), 1e-8, 1e12, false));
  for (const auto& k : kernels) {
    tab.rows.push_back(row("psi", k.ell, k.psi_fn(), k.r.front(), k.r.back(), true));
    tab.rows.push_back(row("phi", k.ell, k.phi_fn(), k.r.front(), k.r.back(), false));
  }
  return tab;
}

double integrability_tail(const GroundStateProfile& prof, const ChannelSolution& s, double R) {
  require_in_range(s, R);
  require_in_range(s, 0.5 * R);
  const SolutionTracks tr(s);
  return integrate_on_nodes(
      s.r,
      [&](double r) {
        const auto b = boundary_terms(prof, tr, r);
        return std::abs(b.I1) + std::abs(b.I2);
      },
      0.5 * R, R);
}

IdentityReport identity_report(const GroundStateProfile& prof, const ChannelSolution& s,
                               const std::vector<double>& radii) {
  IdentityReport rep;
  rep.pair = prof.pair;
  rep.ell = s.ell;
  std::vector<double> inside;
  for (double R : radii) {
    if (R >= s.r.front() && R <= s.r.back()) inside.push_back(R);
  }
  const SolutionTracks tr(s);
  for (double R : inside) {
    const auto b = boundary_terms(prof, tr, R);
    rep.radii.push_back(R);
    rep.I1_values.push_back(b.I1);
    rep.I2_values.push_back(b.I2);
  }
  rep.derivative_residuals = check_derivative_formulas(prof, s);
  for (const auto& smp : check_poho_identity(prof, s, inside)) rep.poho_residuals.push_back(smp.residual);
  rep.integrability_tail = integrability_tail(prof, s, s.r_max());
  const CriticalPair& c = prof.pair;
  rep.energy_norms["psi"] = energy_norm(solution_component(s, true), c.N, s.ell, (c.p + 1.0) / c.p).value;
  rep.energy_norms["phi"] = energy_norm(solution_component(s, false), c.N, s.ell, (c.q + 1.0) / c.q).value;
  return rep;
}

}  // namespace laneemden
