#include "laneemden/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

namespace laneemden {

namespace {

struct ReferenceRule {
  std::vector<double> x, w;
};

double lagrange_basis(const std::vector<double>& x, std::size_t j, double y) {
  double v = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k != j) v *= (y - x[k]) / (x[j] - x[k]);
  }
  return v;
}

ReferenceRule reference_rule(int n) {
  ReferenceRule ref;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it != 0.0) ref.x.push_back(-*it);
  }
  for (double z : zeros) ref.x.push_back(z);
  for (double x : ref.x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    ref.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return ref;
}

SpectralGrid from_edges(int N, double L, int per_panel, std::vector<double> edges) {
  SpectralGrid g;
  g.N = N;
  g.L = L;
  g.per_panel = per_panel;
  g.panel_edges = std::move(edges);
  const ReferenceRule ref = reference_rule(per_panel);
  for (std::size_t p = 0; p + 1 < g.panel_edges.size(); ++p) {
    const double a = g.panel_edges[p], b = g.panel_edges[p + 1];
    for (int k = 0; k < per_panel; ++k) {
      const double t = a + 0.5 * (b - a) * (ref.x[k] + 1.0);
      const double arg = 0.5 * std::numbers::pi * t;
      const double r = L * std::tan(arg);
      const double jac = 0.5 * std::numbers::pi * L * (1.0 + (r / L) * (r / L));
      g.t.push_back(t);
      g.r.push_back(r);
      g.w.push_back(0.5 * (b - a) * ref.w[k]);
      g.jac.push_back(jac);
      g.weight.push_back(std::pow(r, N - 1) * jac * g.w.back());
    }
  }
  return g;
}

Eigen::MatrixXd symmetric_block(const GroundStateProfile& prof, int ell, const SpectralGrid& grid,
                                std::vector<double>& P, std::vector<double>& Q, DenseMatrix& G) {
  const std::size_t M = grid.size();
  G = green_matrix(grid, ell);
  P.resize(M);
  Q.resize(M);
  for (std::size_t i = 0; i < M; ++i) std::tie(P[i], Q[i]) = prof.potentials(grid.r[i]);
  Eigen::MatrixXd B(M, M);
  for (std::size_t i = 0; i < M; ++i) {
    const double wi = grid.weight[i];
    for (std::size_t j = 0; j < M; ++j) {
      const double wj = grid.weight[j];
      // W^{-1/2} (W G + (W G)^T) / 2 W^{-1/2}, with the potentials on either side
      const double s = 0.5 * (std::sqrt(wi / wj) * G(i, j) + std::sqrt(wj / wi) * G(j, i));
      B(i, j) = std::sqrt(Q[i]) * s * std::sqrt(P[j]);
    }
  }
  return B;
}

}  // namespace

double GreenKernel::operator()(double r, double s) const {
  const double lo = std::min(r, s), hi = std::max(r, s);
  return std::pow(lo / hi, ell) * std::pow(hi, -(N - 2.0)) / wronskian();
}

SpectralGrid SpectralGrid::build(int N, int uniform_panels, int geometric_panels, int per_panel, double L) {
  if (uniform_panels < 1 || geometric_panels < 1 || per_panel < 2) throw std::invalid_argument("bad spectral grid");
  std::vector<double> edges;
  for (int i = 0; i <= uniform_panels; ++i) edges.push_back(0.5 * i / uniform_panels);
  double gap = 0.5;
  for (int i = 0; i < geometric_panels; ++i) {
    gap *= 0.5;
    edges.push_back(1.0 - gap);
  }
  return from_edges(N, L, per_panel, std::move(edges));
}

SpectralGrid SpectralGrid::refined() const {
  std::vector<double> edges;
  for (std::size_t p = 0; p + 1 < panel_edges.size(); ++p) {
    edges.push_back(panel_edges[p]);
    edges.push_back(0.5 * (panel_edges[p] + panel_edges[p + 1]));
  }
  edges.push_back(panel_edges.back());
  return from_edges(N, L, per_panel, std::move(edges));
}

DenseMatrix green_matrix(const SpectralGrid& grid, int ell) {
  const std::size_t M = grid.size();
  const int n = grid.per_panel;
  const GreenKernel G{ell, grid.N};
  const double c = G.wronskian();
  const double m = ell + grid.N - 2.0;
  const ReferenceRule ref = reference_rule(n);
  const ReferenceRule fine = reference_rule(2 * n + 8);
  DenseMatrix out(M, M);
  std::vector<double> acc(n);
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t pi = i / n;
    const double ri = grid.r[i], ti = grid.t[i];
    for (std::size_t j = 0; j < M; ++j) {
      if (j / n != pi) out(i, j) = G(ri, grid.r[j]) * grid.weight[j];
    }
    // same panel: the kernel's power weights are integrated exactly against the
    // Lagrange basis on each side of r_i
    const double a = grid.panel_edges[pi], b = grid.panel_edges[pi + 1];
    std::fill(acc.begin(), acc.end(), 0.0);
    auto side = [&](double lo, double hi, bool inner) {
      const double half = 0.5 * (hi - lo);
      for (std::size_t k = 0; k < fine.x.size(); ++k) {
        const double t = lo + half * (fine.x[k] + 1.0);
        const double s = grid.L * std::tan(0.5 * std::numbers::pi * t);
        const double jac = 0.5 * std::numbers::pi * grid.L * (1.0 + (s / grid.L) * (s / grid.L));
        const double kern = inner ? std::pow(s / ri, m) * s : std::pow(ri / s, ell) * s;
        const double y = 2.0 * (t - a) / (b - a) - 1.0;
        for (int j = 0; j < n; ++j) acc[j] += half * fine.w[k] * kern * jac * lagrange_basis(ref.x, j, y);
      }
    };
    side(a, ti, true);
    side(ti, b, false);
    for (int j = 0; j < n; ++j) out(i, pi * n + j) = acc[j] / c;
  }
  return out;
}

std::vector<double> green_apply(int ell, const SpectralGrid& grid, const std::vector<double>& f) {
  if (f.size() != grid.size()) throw std::invalid_argument("green_apply: size mismatch");
  for (double x : f) {
    if (!std::isfinite(x)) throw std::invalid_argument("green_apply: non-integrable input");
  }
  const DenseMatrix G = green_matrix(grid, ell);
  std::vector<double> g(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) acc += G(i, j) * f[j];
    g[i] = acc;
  }
  return g;
}

DenseMatrix build_channel_operator(const GroundStateProfile& prof, int ell, const SpectralGrid& grid) {
  const std::size_t M = grid.size();
  const DenseMatrix G = green_matrix(grid, ell);
  DenseMatrix K(2 * M, 2 * M);
  for (std::size_t j = 0; j < M; ++j) {
    const auto [P, Q] = prof.potentials(grid.r[j]);
    for (std::size_t i = 0; i < M; ++i) {
      K(i, M + j) = G(i, j) * P;
      K(M + i, j) = G(i, j) * Q;
    }
  }
  return K;
}

ChannelSpectrum channel_spectrum(const GroundStateProfile& prof, int ell, const SpectralGrid& grid,
                                 double mode_window, bool want_modes) {
  std::vector<double> P, Q;
  DenseMatrix G;
  const Eigen::MatrixXd B = symmetric_block(prof, ell, grid, P, Q, G);
  const unsigned flags = want_modes ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B, flags);
  if (svd.info() != Eigen::Success) throw std::runtime_error("eigen-solver failure in channel spectrum");
  ChannelSpectrum out;
  const Eigen::VectorXd& sv = svd.singularValues();
  out.eigenvalues.assign(sv.data(), sv.data() + sv.size());
  if (!want_modes) return out;
  const std::size_t M = grid.size();
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double mu = sv(k);
    if (std::abs(mu - 1.0) > mode_window) continue;
    const Eigen::VectorXd u = svd.matrixU().col(k), v = svd.matrixV().col(k);
    SpectralMode mode;
    mode.eigenvalue = mu;
    mode.r = grid.r;
    mode.psi.assign(M, 0.0);
    mode.phi.assign(M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
      const double wi = grid.weight[i];
      double a = 0, b = 0;
      for (std::size_t j = 0; j < M; ++j) {
        const double wj = grid.weight[j];
        const double s = 0.5 * (G(i, j) + G(j, i) * wj / wi);
        a += s * std::sqrt(P[j] / wj) * v(j);
        b += s * std::sqrt(Q[j] / wj) * u(j);
      }
      mode.psi[i] = a / mu;
      mode.phi[i] = b / mu;
    }
    out.modes.push_back(std::move(mode));
  }
  return out;
}

ChannelKernelReport channel_nullity_spectral(const GroundStateProfile& prof, int ell, const SpectralOptions& opt,
                                             std::optional<int> nullity_shooting) {
  const SpectralGrid coarse =
      SpectralGrid::build(prof.pair.N, opt.uniform_panels, opt.geometric_panels, opt.per_panel, opt.L);
  if (coarse.size() < 400) throw std::invalid_argument("spectral nullity needs at least 400 nodes");
  ChannelKernelReport rep;
  rep.ell = ell;
  ChannelSpectrum fine = channel_spectrum(prof, ell, coarse.refined(), opt.report_window, true);
  rep.spectrum = fine.eigenvalues;
  if (opt.extrapolate) {
    const ChannelSpectrum low = channel_spectrum(prof, ell, coarse, opt.report_window, false);
    for (std::size_t i = 0; i < low.eigenvalues.size(); ++i) {
      if (low.eigenvalues[i] < 1e-2) break;
      rep.spectrum[i] += (fine.eigenvalues[i] - low.eigenvalues[i]) / 3.0;
    }
  }
  for (double mu : rep.spectrum) {
    if (std::abs(mu - 1.0) <= opt.report_window) rep.eigenvalues_near_one.push_back(mu);
    if (std::abs(mu - 1.0) <= opt.window) ++rep.nullity_spectral;
  }
  rep.modes = std::move(fine.modes);
  if (nullity_shooting) {
    rep.nullity_shooting = *nullity_shooting;
    rep.agree = rep.nullity_shooting == rep.nullity_spectral;
  }
  return rep;
}

double spectrum_imaginary_defect(const GroundStateProfile& prof, int ell, const SpectralGrid& grid, int count) {
  const std::size_t M = grid.size();
  const DenseMatrix G = green_matrix(grid, ell);
  Eigen::MatrixXd GP(M, M), GQ(M, M);
  for (std::size_t j = 0; j < M; ++j) {
    const auto [P, Q] = prof.potentials(grid.r[j]);
    for (std::size_t i = 0; i < M; ++i) {
      GP(i, j) = G(i, j) * P;
      GQ(i, j) = G(i, j) * Q;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(GP * GQ, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen-solver failure");
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + M);
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  double worst = 0;
  for (int k = 0; k < count && k < static_cast<int>(M); ++k) {
    // eigenvalues of the pair operator are +-sqrt of these
    const std::complex<double> mu = std::sqrt(ev[k]);
    worst = std::max(worst, std::abs(mu.imag()) / std::abs(mu));
  }
  return worst;
}

}  // namespace laneemden
