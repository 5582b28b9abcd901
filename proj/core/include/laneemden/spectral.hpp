#pragma once

#include <optional>
#include <vector>

#include "laneemden/ground_state.hpp"

namespace laneemden {

/// Radial Green function of the channel-ell Laplacian in dimension N.
struct GreenKernel {
  int ell = 0;
  int N = 3;
  double operator()(double r, double s) const;
  double wronskian() const { return 2.0 * ell + N - 2.0; }
};

/// Composite Gauss-Legendre rule on t in (0,1) with r = L tan(pi t / 2): uniform panels on
/// [0, 1/2] and panels halving in width toward t = 1.
struct SpectralGrid {
  int N = 3;
  double L = 1.0;
  int per_panel = 8;
  std::vector<double> panel_edges;  ///< in t
  std::vector<double> t, r, w, jac;  ///< w are t-weights, jac = dr/dt
  std::vector<double> weight;        ///< r^{N-1} jac w

  static SpectralGrid build(int N, int uniform_panels = 10, int geometric_panels = 40, int per_panel = 8,
                            double L = 1.0);
  /// Same rule with every panel split in two.
  SpectralGrid refined() const;
  std::size_t size() const { return r.size(); }
  std::size_t panels() const { return panel_edges.size() - 1; }
};

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;
  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Product-integration matrix: (G f)(r_i) = sum_j G_ij f_j, exact treatment of the kink at s = r_i.
DenseMatrix green_matrix(const SpectralGrid& grid, int ell);

/// g(r) = int G_ell(r,s) f(s) s^{N-1} ds at the grid nodes.
std::vector<double> green_apply(int ell, const SpectralGrid& grid, const std::vector<double>& f);

/// (psi, phi) -> (G[P phi], G[Q psi]) as a 2M x 2M Nystrom matrix (not symmetrized).
DenseMatrix build_channel_operator(const GroundStateProfile& profile, int ell, const SpectralGrid& grid);

/// Eigenvalue-one mode with components on the grid nodes.
struct SpectralMode {
  double eigenvalue = 0;
  std::vector<double> r, psi, phi;
};

struct ChannelSpectrum {
  std::vector<double> eigenvalues;  ///< positive half, descending; the full spectrum is {+-mu}
  std::vector<SpectralMode> modes;  ///< eigenvectors for eigenvalues within the reporting window
};

/// Symmetrized operator spectrum on one grid.
ChannelSpectrum channel_spectrum(const GroundStateProfile& profile, int ell, const SpectralGrid& grid,
                                 double mode_window = 0.05, bool want_modes = true);

struct SpectralOptions {
  int uniform_panels = 10;
  int geometric_panels = 40;
  int per_panel = 8;
  double L = 1.0;
  double window = 5e-3;
  double report_window = 0.05;
  bool extrapolate = true;
};

struct ChannelKernelReport {
  int ell = 0;
  std::vector<double> eigenvalues_near_one;
  int nullity_spectral = 0;
  int nullity_shooting = -1;
  bool agree = false;
  std::vector<double> spectrum;  ///< extrapolated positive eigenvalues, descending
  std::vector<SpectralMode> modes;
};

/// Nullity from the eigenvalue-one cluster after extrapolation over M and 2M nodes.
/// `nullity_shooting` is filled in by the caller; agree is set when it is given.
ChannelKernelReport channel_nullity_spectral(const GroundStateProfile& profile, int ell,
                                             const SpectralOptions& opt = {},
                                             std::optional<int> nullity_shooting = std::nullopt);

/// Largest imaginary part, relative to modulus, among the top `count` eigenvalues of the
/// unsymmetrized composed operator G P G Q.
double spectrum_imaginary_defect(const GroundStateProfile& profile, int ell, const SpectralGrid& grid,
                                 int count = 10);

}  // namespace laneemden
