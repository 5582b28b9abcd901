#include "laneemden/radial.hpp"

#include <algorithm>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace laneemden {

std::array<double, 3> Hermite5::eval(double x0, double x1, const std::array<double, 3>& f0,
                                     const std::array<double, 3>& f1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  // basis on [0,1]
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 0.5 * (t3 - 2 * t4 + t5);
  const double d0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double d2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double d3 = -d0;
  const double d4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double d5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const double s0 = -60 * t + 180 * t2 - 120 * t3;
  const double s1 = -36 * t + 96 * t2 - 60 * t3;
  const double s2 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
  const double s3 = -s0;
  const double s4 = -24 * t + 84 * t2 - 60 * t3;
  const double s5 = 0.5 * (6 * t - 24 * t2 + 20 * t3);
  const double a0 = f0[0], a1 = f0[1] * h, a2 = f0[2] * h * h;
  const double b0 = f1[0], b1 = f1[1] * h, b2 = f1[2] * h * h;
  return {h0 * a0 + h1 * a1 + h2 * a2 + h3 * b0 + h4 * b1 + h5 * b2,
          (d0 * a0 + d1 * a1 + d2 * a2 + d3 * b0 + d4 * b1 + d5 * b2) / h,
          (s0 * a0 + s1 * a1 + s2 * a2 + s3 * b0 + s4 * b1 + s5 * b2) / (h * h)};
}

HermiteTrack::HermiteTrack(std::vector<double> x, std::vector<double> f, std::vector<double> df,
                           std::vector<double> ddf)
    : x_(std::move(x)), f_(std::move(f)), df_(std::move(df)), ddf_(std::move(ddf)) {
  if (x_.size() < 2 || f_.size() != x_.size() || df_.size() != x_.size() || ddf_.size() != x_.size()) {
    throw std::invalid_argument("HermiteTrack: inconsistent table sizes");
  }
}

std::array<double, 3> HermiteTrack::operator()(double x) const {
  const std::size_t i = bracket_index(x_, x);
  return Hermite5::eval(x_[i], x_[i + 1], {f_[i], df_[i], ddf_[i]},
                        {f_[i + 1], df_[i + 1], ddf_[i + 1]}, x);
}

std::size_t bracket_index(const std::vector<double>& x, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  return std::min(i, x.size() - 2);
}

std::vector<double> log_uniform_nodes(double r_start, double r_max, int per_decade) {
  if (!(r_start > 0.0) || !(r_max > r_start) || per_decade < 1) {
    throw std::invalid_argument("log_uniform_nodes: bad range");
  }
  std::vector<double> nodes;
  const double l0 = std::log10(r_start);
  for (int k = 0;; ++k) {
    const double r = std::pow(10.0, l0 + static_cast<double>(k) / per_decade);
    nodes.push_back(k == 0 ? r_start : r);
    if (r >= r_max * (1.0 - 1e-13)) break;
  }
  return nodes;
}

double integrate_log(const std::function<double(double)>& g, double a, double b, double rel_tol, double abs_tol) {
  if (!(b > a) || !(a > 0.0)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  const double la = std::log(a), lb = std::log(b);
  const int pieces = std::max(1, static_cast<int>(std::ceil((lb - la) / 1.0)));
  auto f = [&](double x) {
    const double r = std::exp(x);
    return g(r) * r;
  };
  // a non-adaptive pass sizes each piece, so the tolerance is relative to the whole integral
  // instead of to pieces whose contribution is below roundoff of the total
  std::vector<double> rough(static_cast<std::size_t>(pieces));
  double scale = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double x0 = la + (lb - la) * k / pieces;
    const double x1 = la + (lb - la) * (k + 1) / pieces;
    rough[static_cast<std::size_t>(k)] = gauss_kronrod<double, 31>::integrate(f, x0, x1, 0, 0.0);
    scale += std::abs(rough[static_cast<std::size_t>(k)]);
  }
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double x0 = la + (lb - la) * k / pieces;
    const double x1 = la + (lb - la) * (k + 1) / pieces;
    const double own = std::abs(rough[static_cast<std::size_t>(k)]);
    const double budget = (rel_tol * scale + abs_tol) / pieces;
    if (own <= budget) {
      // the whole piece is below the error budget; refining it would only chase roundoff
      total += rough[static_cast<std::size_t>(k)];
      continue;
    }
    total += gauss_kronrod<double, 31>::integrate(f, x0, x1, 15, std::max(budget / own, rel_tol));
  }
  return total;
}

double integrate_log_piecewise(const std::function<double(double)>& g, double a, double b,
                               const std::vector<double>& knots, double rel_tol) {
  if (!(b > a) || !(a > 0.0)) return 0.0;
  if (knots.size() < 2 || b <= knots.front() || a >= knots.back()) return integrate_log(g, a, b, rel_tol);
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                              0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  double total = 0.0;
  std::size_t i = a > knots.front() ? bracket_index(knots, a) : 0;
  for (; i + 1 < knots.size() && knots[i] < b; ++i) {
    const double lo = std::max(a, knots[i]), hi = std::min(b, knots[i + 1]);
    if (!(hi > lo)) continue;
    const double la = std::log(lo), lb = std::log(hi);
    const double half = 0.5 * (lb - la), mid = 0.5 * (lb + la);
    for (int k = 0; k < 5; ++k) {
      const double r = std::exp(mid + half * x[k]);
      total += half * w[k] * g(r) * r;
    }
  }
  // outside the knots the integrand may be a cancellation-limited far-field or series model,
  // so those pieces only need to be accurate relative to the bulk
  const double floor = rel_tol * std::abs(total);
  total += integrate_log(g, a, std::min(b, knots.front()), rel_tol, floor);
  total += integrate_log(g, std::max(a, knots.back()), b, rel_tol, floor);
  return total;
}

std::vector<double> uniform_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 7) throw std::invalid_argument("uniform_derivative needs at least 7 samples");
  std::vector<double> d(n);
  for (std::size_t i = 3; i + 3 < n; ++i) {
    d[i] = (45.0 * (f[i + 1] - f[i - 1]) - 9.0 * (f[i + 2] - f[i - 2]) + (f[i + 3] - f[i - 3])) / (60.0 * h);
  }
  // one-sided 6th-order stencils for the three boundary points on each side
  static const double c[3][7] = {
      {-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0},
      {-10.0, -77.0, 150.0, -100.0, 50.0, -15.0, 2.0},
      {2.0, -24.0, -35.0, 80.0, -30.0, 8.0, -1.0},
  };
  for (std::size_t i = 0; i < 3; ++i) {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
      a += c[i][k] * f[k];
      b += c[i][k] * f[n - 1 - k];
    }
    d[i] = a / (60.0 * h);
    d[n - 1 - i] = -b / (60.0 * h);
  }
  return d;
}

}  // namespace laneemden
