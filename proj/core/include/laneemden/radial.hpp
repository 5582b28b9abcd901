#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace laneemden {

template <std::size_t D>
using State = std::array<double, D>;

/// Step-size underflow or a rejected-step cascade inside the adaptive integrator.
class StiffnessFailure : public std::runtime_error {
 public:
  StiffnessFailure(const std::string& what, double radius)
      : std::runtime_error(what + " (at r = " + std::to_string(radius) + ")"), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

struct OdeTolerances {
  double rtol = 1e-12;
  double atol = 1e-24;
};

/// Radial systems are stored as (value, derivative) slots. Below r = 1 the derivative
/// slot holds d/dr, above it holds r d/dr and the independent variable is s = log r.
/// A model provides both right-hand sides:
///   void radial(double r, const State<D>& y, State<D>& dy) const;
///   void logarithmic(double s, const State<D>& z, State<D>& dz) const;
template <std::size_t D>
struct RadialSample {
  double r = 0.0;
  State<D> y{};  ///< derivative slots in d/dr
};

namespace detail {

template <std::size_t D>
State<D> to_log(double r, State<D> y) {
  for (std::size_t i = 1; i < D; i += 2) y[i] *= r;
  return y;
}

template <std::size_t D>
State<D> from_log(double r, State<D> z) {
  for (std::size_t i = 1; i < D; i += 2) z[i] /= r;
  return z;
}

}  // namespace detail

/// Integrates a radial model from r_from to r_to (either direction) with a dense-output
/// Dormand-Prince stepper. After every accepted step the visitor is called as
///   bool visit(double r_a, double r_b, const std::function<State<D>(double)>& at)
/// where `at(r)` evaluates the dense output (physical slots) for r between r_a and r_b.
/// Returning false stops the integration. Returns the last radius reached.
template <std::size_t D, class Model, class Visitor>
double march(const Model& model, State<D> y_from, double r_from, double r_to,
             const OdeTolerances& tol, Visitor&& visit) {
  namespace ode = boost::numeric::odeint;
  const double dir = r_to >= r_from ? 1.0 : -1.0;
  struct Phase {
    double a, b;
    bool log;
  };
  std::vector<Phase> phases;
  const double lo = std::min(r_from, r_to), hi = std::max(r_from, r_to);
  if (hi <= 1.0) {
    phases.push_back({r_from, r_to, false});
  } else if (lo >= 1.0) {
    phases.push_back({r_from, r_to, true});
  } else if (dir > 0) {
    phases.push_back({r_from, 1.0, false});
    phases.push_back({1.0, r_to, true});
  } else {
    phases.push_back({r_from, 1.0, true});
    phases.push_back({1.0, r_to, false});
  }

  State<D> y = y_from;
  double r_now = r_from;
  for (const Phase& ph : phases) {
    const double t0 = ph.log ? std::log(ph.a) : ph.a;
    const double t1 = ph.log ? std::log(ph.b) : ph.b;
    if (t0 == t1) continue;
    auto rhs = [&](const State<D>& x, State<D>& dx, double t) {
      if (ph.log) {
        model.logarithmic(t, x, dx);
      } else {
        model.radial(t, x, dx);
      }
    };
    auto to_phys = [&](double t, const State<D>& x) {
      return ph.log ? detail::from_log<D>(std::exp(t), x) : x;
    };
    auto stepper = ode::make_dense_output(tol.atol, tol.rtol, ode::runge_kutta_dopri5<State<D>>());
    State<D> x = ph.log ? detail::to_log<D>(ph.a, y) : y;
    const double span = std::abs(t1 - t0);
    double dt0 = ph.log ? 1e-4 : 1e-4 * std::max(std::abs(t0), 1e-3);
    dt0 = std::min(dt0, span) * dir;
    stepper.initialize(x, t0, dt0);
    bool stop = false;
    int tiny_steps = 0;
    while (dir * (stepper.current_time() - t1) < 0.0) {
      std::pair<double, double> iv;
      try {
        iv = stepper.do_step(rhs);
      } catch (const std::exception& e) {
        const double t = stepper.current_time();
        throw StiffnessFailure(e.what(), ph.log ? std::exp(t) : t);
      }
      const double ta = iv.first;
      const double tb = dir * (iv.second - t1) > 0.0 ? t1 : iv.second;
      if (std::abs(iv.second - iv.first) < 1e-14 * std::max(1.0, std::abs(ta))) {
        if (++tiny_steps > 50) {
          throw StiffnessFailure("step size underflow", ph.log ? std::exp(ta) : ta);
        }
      } else {
        tiny_steps = 0;
      }
      for (std::size_t i = 0; i < D; ++i) {
        if (!std::isfinite(stepper.current_state()[i])) {
          throw StiffnessFailure("non-finite state", ph.log ? std::exp(ta) : ta);
        }
      }
      const std::function<State<D>(double)> at = [&](double r) {
        const double t = ph.log ? std::log(r) : r;
        State<D> out;
        stepper.calc_state(t, out);
        return to_phys(t, out);
      };
      const double ra = ph.log ? std::exp(ta) : ta;
      const double rb = ph.log ? (tb == t1 ? ph.b : std::exp(tb)) : tb;
      r_now = rb;
      if (!visit(ra, rb, at)) {
        stop = true;
        break;
      }
    }
    if (stop) return r_now;
    State<D> xe;
    stepper.calc_state(t1, xe);
    y = to_phys(t1, xe);
    r_now = ph.b;
  }
  return r_now;
}

/// Integrates a radial model and reports the state at each of the increasing `nodes`
/// (all on the far side of r_from) by landing a Fehlberg 7(8) controlled stepper exactly
/// on them. `record(i, y)` returns false to stop early. Returns the number of nodes reached.
template <std::size_t D, class Model, class Record>
std::size_t march_nodes(const Model& model, State<D> y_from, double r_from, const std::vector<double>& nodes,
                        const OdeTolerances& tol, Record&& record) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(tol.atol, tol.rtol, ode::runge_kutta_fehlberg78<State<D>>());
  const double dir = nodes.empty() || nodes.front() >= r_from ? 1.0 : -1.0;
  double r = r_from;
  State<D> y = y_from;
  double dt_r = 1e-2 * std::max(r_from, 1e-3) * dir;  // radial phase step
  double dt_s = 1e-2 * dir;                            // logarithmic phase step
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double target = nodes[i];
    while (dir * (target - r) > 0.0) {
      // split at r = 1 where the variable changes
      const bool log_phase = dir > 0 ? r >= 1.0 : r > 1.0;
      double stop = target;
      if (dir > 0 && r < 1.0 && target > 1.0) stop = 1.0;
      if (dir < 0 && r > 1.0 && target < 1.0) stop = 1.0;
      double t = log_phase ? std::log(r) : r;
      const double t_end = log_phase ? std::log(stop) : stop;
      State<D> x = log_phase ? detail::to_log<D>(r, y) : y;
      double& dt = log_phase ? dt_s : dt_r;
      auto rhs = [&](const State<D>& xx, State<D>& dx, double tt) {
        if (log_phase) {
          model.logarithmic(tt, xx, dx);
        } else {
          model.radial(tt, xx, dx);
        }
      };
      int fails = 0;
      while (dir * (t_end - t) > 0.0) {
        double h = dir * std::min(std::abs(dt), std::abs(t_end - t));
        const bool clipped = std::abs(h) < std::abs(dt);
        const double t_before = t;
        const auto res = stepper.try_step(rhs, x, t, h);
        if (res == ode::fail) {
          if (++fails > 500 || std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
            throw StiffnessFailure("step size underflow", log_phase ? std::exp(t) : t);
          }
          dt = h;
          continue;
        }
        fails = 0;
        // keep the proposed size unless the step was shortened to land on a node
        if (!clipped || std::abs(h) > std::abs(dt)) dt = h;
        if (std::abs(t_end - t) <= 1e-15 * std::max(1.0, std::abs(t_end))) t = t_end;
        (void)t_before;
      }
      for (std::size_t k = 0; k < D; ++k) {
        if (!std::isfinite(x[k])) throw StiffnessFailure("non-finite state", stop);
      }
      r = stop;
      y = log_phase ? detail::from_log<D>(stop, x) : x;
    }
    if (!record(i, y)) return i + 1;
  }
  return nodes.size();
}

/// Quintic Hermite interpolation from value, first and second derivative at both ends.
struct Hermite5 {
  static std::array<double, 3> eval(double x0, double x1, const std::array<double, 3>& f0,
                                    const std::array<double, 3>& f1, double x);
};

/// Tabulated function f with f', f'' on increasing nodes; quintic Hermite in between.
class HermiteTrack {
 public:
  HermiteTrack() = default;
  HermiteTrack(std::vector<double> x, std::vector<double> f, std::vector<double> df,
               std::vector<double> ddf);
  /// (f, f', f'') at x; x must lie within [front, back].
  std::array<double, 3> operator()(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, f_, df_, ddf_;
};

/// Index of the interval [x[i], x[i+1]] that contains v (clamped).
std::size_t bracket_index(const std::vector<double>& x, double v);

/// Log-uniform nodes r_k = r_start * 10^(k / per_decade) up to the first node >= r_max.
std::vector<double> log_uniform_nodes(double r_start, double r_max, int per_decade);

/// Integral of g(r) over [a, b] in the variable log r with adaptive Gauss-Kronrod. The error
/// target is rel_tol times the integral of |g| plus abs_tol.
double integrate_log(const std::function<double(double)>& g, double a, double b, double rel_tol = 1e-12,
                     double abs_tol = 0.0);

/// Same integral for a g that is only piecewise smooth between `knots`: 5-point Gauss-Legendre
/// (in log r) on each knot interval, adaptive Gauss-Kronrod outside the knot range.
double integrate_log_piecewise(const std::function<double(double)>& g, double a, double b,
                               const std::vector<double>& knots, double rel_tol = 1e-12);

/// Central finite-difference derivative (order 6 in the interior, one-sided near the ends)
/// of samples on a uniform grid with spacing h.
std::vector<double> uniform_derivative(const std::vector<double>& f, double h);

}  // namespace laneemden
