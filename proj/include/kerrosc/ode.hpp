#pragma once

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) for complex systems.
// The step is clamped so that every requested output time is hit exactly;
// the controller's unclamped proposal is kept for the following step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "kerrosc/errors.hpp"

namespace kerrosc {

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  ///< 0 selects a step from the derivative scale
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

inline StepControl step_control(double tol) {
  StepControl c;
  c.rtol = tol;
  c.atol = tol;
  return c;
}

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

namespace detail {

struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // fifth-order minus embedded fourth-order weights
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <class State>
double scaled_error(const State& err, const State& y0, const State& y1, const StepControl& c) {
  const auto scale = c.atol + c.rtol * y0.array().abs().max(y1.array().abs());
  return (err.array().abs() / scale).maxCoeff();
}

}  // namespace detail

/// Integrate y' = f(t, y) from t0 through every time in `outputs` (ascending,
/// >= t0), calling `observe(t, y)` at each. Local error per step is kept below
/// atol + rtol*|y| componentwise. Throws numerical_error on step-size underflow.
template <class State, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& f, State y, double t0, std::span<const double> outputs, const StepControl& ctl,
                          Observer&& observe) {
  using DP = detail::DormandPrince;
  OdeStats stats;
  if (!(ctl.rtol > 0.0) || !(ctl.atol > 0.0)) throw std::invalid_argument("integrate_dopri5: tolerances must be > 0");
  if (!std::is_sorted(outputs.begin(), outputs.end())) throw std::invalid_argument("integrate_dopri5: outputs not sorted");
  if (!outputs.empty() && outputs.front() < t0) throw std::invalid_argument("integrate_dopri5: output before t0");

  double t = t0;
  State k1 = f(t, y);
  ++stats.evaluations;

  double h = ctl.initial_step;
  if (!(h > 0.0)) {
    const double ynorm = y.template lpNorm<Eigen::Infinity>();
    const double fnorm = k1.template lpNorm<Eigen::Infinity>();
    const double scale = ctl.atol + ctl.rtol * ynorm;
    h = (fnorm > 0.0) ? 0.01 * std::max(scale, ynorm) / fnorm : 1e-3;
    h = std::clamp(h, 1e-8, 1e-1);
  }
  h = std::min(h, ctl.max_step);

  State k2, k3, k4, k5, k6, k7, y1, err;
  for (const double target : outputs) {
    while (t < target) {
      if (stats.accepted + stats.rejected >= ctl.max_steps) {
        throw numerical_error("integrate_dopri5: step budget exhausted", t);
      }
      const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (h < h_min) throw numerical_error("integrate_dopri5: step-size underflow at t=" + format_number(t), t);

      const bool clamped = t + h >= target;
      const double step = clamped ? target - t : h;

      k2 = f(t + DP::c2 * step, State(y + step * (DP::a21 * k1)));
      k3 = f(t + DP::c3 * step, State(y + step * (DP::a31 * k1 + DP::a32 * k2)));
      k4 = f(t + DP::c4 * step, State(y + step * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3)));
      k5 = f(t + DP::c5 * step, State(y + step * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 + DP::a54 * k4)));
      k6 = f(t + step,
             State(y + step * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 + DP::a64 * k4 + DP::a65 * k5)));
      y1 = y + step * (DP::b1 * k1 + DP::b3 * k3 + DP::b4 * k4 + DP::b5 * k5 + DP::b6 * k6);
      const double t1 = clamped ? target : t + step;
      k7 = f(t1, y1);
      stats.evaluations += 6;

      err = step * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 + DP::e6 * k6 + DP::e7 * k7);
      const double e = detail::scaled_error(err, y, y1, ctl);
      if (!std::isfinite(e)) throw numerical_error("integrate_dopri5: non-finite error estimate", t);

      const double factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      if (e <= 1.0) {
        t = t1;
        y = y1;
        k1 = k7;  // first-same-as-last
        ++stats.accepted;
        // a clamped step says nothing about the natural step length
        if (!clamped || step >= h) h = std::min(step * factor, ctl.max_step);
      } else {
        ++stats.rejected;
        h = step * std::min(factor, 1.0);
      }
    }
    observe(target, static_cast<const State&>(y));
  }
  return stats;
}

}  // namespace kerrosc
