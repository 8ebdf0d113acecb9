#pragma once

// Evolution under H(t) = Omega0 (n + 1/2) + chi n^2 + e(t)/sqrt(2 Omega0) (a + a^dag).
//
// Two approximate routes:
//  * linearized Heisenberg ladder operators, initial number state |n>;
//  * Wei-Norman factorization U = U_0 U_I with the Kerr factor in the
//    interaction picture averaged over the initial coherent state |alpha>,
//    giving |psi(t)> = exp(-i xi n^2) |e^{-i Omega0 t} eta_t>, xi = chi t.

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrosc/fock.hpp"
#include "kerrosc/kerr_states.hpp"
#include "kerrosc/ode.hpp"
#include "kerrosc/time_functions.hpp"

namespace kerrosc {

inline constexpr cplx kI{0.0, 1.0};

struct ModelParams {
  double omega0 = 1.0;
  double chi = 0.0;
  DriveSpec drive;
  cplx alpha{0.0, 0.0};

  void validate() const {
    if (!(omega0 > 0.0)) throw std::invalid_argument("ModelParams: omega0 must be > 0");
    if (!(chi >= 0.0)) throw std::invalid_argument("ModelParams: chi must be >= 0");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
      throw std::invalid_argument("ModelParams: alpha must be finite");
    }
  }

  /// The averaging approximations assume chi << Omega0.
  bool outside_small_kerr_regime() const { return chi / omega0 > 0.5; }

  /// nu = Omega0 - chi.
  double nu() const { return omega0 - chi; }

  /// Drive coupling e(t)/sqrt(2 Omega0).
  double coupling(double t) const { return drive(t) / std::sqrt(2.0 * omega0); }
};

// ---------------------------------------------------------------------------
// Linearized Heisenberg dynamics

/// Trajectory quantities at one time for initial number state |n>.
///
/// First-order branch:  a(t) ~ e^{-i nu t} a(0) - zeta(t).
/// Refined branch:      a(t) = e^{-i(nu t + gamma(t))} a(0) + e^{-i nu t} delta(t),
/// with b = e^{i nu t} a obeying b' = -i A(t) b - i e^{i nu t} e(t)/sqrt(2 Omega0),
/// A(t) = 2 chi (n + |zeta(t)|^2), gamma = int A.
struct LinearizedSolution {
  double t = 0.0;
  cplx zeta{};
  double gamma_phase = 0.0;
  cplx delta{};
  double rate = 0.0;             ///< A(t)
  double mean_occupation = 0.0;  ///< n + |zeta(t)|^2

  cplx ladder_coefficient{1.0, 0.0};  ///< e^{-i(nu t + gamma)}
  cplx ladder_shift{};                ///< e^{-i nu t} delta
};

namespace detail {

inline LinearizedSolution make_linearized(const ModelParams& p, int n, double t, const Eigen::Vector3cd& y) {
  LinearizedSolution s;
  s.t = t;
  s.zeta = y[0];
  s.gamma_phase = y[1].real();
  s.delta = y[2];
  s.mean_occupation = n + std::norm(s.zeta);
  s.rate = 2.0 * p.chi * s.mean_occupation;
  s.ladder_coefficient = std::polar(1.0, -(p.nu() * t + s.gamma_phase));
  s.ladder_shift = std::polar(1.0, -p.nu() * t) * s.delta;
  return s;
}

}  // namespace detail

/// Linearized solution sampled at ascending times (>= 0).
inline std::vector<LinearizedSolution> linearized_trajectory(const ModelParams& p, int n,
                                                             const std::vector<double>& times, double tol = 1e-11) {
  p.validate();
  if (n < 0) throw std::invalid_argument("linearized_ladder: negative level");
  if (!times.empty()) p.drive.check_window(times.back());
  const double nu = p.nu();
  // y = (zeta, gamma, delta)
  //   zeta'  = -i nu zeta + i c(t)
  //   gamma' = 2 chi (n + |zeta|^2)
  //   delta' = -i A delta - i e^{i nu t} c(t),  c = e/sqrt(2 Omega0)
  auto rhs = [&](double t, const Eigen::Vector3cd& y) {
    const double c = p.coupling(t);
    const double a_rate = 2.0 * p.chi * (n + std::norm(y[0]));
    Eigen::Vector3cd d;
    d[0] = -kI * nu * y[0] + kI * c;
    d[1] = a_rate;
    d[2] = -kI * a_rate * y[2] - kI * std::polar(1.0, nu * t) * c;
    return d;
  };
  std::vector<LinearizedSolution> out;
  out.reserve(times.size());
  integrate_dopri5(rhs, Eigen::Vector3cd::Zero().eval(), 0.0, std::span<const double>(times), step_control(tol),
                   [&](double t, const Eigen::Vector3cd& y) { out.push_back(detail::make_linearized(p, n, t, y)); });
  return out;
}

inline LinearizedSolution linearized_ladder(const ModelParams& p, int n, double t, double tol = 1e-11) {
  if (!(t >= 0.0)) throw std::invalid_argument("linearized_ladder: t must be >= 0");
  return linearized_trajectory(p, n, {t}, tol).front();
}

// ---------------------------------------------------------------------------
// Wei-Norman route

/// g(t) = e(t)/sqrt(2 Omega0) e^{-i t (Omega0 + chi)} exp(|alpha|^2 (e^{-2 i chi t} - 1)).
/// |alpha|^2 is frozen at the initial coherent amplitude.
inline cplx g_coefficient(const ModelParams& p, double t) {
  const double a2 = std::norm(p.alpha);
  const cplx average = std::exp(a2 * (std::polar(1.0, -2.0 * p.chi * t) - 1.0));
  return p.coupling(t) * std::polar(1.0, -t * (p.omega0 + p.chi)) * average;
}

/// Sampled X_1, X_2, X_3 with X(0) = 0.
///
/// The coefficient ODEs X1' = X3' X2, X2' = -i conj(g), X3' = -i g belong to
/// the normal-ordered product U_I = e^{X1} e^{X2 a^dag} e^{X3 a}, so that
/// U_I|alpha> = e^{X1 + X3 alpha} e^{-|alpha|^2/2} sum (alpha + X2)^n/sqrt(n!) |n>.
struct WeiNormanSolution {
  cplx alpha{};
  double chi = 0.0;
  std::vector<double> t;
  std::vector<cplx> x1, x2, x3;

  std::size_t size() const { return t.size(); }
  double t_end() const { return t.empty() ? 0.0 : t.back(); }

  cplx eta(std::size_t i) const { return x2[i] + alpha; }
  double xi(double time) const { return chi * time; }

  struct Sample {
    cplx x1, x2, x3;
    cplx eta;
  };

  /// Linear interpolation in the complex plane between grid samples.
  Sample at(double time) const {
    if (t.empty()) throw std::logic_error("WeiNormanSolution: empty");
    if (time < t.front() || time > t.back()) {
      throw std::out_of_range("WeiNormanSolution: t=" + format_number(time) + " outside integrated window");
    }
    auto hi = std::lower_bound(t.begin(), t.end(), time);
    std::size_t j = static_cast<std::size_t>(hi - t.begin());
    if (j < t.size() && t[j] == time) return {x1[j], x2[j], x3[j], x2[j] + alpha};
    const std::size_t i = j - 1;
    const double w = (time - t[i]) / (t[j] - t[i]);
    auto lerp = [w](cplx a, cplx b) { return a + w * (b - a); };
    const cplx l2 = lerp(x2[i], x2[j]);
    return {lerp(x1[i], x1[j]), l2, lerp(x3[i], x3[j]), l2 + alpha};
  }

  /// |G_alpha|^2 e^{|eta|^2}; 1 for an exactly unitary U_I.
  double norm_factor(std::size_t i) const {
    const cplx exponent = x1[i] + x3[i] * alpha;
    return std::exp(2.0 * exponent.real() - std::norm(alpha) + std::norm(eta(i)));
  }
};

/// Integrate on an explicit ascending grid starting at 0.
inline WeiNormanSolution integrate_wei_norman(const ModelParams& p, const std::vector<double>& grid, double tol) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_wei_norman: tol must be > 0");
  if (grid.empty() || grid.front() != 0.0) throw std::invalid_argument("integrate_wei_norman: grid must start at 0");
  p.drive.check_window(grid.back());
  if (p.outside_small_kerr_regime()) {
    std::clog << "warning: chi/Omega0 = " << p.chi / p.omega0 << " > 0.5; averaging approximation is unreliable\n";
  }
  auto rhs = [&p](double t, const Eigen::Vector3cd& y) {
    const cplx g = g_coefficient(p, t);
    Eigen::Vector3cd d;
    d[1] = -kI * std::conj(g);
    d[2] = -kI * g;
    d[0] = d[2] * y[1];
    return d;
  };
  WeiNormanSolution sol;
  sol.alpha = p.alpha;
  sol.chi = p.chi;
  sol.t.reserve(grid.size());
  sol.x1.reserve(grid.size());
  sol.x2.reserve(grid.size());
  sol.x3.reserve(grid.size());
  integrate_dopri5(rhs, Eigen::Vector3cd::Zero().eval(), 0.0, std::span<const double>(grid), step_control(tol),
                   [&](double t, const Eigen::Vector3cd& y) {
                     sol.t.push_back(t);
                     sol.x1.push_back(y[0]);
                     sol.x2.push_back(y[1]);
                     sol.x3.push_back(y[2]);
                   });
  return sol;
}

/// Uniform grid on [0, t_end] with `samples_per_period` points per drive period
/// (2 pi / Omega0 when the drive has no natural period).
inline std::vector<double> uniform_grid(double t_end, double period, int samples_per_period) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("uniform_grid: t_end must be >= 0");
  if (samples_per_period < 1) throw std::invalid_argument("uniform_grid: samples_per_period must be >= 1");
  const auto intervals = std::max<long>(1, static_cast<long>(std::ceil(t_end / period * samples_per_period)));
  std::vector<double> grid(static_cast<std::size_t>(intervals) + 1);
  for (long i = 0; i <= intervals; ++i) grid[static_cast<std::size_t>(i)] = t_end * static_cast<double>(i) / intervals;
  grid.back() = t_end;
  return grid;
}

inline WeiNormanSolution integrate_wei_norman(const ModelParams& p, double t_end, double tol = 1e-10,
                                              int samples_per_period = 2000) {
  const double period = p.drive.period_or(2.0 * std::numbers::pi / p.omega0);
  return integrate_wei_norman(p, uniform_grid(t_end, period, samples_per_period), tol);
}

/// Phase of G_alpha = exp(X1 + X3 alpha - i Omega0 t/2 - |alpha|^2/2).
inline double global_phase(const ModelParams& p, const WeiNormanSolution::Sample& s, double t) {
  return (s.x1 + s.x3 * p.alpha).imag() - 0.5 * p.omega0 * t;
}

/// |psi_alpha, t> = e^{i arg G_alpha} exp(-i xi n^2) |e^{-i Omega0 t} eta_t>, unit norm.
/// Throws truncation_error when the discarded tail exceeds 1e-9.
inline FockState evolved_state(const ModelParams& p, const WeiNormanSolution& sol, double t, int n_trunc) {
  const auto s = sol.at(t);
  const cplx beta = std::polar(1.0, -p.omega0 * t) * s.eta;
  const FockState k = kerr_state({beta, p.chi * t}, n_trunc, 1e-9);
  return FockState(std::polar(1.0, global_phase(p, s, t)) * k.amplitudes(), true);
}

}  // namespace kerrosc
