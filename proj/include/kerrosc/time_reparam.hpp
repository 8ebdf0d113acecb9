#pragma once

// Mass -> time reparametrization. For H(t) = p^2/(2m) + m Omega^2 q^2 / 2 =
// H*(t)/m(t) with H* = p^2/2 + omega^2 q^2/2, omega = m Omega, the propagator
// is U(t) = U*~(rho(t)) where rho(t) = int_0^t dt'/m(t') and U*~ evolves
// H*(rho^{-1}(tau)) in tau. Units hbar = 1.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "kerrosc/fock.hpp"
#include "kerrosc/quadrature.hpp"
#include "kerrosc/time_functions.hpp"

namespace kerrosc {

/// tau = rho(t) = int_0^t dt' / m(t').
inline double rho_map(const MassSpec& mass, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("rho_map: t must be >= 0");
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MassSpec::Constant>) {
          return t / m.m0;
        } else if constexpr (std::is_same_v<M, MassSpec::Exponential>) {
          if (m.rate == 0.0) return t / m.m0;
          return -std::expm1(-m.rate * t) / (m.rate * m.m0);
        } else {
          if (t > m.t_max()) throw std::out_of_range("rho_map: t beyond tabulated mass window");
          const auto& knots = m.times();
          auto inv_mass = [&m](double s) { return 1.0 / m(s); };
          double tau = 0.0;
          for (std::size_t i = 0; i + 1 < knots.size() && knots[i] < t; ++i) {
            tau += adaptive_simpson(inv_mass, knots[i], std::min(knots[i + 1], t), 1e-12);
          }
          return tau;
        }
      },
      mass.kind());
}

/// t = rho^{-1}(tau).
inline double rho_inverse(const MassSpec& mass, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("rho_inverse: tau must be >= 0");
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MassSpec::Constant>) {
          return tau * m.m0;
        } else if constexpr (std::is_same_v<M, MassSpec::Exponential>) {
          if (m.rate == 0.0) return tau * m.m0;
          const double arg = -m.rate * m.m0 * tau;
          if (!(arg > -1.0)) throw std::domain_error("rho_inverse: tau beyond the range of rho");
          return -std::log1p(arg) / m.rate;
        } else {
          const auto& knots = m.times();
          auto inv_mass = [&m](double s) { return 1.0 / m(s); };
          // locate the knot interval, then bisect on the partial integral inside it
          double below = 0.0;
          std::size_t i = 0;
          for (; i + 1 < knots.size(); ++i) {
            const double piece = adaptive_simpson(inv_mass, knots[i], knots[i + 1], 1e-12);
            if (below + piece >= tau) break;
            below += piece;
          }
          if (i + 1 == knots.size()) throw std::domain_error("rho_inverse: tau beyond tabulated window");
          double lo = knots[i], hi = knots[i + 1];
          for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (below + adaptive_simpson(inv_mass, knots[i], mid, 1e-12) < tau ? lo : hi) = mid;
          }
          return 0.5 * (lo + hi);
        }
      },
      mass.kind());
}

/// omega(t) = m(t) Omega(t), the frequency of H*(t).
inline double transformed_frequency(const MassSpec& mass, const FrequencySpec& omega, double t) {
  return mass(t) * omega(t);
}

/// E_n(t) = Omega(t) (n + 1/2); the mass drops out.
inline double spectrum_H(int n, const FrequencySpec& omega, double t) {
  if (n < 0) throw std::invalid_argument("spectrum_H: negative level");
  return omega(t) * (n + 0.5);
}

/// q(t) = c_qq q(0) + c_qp p(0), p(t) = c_pq q(0) + c_pp p(0).
struct HeisenbergQP {
  double c_qq = 1.0;
  double c_qp = 0.0;
  double c_pq = 0.0;
  double c_pp = 1.0;

  /// Equals 1 for any canonical (unitary) evolution.
  double determinant() const { return c_qq * c_pp - c_qp * c_pq; }
};

/// Closed-form Heisenberg q(t), p(t) for m(t) = m0 e^{gamma t}, Omega = omega0,
/// underdamped branch 4 omega0^2 > gamma^2 only.
///
/// With F = sqrt(4 omega0^2 - gamma^2), theta = atan2(F, gamma) in (0, pi):
///   q(t) = (2/(m0 F)) e^{-gamma t/2} [sin(F t/2) p0 + m0 omega0 sin(F t/2 + theta) q0]
///   p(t) = -(2 omega0/F) e^{+gamma t/2} [sin(F t/2 - theta) p0 + m0 omega0 sin(F t/2) q0]
/// p = m(t) dq/dt fixes the growing envelope of p(t).
inline HeisenbergQP heisenberg_exp_mass(double m0, double omega0, double gamma, double t) {
  if (!(m0 > 0.0) || !(omega0 > 0.0)) throw std::invalid_argument("heisenberg_exp_mass: m0 and omega0 must be > 0");
  const double disc = 4.0 * omega0 * omega0 - gamma * gamma;
  if (!(disc > 0.0)) {
    throw std::domain_error("heisenberg_exp_mass: overdamped or critical regime (4 omega0^2 <= gamma^2) not supported");
  }
  const double big_f = std::sqrt(disc);
  const double theta = std::atan2(big_f, gamma);
  const double half = 0.5 * big_f * t;
  const double decay = std::exp(-0.5 * gamma * t);
  const double growth = std::exp(0.5 * gamma * t);
  HeisenbergQP c;
  c.c_qq = (2.0 * omega0 / big_f) * decay * std::sin(half + theta);
  c.c_qp = (2.0 / (m0 * big_f)) * decay * std::sin(half);
  c.c_pq = -(2.0 * omega0 / big_f) * growth * m0 * omega0 * std::sin(half);
  c.c_pp = -(2.0 * omega0 / big_f) * growth * std::sin(half - theta);
  return c;
}

/// q^2 and p^2 for q = (a + a^dag)/sqrt2, p = i(a^dag - a)/sqrt2 on n levels.
/// Built on n + 2 levels and cut, so the bottom-right corners are those of the
/// untruncated operators.
struct OscillatorMatrices {
  Mat q2, p2;

  explicit OscillatorMatrices(int n_trunc) {
    if (n_trunc < 1) throw std::invalid_argument("OscillatorMatrices: n_trunc must be >= 1");
    const int m = n_trunc + 2;
    Mat a = Mat::Zero(m, m);
    for (int k = 1; k < m; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    const Mat ad = a.adjoint();
    const Mat q = (a + ad) / std::sqrt(2.0);
    const Mat p = cplx(0.0, 1.0) * (ad - a) / std::sqrt(2.0);
    q2 = (q * q).topLeftCorner(n_trunc, n_trunc);
    p2 = (p * p).topLeftCorner(n_trunc, n_trunc);
  }

  /// p^2/(2m) + m Omega^2 q^2 / 2.
  Mat hamiltonian(double mass, double omega) const { return 0.5 * p2 / mass + 0.5 * mass * omega * omega * q2; }

  /// H* = p^2/2 + omega^2 q^2 / 2.
  Mat star_hamiltonian(double omega) const { return 0.5 * p2 + 0.5 * omega * omega * q2; }
};

/// psi(t) = U*~(rho(t)) psi0. `evolve_star(psi0, tau)` must propagate the
/// constant-mass Hamiltonian H*(rho^{-1}(tau)) over [0, tau].
template <class StarEvolver>
FockState evolve_via_timemap(const FockState& psi0, const MassSpec& mass, StarEvolver&& evolve_star, double t) {
  const double tau = rho_map(mass, t);
  if (tau == 0.0) return psi0;
  return evolve_star(psi0, tau);
}

}  // namespace kerrosc
