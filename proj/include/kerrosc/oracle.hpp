#pragma once

// Reference integrator: time-ordered Schroedinger evolution of the full
// H(t) = Omega0 (n + 1/2) + chi n^2 + e(t)/sqrt(2 Omega0) (a + a^dag)
// on the truncated basis, without the coherent-state averaging.
//
// Integration runs in the interaction picture of the diagonal part,
// psi(t) = exp(-i H_0 t) phi(t), i phi' = V_I(t) phi, with
// (V_I)_{n-1,n} = c(t) sqrt(n) exp(-i w_n t), w_n = E_n - E_{n-1} = Omega0 + chi(2n - 1).

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrosc/fock.hpp"
#include "kerrosc/kerr_evolution.hpp"
#include "kerrosc/ode.hpp"

namespace kerrosc {

inline constexpr double kOracleNormDrift = 1e-8;
inline constexpr double kOracleEdgePopulation = 1e-10;

/// |<psi|phi>|^2.
inline double fidelity(const FockState& psi, const FockState& phi) {
  if (psi.n_trunc() != phi.n_trunc()) throw std::invalid_argument("fidelity: dimension mismatch");
  return std::norm(inner(psi, phi));
}

struct OracleRun {
  ModelParams params;
  int n_trunc = 0;
  std::vector<double> times;
  std::vector<FockState> states;
  std::vector<double> norm_drift;  ///< | ||psi(t)|| - 1 |
  long steps = 0;

  double max_norm_drift() const {
    double m = 0.0;
    for (double d : norm_drift) m = std::max(m, d);
    return m;
  }
};

/// E_n = Omega0 (n + 1/2) + chi n^2.
inline double bare_energy(const ModelParams& p, int n) { return p.omega0 * (n + 0.5) + p.chi * n * n; }

inline FockOperator bare_hamiltonian(const ModelParams& p, int n_trunc) {
  return FockOperator::diagonal(n_trunc, [&p](int n) { return cplx(bare_energy(p, n), 0.0); });
}

/// Full H(t) matrix (used by tests and by the generic integrator).
inline FockOperator full_hamiltonian(const ModelParams& p, double t, int n_trunc) {
  const auto a = FockOperator::annihilation(n_trunc);
  return bare_hamiltonian(p, n_trunc) + cplx(p.coupling(t), 0.0) * (a + a.adjoint());
}

/// Evolve psi0 to every time in `times` (ascending, >= 0) under the full H(t).
/// Throws numerical_error when unitarity drifts by more than 1e-8 and
/// truncation_error when the top level picks up more than 1e-10 population.
inline OracleRun integrate_exact(const ModelParams& p, const FockState& psi0, const std::vector<double>& times,
                                 double tol = 1e-10) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_exact: tol must be > 0");
  if (!psi0.is_normalized()) throw std::invalid_argument("integrate_exact: initial state is not normalized");
  const int dim = psi0.n_trunc();
  if (dim < 12) throw std::invalid_argument("integrate_exact: n_trunc must leave a 10-level margin");
  {
    const Eigen::VectorXd pop = psi0.populations();
    const double margin_mass = pop.tail(10).sum();
    if (margin_mass > kOracleEdgePopulation) {
      throw truncation_error("integrate_exact: initial state occupies the top 10 levels (mass " +
                             format_number(margin_mass) + ")");
    }
  }
  if (!times.empty()) p.drive.check_window(times.back());

  Eigen::VectorXd sqrt_n(dim), w(dim);
  for (int n = 0; n < dim; ++n) {
    sqrt_n[n] = std::sqrt(static_cast<double>(n));
    w[n] = p.omega0 + p.chi * (2.0 * n - 1.0);
  }
  Vec rotor(dim);
  auto rhs = [&](double t, const Vec& phi) {
    const double c = p.coupling(t);
    Vec d = Vec::Zero(dim);
    if (c == 0.0) return d;
    for (int n = 1; n < dim; ++n) rotor[n] = std::polar(c * sqrt_n[n], -w[n] * t);
    for (int n = 1; n < dim; ++n) {
      d[n - 1] += rotor[n] * phi[n];
      d[n] += std::conj(rotor[n]) * phi[n - 1];
    }
    return Vec(-kI * d);
  };

  OracleRun run;
  run.params = p;
  run.n_trunc = dim;
  run.times = times;
  run.states.reserve(times.size());
  run.norm_drift.reserve(times.size());
  const auto stats = integrate_dopri5(
      rhs, psi0.amplitudes(), 0.0, std::span<const double>(times), step_control(tol), [&](double t, const Vec& phi) {
        Vec psi(dim);
        for (int n = 0; n < dim; ++n) psi[n] = std::polar(1.0, -std::fmod(bare_energy(p, n) * t, 2.0 * std::numbers::pi)) * phi[n];
        const double drift = std::abs(psi.norm() - 1.0);
        if (drift > kOracleNormDrift) {
          throw numerical_error("integrate_exact: norm drift " + format_number(drift) + " exceeds 1e-8", t);
        }
        const double edge = std::norm(psi[dim - 1]);
        if (edge > kOracleEdgePopulation) {
          throw truncation_error("integrate_exact: support reached the truncation boundary (top-level population " +
                                     format_number(edge) + ")",
                                 t);
        }
        run.norm_drift.push_back(drift);
        run.states.emplace_back(std::move(psi));
      });
  run.steps = stats.accepted;
  return run;
}

/// Uniform sampling of [0, t_end] with `samples` points.
inline OracleRun integrate_exact(const ModelParams& p, const FockState& psi0, double t_end, double tol = 1e-10,
                                 int samples = 2) {
  if (samples < 2) throw std::invalid_argument("integrate_exact: samples must be >= 2");
  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) times[i] = t_end * i / (samples - 1);
  times.back() = t_end;
  return integrate_exact(p, psi0, times, tol);
}

/// Generic dense Schroedinger integration i psi' = H(t) psi over [t0, t1].
/// `hamiltonian(t)` returns the dense matrix.
inline FockState integrate_schrodinger(const std::function<Mat(double)>& hamiltonian, const FockState& psi0, double t0,
                                       double t1, double tol = 1e-12) {
  if (t1 < t0) throw std::invalid_argument("integrate_schrodinger: t1 < t0");
  Vec out = psi0.amplitudes();
  const double target[1] = {t1};
  integrate_dopri5([&](double t, const Vec& psi) { return Vec(-kI * (hamiltonian(t) * psi)); }, psi0.amplitudes(), t0,
                   std::span<const double>(target), step_control(tol), [&](double, const Vec& psi) { out = psi; });
  return FockState(std::move(out));
}

}  // namespace kerrosc
