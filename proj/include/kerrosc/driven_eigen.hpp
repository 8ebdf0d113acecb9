#pragma once

// Driven oscillator H_f(t) = Omega(t)(A^dag A + 1/2) + e(t)/sqrt(2 Omega(t)) (A^dag + A)
// at frozen t, diagonalized by the displacement D_t(lambda_t):
//   H_f = D^dag(lambda) H_0 D(lambda) - Omega lambda^2,  lambda_t = e / (Omega sqrt(2 Omega)).

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "kerrosc/fock.hpp"
#include "kerrosc/time_functions.hpp"

namespace kerrosc {

inline constexpr int kMaxHermiteOrder = 200;

inline double lambda_t(const DriveSpec& drive, const FrequencySpec& omega, double t) {
  const double w = omega(t);
  if (!(w > 0.0)) throw std::domain_error("lambda_t: non-positive frequency");
  return drive(t) / (w * std::sqrt(2.0 * w));
}

/// E_n(t) = (n + 1/2 - lambda_t^2) Omega(t).
inline double spectrum_Hf(int n, const DriveSpec& drive, const FrequencySpec& omega, double t) {
  if (n < 0) throw std::invalid_argument("spectrum_Hf: negative level");
  const double lam = lambda_t(drive, omega, t);
  return (n + 0.5 - lam * lam) * omega(t);
}

/// Normalized Hermite function psi_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)),
/// from the three-term recurrence on psi_n itself.
inline double hermite_function(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_function: negative order");
  if (n > kMaxHermiteOrder) throw std::domain_error("hermite_function: order above stable recurrence range (200)");
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Eigenfunction of H_0(t): Omega^{1/4} psi_n(sqrt(Omega) q).
inline double free_eigenfunction(int n, double q, double omega) {
  return std::pow(omega, 0.25) * hermite_function(n, std::sqrt(omega) * q);
}

/// Centre of the displaced eigenfunctions: the minimum of Omega^2 q^2/2 + e q,
/// q_c = -e/Omega^2 = -lambda_t sqrt(2/Omega).
inline double displacement_center(const DriveSpec& drive, const FrequencySpec& omega, double t) {
  return -lambda_t(drive, omega, t) * std::sqrt(2.0 / omega(t));
}

/// <q|n>_t with |n>_t = D^dag(lambda_t)|n>^0 = exp(i lambda sqrt(2/Omega) p)|n>^0,
/// i.e. psi_n^0 translated to the centre q_c.
inline double eigenfunction_Hf(int n, double q, const DriveSpec& drive, const FrequencySpec& omega, double t) {
  if (n < 0) throw std::invalid_argument("eigenfunction_Hf: negative level");
  if (n > kMaxHermiteOrder) throw std::domain_error("eigenfunction_Hf: order above stable recurrence range (200)");
  return free_eigenfunction(n, q - displacement_center(drive, omega, t), omega(t));
}

/// Matrix of H_f(t) in the instantaneous number basis of A_t.
inline FockOperator driven_hamiltonian(const DriveSpec& drive, const FrequencySpec& omega, double t, int n_trunc) {
  const double w = omega(t);
  const auto a = FockOperator::annihilation(n_trunc);
  const auto h0 = FockOperator::diagonal(n_trunc, [w](int n) { return cplx(w * (n + 0.5), 0.0); });
  return h0 + cplx(drive(t) / std::sqrt(2.0 * w), 0.0) * (a + a.adjoint());
}

/// D(alpha) = exp(alpha a^dag - conj(alpha) a), dense matrix exponential.
inline FockOperator displacement(cplx alpha, int n_trunc) {
  const auto a = FockOperator::annihilation(n_trunc);
  const Mat gen = alpha * a.adjoint().matrix() - std::conj(alpha) * a.matrix();
  return FockOperator(gen.exp());
}

/// |n>_t = D^dag(lambda)|n> for real lambda. Throws truncation_error when the
/// top basis level carries more than 1e-9 of the population (the part the
/// untruncated displacement would move out of the basis).
inline FockState displaced_number_state(int n, double lambda, int n_trunc) {
  if (n < 0 || n >= n_trunc) throw std::invalid_argument("displaced_number_state: level outside basis");
  Vec v = displacement(cplx(-lambda, 0.0), n_trunc).matrix().col(n);
  const double edge = std::norm(v[n_trunc - 1]);
  if (edge > 1e-9) {
    throw truncation_error("displaced_number_state: n_trunc=" + std::to_string(n_trunc) +
                           " too small (top-level population " + format_number(edge) + ")");
  }
  return FockState(std::move(v));
}

}  // namespace kerrosc
