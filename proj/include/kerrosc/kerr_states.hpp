#pragma once

// Kerr states |beta>_xi = exp(-i xi n^2)|beta>: construction, deformed ladder
// operators B = a f(n), f(n) = exp(i xi (2n - 1)), photon statistics and
// normalized quadrature variances.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "kerrosc/fock.hpp"

namespace kerrosc {

struct KerrStateParams {
  cplx beta{0.0, 0.0};
  double xi = 0.0;
};

/// exp(-i xi n^2), with xi reduced mod 2pi first so the 2pi period is exact.
inline cplx kerr_phase(double xi, int n) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double reduced = std::fmod(xi, two_pi);
  const double n2 = static_cast<double>(n) * n;
  return std::polar(1.0, -std::fmod(reduced * n2, two_pi));
}

/// Amplitudes e^{-|beta|^2/2} beta^n e^{-i xi n^2} / sqrt(n!), renormalized.
inline FockState kerr_state(const KerrStateParams& p, int n_trunc, double tail_tol = kCoherentTailTolerance) {
  const FockState coherent = coherent_state(p.beta, n_trunc, tail_tol);
  Vec v = coherent.amplitudes();
  for (int n = 0; n < n_trunc; ++n) v[n] *= kerr_phase(p.xi, n);
  return FockState(std::move(v), true);
}

inline FockState kerr_state(const KerrStateParams& p) {
  return kerr_state(p, default_truncation(std::norm(p.beta)));
}

/// <n|B|n+1> = sqrt(n+1) exp(i xi (2(n+1) - 1)).
inline FockOperator deformed_ladder_B(double xi, int n_trunc) {
  Mat m = Mat::Zero(n_trunc, n_trunc);
  for (int n = 0; n + 1 < n_trunc; ++n) {
    m(n, n + 1) = std::sqrt(static_cast<double>(n + 1)) * std::polar(1.0, xi * (2.0 * (n + 1) - 1.0));
  }
  return FockOperator(std::move(m));
}

/// D_B(beta) = exp(beta B^dag - conj(beta) B).
inline FockOperator deformed_displacement(cplx beta, double xi, int n_trunc) {
  const Mat b = deformed_ladder_B(xi, n_trunc).matrix();
  const Mat gen = beta * b.adjoint() - std::conj(beta) * b;
  return FockOperator(gen.exp());
}

/// P(n) = e^{-|beta|^2} |beta|^{2n} / n! for n < n_max (independent of xi).
/// n_max = 0 selects the default truncation for |beta|^2.
inline std::vector<double> excitation_distribution(const KerrStateParams& p, int n_max = 0) {
  const double mean = std::norm(p.beta);
  if (n_max <= 0) n_max = default_truncation(mean);
  std::vector<double> pmf(static_cast<std::size_t>(n_max));
  if (mean == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  const double log_mean = std::log(mean);
  for (int n = 0; n < n_max; ++n) pmf[n] = std::exp(n * log_mean - mean - std::lgamma(n + 1.0));
  return pmf;
}

/// (Delta q)_xi / (Delta q)_0 and (Delta p)_xi / (Delta p)_0 for x = (a + a^dag)/2,
/// p = (a - a^dag)/(2i).
struct QuadratureRatios {
  double ratio_q = 1.0;
  double ratio_p = 1.0;
};

/// Closed form, from <a> = beta e^{-i xi} exp(|beta|^2 (e^{-2i xi} - 1)) and
/// <a^2> = beta^2 e^{-4i xi} exp(|beta|^2 (e^{-4i xi} - 1)):
///   ratio_q^2 = 2|b|^2 + 1 + 2|b|^2 E2 cos(2phi - 4xi - |b|^2 sin 4xi) - 4|b|^2 E1 cos^2(phi - xi - |b|^2 sin 2xi)
///   ratio_p^2 = 2|b|^2 + 1 - 2|b|^2 E2 cos(2phi - 4xi - |b|^2 sin 4xi) - 4|b|^2 E1 sin^2(phi - xi - |b|^2 sin 2xi)
/// with E2 = exp(-2|b|^2 sin^2 2xi), E1 = exp(-4|b|^2 sin^2 xi).
inline QuadratureRatios quadrature_variances(const KerrStateParams& p) {
  const double b2 = std::norm(p.beta);
  const double phi = std::arg(p.beta);
  const double xi = p.xi;
  const double s1 = std::sin(xi);
  const double s2 = std::sin(2.0 * xi);
  const double e2 = std::exp(-2.0 * b2 * s2 * s2);
  const double e1 = std::exp(-4.0 * b2 * s1 * s1);
  const double second = 2.0 * b2 * e2 * std::cos(2.0 * phi - 4.0 * xi - b2 * std::sin(4.0 * xi));
  const double first_arg = phi - xi - b2 * s2;
  const double cq = std::cos(first_arg);
  const double sp = std::sin(first_arg);
  QuadratureRatios r;
  r.ratio_q = std::sqrt(std::max(0.0, 2.0 * b2 + 1.0 + second - 4.0 * b2 * e1 * cq * cq));
  r.ratio_p = std::sqrt(std::max(0.0, 2.0 * b2 + 1.0 - second - 4.0 * b2 * e1 * sp * sp));
  return r;
}

/// Momentum ratio with sin^2(phi - |b|^2 sin 2xi) in the last term, i.e. without
/// the -xi shift. Differs from the Fock-space variance; kept for comparison.
inline double momentum_ratio_unshifted(const KerrStateParams& p) {
  const double b2 = std::norm(p.beta);
  const double phi = std::arg(p.beta);
  const double xi = p.xi;
  const double s1 = std::sin(xi);
  const double s2 = std::sin(2.0 * xi);
  const double second =
      2.0 * b2 * std::exp(-2.0 * b2 * s2 * s2) * std::cos(-2.0 * phi + 4.0 * xi + b2 * std::sin(4.0 * xi));
  const double sp = std::sin(phi - b2 * s2);
  return std::sqrt(std::max(0.0, 2.0 * b2 + 1.0 - second - 4.0 * b2 * std::exp(-4.0 * b2 * s1 * s1) * sp * sp));
}

struct MandelStats {
  double q = 0.0;   ///< (<n^2> - <n>^2)/<n> - 1
  double g2 = 1.0;  ///< g2(0), via Q = <n>(g2 - 1)
  double mean = 0.0;
};

/// Mandel Q from number moments; nullopt for the vacuum, where Q is undefined.
inline std::optional<MandelStats> mandel_q(const FockState& psi) {
  if (!psi.is_normalized()) throw std::invalid_argument("mandel_q: state is not normalized");
  const NumberMoments m = number_moments(psi);
  if (m.mean < 1e-300) return std::nullopt;
  MandelStats s;
  s.mean = m.mean;
  s.q = (m.second - m.mean * m.mean) / m.mean - 1.0;
  s.g2 = 1.0 + s.q / m.mean;
  return s;
}

inline std::optional<MandelStats> mandel_q(const KerrStateParams& p, int n_trunc) {
  return mandel_q(kerr_state(p, n_trunc));
}

inline std::optional<MandelStats> mandel_q(const KerrStateParams& p) { return mandel_q(kerr_state(p)); }

}  // namespace kerrosc
