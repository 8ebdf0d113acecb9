#pragma once

// Truncated Fock-space substrate: pure states as amplitude vectors over
// |0>..|N-1>, dense operators, coherent states and moments.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "kerrosc/errors.hpp"

namespace kerrosc {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kCoherentTailTolerance = 1e-12;

/// Basis size that keeps a Poisson support of the given mean (mean + 10 sigma + 10).
inline int default_truncation(double mean_occupation) {
  return static_cast<int>(std::ceil(mean_occupation + 10.0 * std::sqrt(mean_occupation + 1.0) + 10.0));
}

/// log(|z|^n / sqrt(n!)), with the n = 0 term exact for z = 0.
inline double log_amplitude(double log_abs_z, int n) {
  return n == 0 ? 0.0 : n * log_abs_z - 0.5 * std::lgamma(n + 1.0);
}

/// Sum_{n >= n_trunc} e^{-mean} mean^n / n!, accumulated term by term in log space.
inline double poisson_tail(double mean, int n_trunc) {
  if (mean < 0.0) throw std::invalid_argument("poisson_tail: negative mean");
  if (n_trunc <= 0) return 1.0;
  if (mean == 0.0) return 0.0;
  const double log_mean = std::log(mean);
  double tail = 0.0;
  for (int n = n_trunc;; ++n) {
    const double term = std::exp(n * log_mean - mean - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term <= 1e-17 * tail) break;
    if (n > n_trunc + 100000) break;
  }
  return tail;
}

/// Pure state on a truncated number basis.
///
/// Physical constructors (coherent, number, Kerr, evolved states) produce unit
/// norm; images under non-unitary operators (e.g. a|psi>) are carried by the
/// same type and simply report `is_normalized() == false`.
class FockState {
 public:
  explicit FockState(Vec amplitudes, bool renormalized = false)
      : amps_(std::move(amplitudes)), renormalized_(renormalized) {
    if (amps_.size() < 1) throw std::invalid_argument("FockState: n_trunc must be >= 1");
    if (!amps_.allFinite()) throw std::invalid_argument("FockState: non-finite amplitude");
  }

  static FockState number(int n, int n_trunc) {
    if (n < 0 || n >= n_trunc) throw std::invalid_argument("FockState::number: level outside basis");
    Vec v = Vec::Zero(n_trunc);
    v[n] = 1.0;
    return FockState(std::move(v));
  }

  static FockState vacuum(int n_trunc) { return number(0, n_trunc); }

  const Vec& amplitudes() const noexcept { return amps_; }
  int n_trunc() const noexcept { return static_cast<int>(amps_.size()); }
  cplx operator[](int n) const { return amps_[n]; }

  double norm() const { return amps_.norm(); }
  bool is_normalized() const { return std::abs(norm() - 1.0) <= kNormTolerance; }

  /// True when the amplitudes were rescaled after truncation.
  bool renormalized() const noexcept { return renormalized_; }

  /// |c_n|^2 for every level.
  Eigen::VectorXd populations() const { return amps_.cwiseAbs2(); }

  FockState normalized() const {
    const double nrm = norm();
    if (nrm == 0.0) throw std::domain_error("FockState::normalized: zero vector");
    return FockState(amps_ / nrm, true);
  }

 private:
  Vec amps_;
  bool renormalized_ = false;
};

/// Dense operator on the truncated basis.
class FockOperator {
 public:
  explicit FockOperator(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) throw std::invalid_argument("FockOperator: matrix must be square");
  }

  static FockOperator identity(int n_trunc) { return FockOperator(Mat::Identity(n_trunc, n_trunc)); }

  /// <n|a|n+1> = sqrt(n+1).
  static FockOperator annihilation(int n_trunc) {
    Mat m = Mat::Zero(n_trunc, n_trunc);
    for (int n = 0; n + 1 < n_trunc; ++n) m(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    return FockOperator(std::move(m));
  }

  static FockOperator creation(int n_trunc) { return annihilation(n_trunc).adjoint(); }

  static FockOperator number(int n_trunc) {
    return diagonal(n_trunc, [](int n) { return cplx(n, 0.0); });
  }

  /// f(n) on the diagonal.
  template <class F>
  static FockOperator diagonal(int n_trunc, F&& f) {
    Mat m = Mat::Zero(n_trunc, n_trunc);
    for (int n = 0; n < n_trunc; ++n) m(n, n) = f(n);
    return FockOperator(std::move(m));
  }

  const Mat& matrix() const noexcept { return m_; }
  int n_trunc() const noexcept { return static_cast<int>(m_.rows()); }

  FockOperator adjoint() const { return FockOperator(m_.adjoint()); }

  friend FockOperator operator*(const FockOperator& x, const FockOperator& y) {
    check_dims(x, y);
    return FockOperator(x.m_ * y.m_);
  }
  friend FockOperator operator+(const FockOperator& x, const FockOperator& y) {
    check_dims(x, y);
    return FockOperator(x.m_ + y.m_);
  }
  friend FockOperator operator-(const FockOperator& x, const FockOperator& y) {
    check_dims(x, y);
    return FockOperator(x.m_ - y.m_);
  }
  friend FockOperator operator*(cplx s, const FockOperator& x) { return FockOperator(s * x.m_); }

 private:
  static void check_dims(const FockOperator& x, const FockOperator& y) {
    if (x.n_trunc() != y.n_trunc()) throw std::invalid_argument("FockOperator: dimension mismatch");
  }

  Mat m_;
};

inline FockOperator commutator(const FockOperator& x, const FockOperator& y) { return x * y - y * x; }

inline FockState apply(const FockOperator& op, const FockState& psi) {
  if (op.n_trunc() != psi.n_trunc()) {
    throw std::invalid_argument("apply: operator is " + std::to_string(op.n_trunc()) + "-dimensional, state is " +
                                std::to_string(psi.n_trunc()));
  }
  return FockState(op.matrix() * psi.amplitudes());
}

/// <psi|phi>.
inline cplx inner(const FockState& psi, const FockState& phi) {
  if (psi.n_trunc() != phi.n_trunc()) throw std::invalid_argument("inner: dimension mismatch");
  return psi.amplitudes().dot(phi.amplitudes());
}

/// <psi|op|psi> for a normalized state.
inline cplx expectation(const FockOperator& op, const FockState& psi) {
  if (op.n_trunc() != psi.n_trunc()) throw std::invalid_argument("expectation: dimension mismatch");
  if (!psi.is_normalized()) throw std::invalid_argument("expectation: state is not normalized");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

/// First two number moments computed from populations (no operator matrices).
struct NumberMoments {
  double mean = 0.0;
  double second = 0.0;
};

inline NumberMoments number_moments(const FockState& psi) {
  NumberMoments m;
  const Eigen::VectorXd p = psi.populations();
  for (int n = 0; n < p.size(); ++n) {
    m.mean += n * p[n];
    m.second += static_cast<double>(n) * n * p[n];
  }
  return m;
}

/// Raw coherent-state amplitudes e^{-|z|^2/2} z^n / sqrt(n!) for n < n_trunc,
/// neither tail-checked nor renormalized: exact projections <n|z>.
inline Vec coherent_amplitudes(cplx z, int n_trunc) {
  Vec v(n_trunc);
  const double r = std::abs(z);
  if (r == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  const double log_r = std::log(r);
  const double phase = std::arg(z);
  const double half_mass = 0.5 * r * r;
  for (int n = 0; n < n_trunc; ++n) v[n] = std::polar(std::exp(log_amplitude(log_r, n) - half_mass), n * phase);
  return v;
}

/// Coherent state |alpha> truncated to n_trunc levels and renormalized.
/// Throws truncation_error when the discarded Poisson tail exceeds tail_tol.
inline FockState coherent_state(cplx alpha, int n_trunc, double tail_tol = kCoherentTailTolerance) {
  if (n_trunc < 1) throw std::invalid_argument("coherent_state: n_trunc must be >= 1");
  const double tail = poisson_tail(std::norm(alpha), n_trunc);
  if (tail > tail_tol) {
    throw truncation_error("coherent_state: n_trunc=" + std::to_string(n_trunc) + " leaves tail mass " +
                           format_number(tail) + " for |alpha|^2=" + format_number(std::norm(alpha)));
  }
  return FockState(coherent_amplitudes(alpha, n_trunc), true).normalized();
}

inline FockState coherent_state(cplx alpha) { return coherent_state(alpha, default_truncation(std::norm(alpha))); }

}  // namespace kerrosc
