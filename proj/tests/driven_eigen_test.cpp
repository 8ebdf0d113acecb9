#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <gtest/gtest.h>

#include "kerrosc/driven_eigen.hpp"

namespace kerrosc {
namespace {

constexpr double kPi = std::numbers::pi;

double integrate_line(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-13);
}

TEST(LambdaT, Examples) {
  EXPECT_EQ(lambda_t(DriveSpec::zero(), FrequencySpec(1.3, 0.1), 2.0), 0.0);
  EXPECT_NEAR(lambda_t(DriveSpec::constant(1.0), FrequencySpec(1.0), 0.0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lambda_t(DriveSpec::cosine(1.0, 1.0), FrequencySpec(1.0), 0.0), 0.70711, 5e-6);
  // modulated frequency: Omega(0) = 1 + 2k
  const double w = 1.0 + 2.0 * 0.2;
  EXPECT_NEAR(lambda_t(DriveSpec::constant(0.7), FrequencySpec(1.0, 0.2), 0.0), 0.7 / (w * std::sqrt(2.0 * w)), 1e-15);
}

TEST(SpectrumHf, Examples) {
  EXPECT_DOUBLE_EQ(spectrum_Hf(4, DriveSpec::zero(), FrequencySpec(1.5), 0.3), 4.5 * 1.5);
  EXPECT_NEAR(spectrum_Hf(0, DriveSpec::constant(1.0), FrequencySpec(1.0), 0.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(spectrum_Hf(2, DriveSpec::zero(), FrequencySpec(2.0), 0.0), 5.0);
  EXPECT_THROW(spectrum_Hf(-1, DriveSpec::zero(), FrequencySpec(2.0), 0.0), std::invalid_argument);
}

TEST(HermiteFunction, MatchesBoostPolynomials) {
  for (int n = 0; n <= 30; ++n) {
    const double norm = std::sqrt(std::ldexp(1.0, n) * std::tgamma(n + 1.0) * std::sqrt(kPi));
    for (double x : {-3.1, -0.4, 0.0, 1.2, 4.5}) {
      const double ref = boost::math::hermite(n, x) * std::exp(-0.5 * x * x) / norm;
      EXPECT_NEAR(hermite_function(n, x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << n << " " << x;
    }
  }
}

TEST(HermiteFunction, StableAtHighOrder) {
  const double norm2 = integrate_line([](double x) { return std::pow(hermite_function(200, x), 2); }, -25.0, 25.0);
  EXPECT_NEAR(norm2, 1.0, 1e-8);
  EXPECT_THROW(hermite_function(201, 0.0), std::domain_error);
}

TEST(EigenfunctionHf, GroundStateGaussian) {
  for (double q : {-2.0, -0.5, 0.0, 1.0}) {
    EXPECT_NEAR(eigenfunction_Hf(0, q, DriveSpec::zero(), FrequencySpec(1.0), 0.0),
                std::pow(kPi, -0.25) * std::exp(-0.5 * q * q), 1e-15);
  }
}

TEST(EigenfunctionHf, Normalized) {
  const auto drive = DriveSpec::cosine(0.8, 1.0);
  const FrequencySpec w(1.3, 0.1);
  for (int n = 0; n <= 5; ++n) {
    const double norm2 = integrate_line(
        [&](double q) { return std::pow(eigenfunction_Hf(n, q, drive, w, 0.4), 2); }, -15.0, 15.0);
    EXPECT_NEAR(norm2, 1.0, 1e-8) << n;
  }
}

TEST(EigenfunctionHf, PeakSitsAtPotentialMinimum) {
  const auto drive = DriveSpec::constant(0.6);
  const FrequencySpec w(1.2);
  // minimum of Omega^2 q^2/2 + e q
  const double q_min = -0.6 / (1.2 * 1.2);
  EXPECT_NEAR(displacement_center(drive, w, 0.0), q_min, 1e-15);
  EXPECT_NEAR(std::abs(displacement_center(drive, w, 0.0)), lambda_t(drive, w, 0.0) * std::sqrt(2.0 / 1.2), 1e-15);
  double best_q = 0.0, best = -1.0;
  for (int i = 0; i <= 40000; ++i) {
    const double q = -2.0 + 4.0 * i / 40000;
    const double v = std::pow(eigenfunction_Hf(0, q, drive, w, 0.0), 2);
    if (v > best) best = v, best_q = q;
  }
  EXPECT_NEAR(best_q, q_min, 1e-4);
}

// (-1/2 d^2/dq^2 + Omega^2 q^2/2 + e q) psi = E psi, checked by central differences.
TEST(EigenfunctionHf, SolvesPositionSpaceEigenproblem) {
  const auto drive = DriveSpec::constant(0.9);
  const FrequencySpec w(1.4);
  const double om = 1.4, e = 0.9, h = 1e-3;
  for (int n = 0; n <= 4; ++n) {
    const double energy = spectrum_Hf(n, drive, w, 0.0);
    for (double q : {-1.3, -0.46, 0.2, 0.9}) {
      auto f = [&](double x) { return eigenfunction_Hf(n, x, drive, w, 0.0); };
      const double lap = (f(q + h) - 2.0 * f(q) + f(q - h)) / (h * h);
      const double lhs = -0.5 * lap + (0.5 * om * om * q * q + e * q) * f(q);
      EXPECT_NEAR(lhs, energy * f(q), 1e-5) << n << " " << q;
    }
  }
}

TEST(DisplacedNumberState, ZeroShiftIsIdentity) {
  const auto s = displaced_number_state(3, 0.0, 12);
  EXPECT_LT((s.amplitudes() - FockState::number(3, 12).amplitudes()).norm(), 1e-14);
}

TEST(DisplacedNumberState, GroundIsCoherent) {
  const int n = 40;
  const auto s = displaced_number_state(0, 0.5, n);
  EXPECT_NEAR(std::abs(inner(coherent_state(-0.5, n), s)), 1.0, 1e-10);
}

TEST(DisplacedNumberState, Orthonormal) {
  const int dim = 50;
  for (int m = 0; m <= 5; ++m) {
    for (int n = 0; n <= 5; ++n) {
      const cplx ov = inner(displaced_number_state(m, 1.1, dim), displaced_number_state(n, 1.1, dim));
      EXPECT_NEAR(std::abs(ov - cplx(m == n ? 1.0 : 0.0)), 0.0, 1e-9);
    }
  }
}

TEST(DisplacedNumberState, RejectsSmallTruncation) {
  EXPECT_THROW(displaced_number_state(2, 2.5, 10), truncation_error);
  EXPECT_THROW(displaced_number_state(10, 0.1, 10), std::invalid_argument);
}

TEST(DrivenHamiltonian, EigenResidual) {
  const auto drive = DriveSpec::cosine(0.7, 1.0);
  const FrequencySpec w(1.0);
  const double t = 0.3;
  const int dim = 60;
  const Mat h = driven_hamiltonian(drive, w, t, dim).matrix();
  const double lam = lambda_t(drive, w, t);
  for (int n = 0; n <= 5; ++n) {
    const Vec v = displaced_number_state(n, lam, dim).amplitudes();
    EXPECT_LT((h * v - spectrum_Hf(n, drive, w, t) * v).norm(), 1e-6) << n;
  }
}

TEST(DrivenHamiltonian, SimilarityIdentityOnRandomStates) {
  const int big = 80, low = 20;
  const double om = 1.3;
  const auto drive = DriveSpec::constant(0.5);
  const FrequencySpec w(om);
  const double lam = lambda_t(drive, w, 0.0);
  const Mat d = displacement(lam, big).matrix();
  const Mat h0 = FockOperator::diagonal(big, [om](int n) { return cplx(om * (n + 0.5)); }).matrix();
  const Mat lhs = d.adjoint() * h0 * d;
  const Mat hf = driven_hamiltonian(drive, w, 0.0, big).matrix();
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Vec v = Vec::Zero(big);
    for (int k = 0; k < low; ++k) v[k] = cplx(g(rng), g(rng));
    v /= v.norm();
    const cplx diff = v.dot(lhs * v) - v.dot(hf * v);
    EXPECT_NEAR(diff.real(), om * lam * lam, 1e-8);
    EXPECT_NEAR(diff.imag(), 0.0, 1e-8);
  }
}

// Sampled psi_n^f against the Fock-space displaced state expanded in free
// eigenfunctions.
TEST(DisplacedNumberState, AgreesWithPositionSpace) {
  const auto drive = DriveSpec::constant(0.8);
  const FrequencySpec w(1.0);
  const int dim = 60;
  const double lam = lambda_t(drive, w, 0.0);
  for (int n = 0; n <= 3; ++n) {
    const Vec c = displaced_number_state(n, lam, dim).amplitudes();
    auto fock_wave = [&](double q) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += c[k].real() * free_eigenfunction(k, q, 1.0);
      return s;
    };
    const double overlap = integrate_line([&](double q) { return fock_wave(q) * eigenfunction_Hf(n, q, drive, w, 0.0); },
                                          -15.0, 15.0);
    EXPECT_GT(std::abs(overlap), 1.0 - 1e-6) << n;
  }
}

}  // namespace
}  // namespace kerrosc
