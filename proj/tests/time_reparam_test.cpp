#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "kerrosc/kerr_evolution.hpp"
#include "kerrosc/oracle.hpp"
#include "kerrosc/time_reparam.hpp"

namespace kerrosc {
namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-13);
}

TEST(RhoMap, UnitMassIsIdentity) {
  EXPECT_DOUBLE_EQ(rho_map(MassSpec::constant(1.0), 5.0), 5.0);
  EXPECT_DOUBLE_EQ(rho_inverse(MassSpec::constant(1.0), 5.0), 5.0);
}

TEST(RhoMap, ExponentialMatchesQuadrature) {
  const auto m = MassSpec::exponential(1.0, 0.5);
  const double ref = gk([](double s) { return std::exp(-0.5 * s); }, 0.0, 2.0);
  EXPECT_NEAR(rho_map(m, 2.0), ref, 1e-13);
  EXPECT_NEAR(rho_map(m, 2.0), 1.26424, 1e-5);
}

TEST(RhoMap, ExponentialSaturates) {
  const auto m = MassSpec::exponential(1.0, 1.0);
  EXPECT_NEAR(rho_map(m, 60.0), 1.0, 1e-15);
  EXPECT_THROW(rho_inverse(m, 1.0), std::domain_error);
  EXPECT_NEAR(rho_map(m, rho_inverse(m, 0.7)), 0.7, 1e-14);
}

TEST(RhoMap, TabulatedMatchesQuadratureOfInterpolant) {
  std::vector<double> t, v;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.25 * i);
    v.push_back(1.0 + 0.5 * std::sin(0.25 * i));
  }
  const auto m = MassSpec::tabulated(t, v);
  for (double x : {0.3, 1.7, 4.9, 5.0}) {
    // the interpolant is only piecewise smooth, so integrate knot by knot
    double ref = 0.0;
    for (std::size_t i = 0; i + 1 < t.size() && t[i] < x; ++i) {
      ref += gk([&m](double s) { return 1.0 / m(s); }, t[i], std::min(t[i + 1], x));
    }
    EXPECT_NEAR(rho_map(m, x), ref, 1e-10 * ref);
    EXPECT_NEAR(rho_inverse(m, rho_map(m, x)), x, 1e-10);
  }
  EXPECT_THROW(rho_map(m, 5.1), std::out_of_range);
}

TEST(RhoMap, RejectsInvalidInput) {
  EXPECT_THROW(rho_map(MassSpec::constant(1.0), -1.0), std::invalid_argument);
  EXPECT_THROW(MassSpec::constant(0.0), std::invalid_argument);
  EXPECT_THROW(MassSpec::tabulated({0, 1, 2, 3}, {1, 1, -1, 1}), std::invalid_argument);
  EXPECT_THROW(MassSpec::tabulated({0.5, 1, 2, 3}, {1, 1, 1, 1}), std::invalid_argument);
}

TEST(RhoMap, StrictlyIncreasingForRandomTabulatedMasses) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> mass(0.1, 5.0);
  std::uniform_real_distribution<double> gap(0.05, 0.6);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> t = {0.0}, v = {mass(rng)};
    for (int i = 0; i < 9; ++i) {
      t.push_back(t.back() + gap(rng));
      v.push_back(mass(rng));
    }
    const auto m = MassSpec::tabulated(t, v);
    double prev = rho_map(m, 0.0);
    EXPECT_EQ(prev, 0.0);
    for (int k = 1; k <= 40; ++k) {
      const double tau = rho_map(m, k == 40 ? t.back() : t.back() * k / 40.0);
      EXPECT_GT(tau, prev);
      prev = tau;
    }
  }
}

TEST(TransformedFrequency, Examples) {
  EXPECT_DOUBLE_EQ(transformed_frequency(MassSpec::constant(1.0), FrequencySpec(1.3, 0.2), 0.4), FrequencySpec(1.3, 0.2)(0.4));
  EXPECT_DOUBLE_EQ(transformed_frequency(MassSpec::constant(2.0), FrequencySpec(3.0), 1.0), 6.0);
  const auto m = MassSpec::exponential(1.5, 0.2);
  EXPECT_NEAR(transformed_frequency(m, FrequencySpec(0.8), 2.0), 1.5 * 0.8 * std::exp(0.4), 1e-14);
}

TEST(SpectrumH, Examples) {
  EXPECT_DOUBLE_EQ(spectrum_H(0, FrequencySpec(1.0), 0.0), 0.5);
  EXPECT_DOUBLE_EQ(spectrum_H(3, FrequencySpec(2.0), 1.0), 7.0);
  EXPECT_THROW(spectrum_H(-1, FrequencySpec(1.0), 0.0), std::invalid_argument);
  // frequency modulation enters, the mass does not
  EXPECT_NEAR(spectrum_H(1, FrequencySpec(1.0, 0.25), 0.0), 1.5 * 1.5, 1e-15);
}

TEST(FrequencySpec, RejectsOutOfRangeConfinement) {
  EXPECT_THROW(FrequencySpec(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(FrequencySpec(1.0, 0.6), std::invalid_argument);
  EXPECT_THROW(FrequencySpec(0.0, 0.1), std::invalid_argument);
}

TEST(HeisenbergExpMass, IdentityAtZero) {
  const auto c = heisenberg_exp_mass(1.3, 0.9, 0.4, 0.0);
  EXPECT_NEAR(c.c_qq, 1.0, 1e-14);
  EXPECT_NEAR(c.c_qp, 0.0, 1e-14);
  EXPECT_NEAR(c.c_pq, 0.0, 1e-14);
  EXPECT_NEAR(c.c_pp, 1.0, 1e-14);
}

TEST(HeisenbergExpMass, ConstantMassLimit) {
  const double m0 = 1.7, w = 1.2, t = 3.3;
  const auto c = heisenberg_exp_mass(m0, w, 1e-9, t);
  EXPECT_NEAR(c.c_qq, std::cos(w * t), 1e-8);
  EXPECT_NEAR(c.c_qp, std::sin(w * t) / (m0 * w), 1e-8);
  EXPECT_NEAR(c.c_pq, -m0 * w * std::sin(w * t), 1e-8);
  EXPECT_NEAR(c.c_pp, std::cos(w * t), 1e-8);
}

TEST(HeisenbergExpMass, DeterminantIsOne) {
  EXPECT_NEAR(heisenberg_exp_mass(1.0, 1.0, 0.4, 2.0).determinant(), 1.0, 1e-12);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> time(0.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(heisenberg_exp_mass(0.8, 1.1, 0.5, time(rng)).determinant(), 1.0, 1e-10);
  }
}

// Classical equations q' = p/m(t), p' = -m(t) w0^2 q, integrated by odeint.
TEST(HeisenbergExpMass, MatchesEquationsOfMotion) {
  const double m0 = 1.2, w0 = 0.9, g = 0.35, t_end = 6.0;
  namespace oi = boost::numeric::odeint;
  using S = std::vector<double>;
  auto sys = [&](const S& x, S& dx, double t) {
    const double m = m0 * std::exp(g * t);
    dx[0] = x[1] / m;
    dx[1] = -m * w0 * w0 * x[0];
  };
  S from_q = {1.0, 0.0}, from_p = {0.0, 1.0};
  auto stepper = oi::make_controlled(1e-13, 1e-13, oi::runge_kutta_fehlberg78<S>());
  oi::integrate_adaptive(stepper, sys, from_q, 0.0, t_end, 1e-3);
  oi::integrate_adaptive(stepper, sys, from_p, 0.0, t_end, 1e-3);
  const auto c = heisenberg_exp_mass(m0, w0, g, t_end);
  EXPECT_NEAR(c.c_qq, from_q[0], 1e-9);
  EXPECT_NEAR(c.c_pq, from_q[1], 1e-9);
  EXPECT_NEAR(c.c_qp, from_p[0], 1e-9);
  EXPECT_NEAR(c.c_pp, from_p[1], 1e-9);
}

TEST(HeisenbergExpMass, RejectsOverdamped) {
  EXPECT_THROW(heisenberg_exp_mass(1.0, 1.0, 2.0, 1.0), std::domain_error);
  EXPECT_THROW(heisenberg_exp_mass(1.0, 1.0, 3.0, 1.0), std::domain_error);
}

// H(t) = p^2/(2m) + m w0^2 q^2/2 on a truncated Fock basis of unit frequency.
struct TruncatedOscillator {
  Mat q2, p2;
  explicit TruncatedOscillator(int n) {
    // build on a larger space so the truncated q^2, p^2 have exact corners
    const auto a = FockOperator::annihilation(n + 2).matrix();
    const Mat ad = a.adjoint();
    const Mat q = (a + ad) / std::sqrt(2.0);
    const Mat p = kI * (ad - a) / std::sqrt(2.0);
    q2 = (q * q).topLeftCorner(n, n);
    p2 = (p * p).topLeftCorner(n, n);
  }
  Mat h(double mass, double w0) const { return 0.5 * p2 / mass + 0.5 * mass * w0 * w0 * q2; }
};

TEST(EvolveViaTimemap, ZeroTimeAndUnitMass) {
  const auto psi0 = coherent_state(0.5, 20);
  auto never = [](const FockState&, double) -> FockState { throw std::logic_error("should not be called"); };
  const auto same = evolve_via_timemap(psi0, MassSpec::exponential(1.0, 0.3), never, 0.0);
  EXPECT_EQ(same.amplitudes(), psi0.amplitudes());

  const TruncatedOscillator osc(20);
  auto star = [&](const FockState& psi, double tau) {
    return integrate_schrodinger([&](double) { return osc.h(1.0, 1.0); }, psi, 0.0, tau);
  };
  const auto direct = integrate_schrodinger([&](double) { return osc.h(1.0, 1.0); }, psi0, 0.0, 2.0);
  EXPECT_GT(fidelity(evolve_via_timemap(psi0, MassSpec::constant(1.0), star, 2.0), direct), 1.0 - 1e-12);
}

TEST(EvolveViaTimemap, ExponentialMassAgreesWithDirectIntegration) {
  const int n = 40;
  const double m0 = 1.0, w0 = 1.0, g = 0.3;
  const auto mass = MassSpec::exponential(m0, g);
  const TruncatedOscillator osc(n);
  // H*(t) = p^2/2 + omega(t)^2 q^2/2, omega = m Omega; H(t) = H*(t)/m(t)
  auto h_star = [&](double t) {
    const double m = mass(t);
    return Mat(0.5 * osc.p2 + 0.5 * m * m * w0 * w0 * osc.q2);
  };
  auto star = [&](const FockState& psi, double tau) {
    return integrate_schrodinger([&](double s) { return h_star(rho_inverse(mass, s)); }, psi, 0.0, tau);
  };
  const auto psi0 = coherent_state(cplx(0.8, 0.3), n);
  for (double t : {1.0, 2.5, 5.0}) {
    const auto direct = integrate_schrodinger([&](double s) { return osc.h(mass(s), w0); }, psi0, 0.0, t);
    const auto mapped = evolve_via_timemap(psi0, mass, star, t);
    EXPECT_GT(fidelity(direct, mapped), 1.0 - 1e-8) << "t=" << t;
  }
}

}  // namespace
}  // namespace kerrosc
