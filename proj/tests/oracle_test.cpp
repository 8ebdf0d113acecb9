#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kerrosc/oracle.hpp"

namespace kerrosc {
namespace {

ModelParams model(double chi, DriveSpec drive, cplx alpha, double omega0 = 1.0) {
  ModelParams p;
  p.omega0 = omega0;
  p.chi = chi;
  p.drive = std::move(drive);
  p.alpha = alpha;
  return p;
}

TEST(Fidelity, Basics) {
  const auto psi = coherent_state(cplx(0.3, 0.9), 30);
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-14);
  EXPECT_EQ(fidelity(FockState::number(2, 10), FockState::number(5, 10)), 0.0);
  EXPECT_NEAR(fidelity(coherent_state(1.0, 40), coherent_state(1.5, 40)), std::exp(-0.25), 1e-12);
  EXPECT_THROW(fidelity(FockState::vacuum(4), FockState::vacuum(5)), std::invalid_argument);
}

TEST(IntegrateExact, UndrivenNumberStateOnlyGainsPhase) {
  const auto p = model(0.3, DriveSpec::zero(), 0.0, 1.2);
  const int n = 4, dim = 20;
  const std::vector<double> times = {0.0, 1.0, 7.3};
  const auto run = integrate_exact(p, FockState::number(n, dim), times);
  ASSERT_EQ(run.states.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Vec want = Vec::Zero(dim);
    want[n] = std::polar(1.0, -(1.2 * (n + 0.5) + 0.3 * n * n) * times[i]);
    EXPECT_LT((run.states[i].amplitudes() - want).norm(), 1e-10);
  }
}

TEST(IntegrateExact, MatchesDenseIntegration) {
  const auto p = model(0.1, DriveSpec::cosine(0.8, 1.0), cplx(1.0, 0.3));
  const int dim = 40;
  const auto psi0 = coherent_state(p.alpha, dim);
  const auto run = integrate_exact(p, psi0, std::vector<double>{3.0}, 1e-11);
  const auto dense =
      integrate_schrodinger([&](double t) { return full_hamiltonian(p, t, dim).matrix(); }, psi0, 0.0, 3.0, 1e-11);
  EXPECT_GT(fidelity(run.states.back(), dense), 1.0 - 1e-10);
  EXPECT_LT((run.states.back().amplitudes() - dense.amplitudes()).norm(), 1e-8);
}

TEST(IntegrateExact, KerrFreeMatchesWeiNorman) {
  const auto p = model(0.0, DriveSpec::cosine(1.0, 1.0), 3.0);
  const double t_end = 8.0 * std::numbers::pi;
  const auto sol = integrate_wei_norman(p, t_end, 1e-11);
  const int dim = 200;
  const auto run = integrate_exact(p, coherent_state(p.alpha, dim), t_end, 1e-11, 9);
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    EXPECT_GT(fidelity(evolved_state(p, sol, run.times[i], dim), run.states[i]), 1.0 - 1e-7) << run.times[i];
  }
}

TEST(IntegrateExact, UnitarityAndEnergyWithoutDrive) {
  const auto p = model(0.25, DriveSpec::zero(), cplx(2.0, -1.0));
  const int dim = 50;
  const auto run = integrate_exact(p, coherent_state(p.alpha, dim), 20.0, 1e-10, 11);
  EXPECT_LE(run.max_norm_drift(), 1e-8);
  const auto h0 = bare_hamiltonian(p, dim);
  const double e0 = expectation(h0, run.states.front()).real();
  for (const auto& s : run.states) EXPECT_NEAR(expectation(h0, s).real(), e0, 1e-9);
}

TEST(IntegrateExact, RejectsBadInitialState) {
  const auto p = model(0.1, DriveSpec::cosine(1.0, 1.0), 1.0);
  EXPECT_THROW(integrate_exact(p, FockState::vacuum(8), 1.0), std::invalid_argument);
  Vec v = Vec::Zero(20);
  v[3] = 2.0;
  EXPECT_THROW(integrate_exact(p, FockState(v), 1.0), std::invalid_argument);
  EXPECT_THROW(integrate_exact(p, FockState::number(15, 20), 1.0), truncation_error);
}

TEST(IntegrateExact, DetectsTruncationBoundary) {
  // resonant drive pumps a small basis to its edge
  const auto p = model(0.0, DriveSpec::cosine(2.0, 1.0), 0.0);
  try {
    integrate_exact(p, FockState::vacuum(15), 40.0, 1e-10, 41);
    FAIL() << "expected truncation_error";
  } catch (const truncation_error& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 40.0);
  }
}

TEST(IntegrateExact, LooseToleranceTripsNormGuard) {
  const auto p = model(0.05, DriveSpec::cosine(1.0, 1.0), 1.0);
  EXPECT_THROW(integrate_exact(p, coherent_state(p.alpha, 60), std::vector<double>{6.0}, 1e-6), numerical_error);
}

TEST(IntegrateExact, FidelityDeficitShrinksWithTolerance) {
  const auto p = model(0.05, DriveSpec::cosine(1.0, 1.0), 1.0);
  const int dim = 60;
  const auto psi0 = coherent_state(p.alpha, dim);
  const double t = 6.0;
  const auto ref = integrate_exact(p, psi0, std::vector<double>{t}, 1e-13).states.back();
  const double loose = 1.0 - fidelity(integrate_exact(p, psi0, std::vector<double>{t}, 5e-9).states.back(), ref);
  const double tight = 1.0 - fidelity(integrate_exact(p, psi0, std::vector<double>{t}, 5e-11).states.back(), ref);
  EXPECT_LT(tight, loose);
  EXPECT_LT(tight, 1e-9);
}

}  // namespace
}  // namespace kerrosc
