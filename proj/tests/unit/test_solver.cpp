#include <gtest/gtest.h>

#include <cmath>

#include "zklab/errors.hpp"
#include "zklab/functionals.hpp"
#include "zklab/solver.hpp"

using namespace zklab;

namespace {

SpectralField final_state(const FrequencyLattice& lat, const SpectralField& u0, double T, double dt,
                          Scheme scheme = Scheme::IFRK4) {
  SolverConfig sc;
  sc.dt = dt;
  sc.scheme = scheme;
  sc.record_every = std::max(1, static_cast<int>(std::llround(T / std::abs(dt))));
  return ZkSolver(lat, sc).solve(u0, T).states.back();
}

}  // namespace

TEST(LinearPhase, Values) {
  EXPECT_EQ(linear_phase({3.0, -2.0}, 0.0), cplx(1.0, 0.0));
  const cplx v = linear_phase({1.0, 0.0}, M_PI);
  EXPECT_NEAR(v.real(), -1.0, 1e-15);
  EXPECT_NEAR(v.imag(), 0.0, 1e-15);
  for (double t = -3; t < 3; t += 0.37) EXPECT_NEAR(std::abs(linear_phase({t, 2 * t}, t)), 1.0, 1e-15);
}

TEST(Step, ZeroStaysZero) {
  const FrequencyLattice lat(2.0 * M_PI, 16);
  const SpectralField z(lat);
  EXPECT_EQ(mass(ZkSolver(lat, SolverConfig{}).step(z)), 0.0);
}

TEST(Step, FreeFlowRotatesSingleMode) {
  const FrequencyLattice lat(2.0 * M_PI, 16);
  SolverConfig sc;
  sc.dt = 0.01;
  sc.nonlinear = false;
  const Mode m{2, 1};
  const SpectralField u0 = single_mode(lat, m, 1.0, 0.5);
  const Trajectory tr = ZkSolver(lat, sc).solve(u0, 0.37);
  const double t = tr.times.back();
  const cplx expect = u0[m] * linear_phase(lat.point(m), t);
  EXPECT_NEAR(std::abs(tr.states.back()[m] - expect), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(tr.states.back()[-m] - std::conj(expect)), 0.0, 1e-13);
}

TEST(Step, SmallAmplitudeMassChange) {
  const FrequencyLattice lat(20.0, 64);
  SpectralField u = gaussian_bump(lat, 1e-3, 1.0, 10.0, 10.0);
  apply_dealias(u);
  SolverConfig sc;
  sc.dt = 1e-3;
  const double m0 = mass(u);
  EXPECT_LT(std::abs(mass(ZkSolver(lat, sc).step(u)) - m0) / m0, 1e-12);
}

TEST(Solve, ZeroHorizonGivesSingleState) {
  const FrequencyLattice lat(2.0 * M_PI, 16);
  const Trajectory tr = ZkSolver(lat, SolverConfig{}).solve(single_mode(lat, {1, 0}, 1, 0), 0.0);
  ASSERT_EQ(tr.states.size(), 1u);
  EXPECT_EQ(tr.times[0], 0.0);
}

TEST(Solve, ConservesMassAndEnergy) {
  const FrequencyLattice lat(20.0, 64);
  SolverConfig sc;
  sc.dt = 1e-3;
  sc.record_every = 100;
  const Trajectory tr = ZkSolver(lat, sc).solve(gaussian_bump(lat, 1.0, 1.0, 10.0, 10.0), 1.0);
  const double m0 = mass(tr.states[0]), e0 = energy(tr.states[0]);
  for (const auto& u : tr.states) {
    EXPECT_LT(std::abs(mass(u) - m0) / m0, 1e-8);
    EXPECT_LT(std::abs(energy(u) - e0) / std::abs(e0), 1e-6);
    EXPECT_LT(u.hermitian_defect(), 1e-12);
  }
}

TEST(Solve, FourthOrderSelfConvergence) {
  const FrequencyLattice lat(20.0, 32);
  const SpectralField u0 = gaussian_bump(lat, 1.5, 1.2, 10.0, 10.0);
  const SpectralField a = final_state(lat, u0, 0.4, 0.02);
  const SpectralField b = final_state(lat, u0, 0.4, 0.01);
  const SpectralField c = final_state(lat, u0, 0.4, 0.005);
  const double ratio = l2_distance(a, b) / l2_distance(b, c);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Solve, SchemesAgree) {
  const FrequencyLattice lat(20.0, 32);
  const SpectralField u0 = gaussian_bump(lat, 1.0, 1.0, 10.0, 10.0);
  const SpectralField a = final_state(lat, u0, 0.5, 1e-3, Scheme::IFRK4);
  const SpectralField b = final_state(lat, u0, 0.5, 1e-3, Scheme::ETDRK4);
  EXPECT_LT(l2_distance(a, b) / std::sqrt(mass(a)), 1e-8);
}

TEST(Solve, TimeReversal) {
  const FrequencyLattice lat(20.0, 32);
  const SpectralField u0 = final_state(lat, gaussian_bump(lat, 1.0, 1.0, 10.0, 10.0), 0.0, 1e-3);
  const SpectralField fwd = final_state(lat, u0, 0.3, 1e-3);
  const SpectralField back = final_state(lat, fwd, 0.3, -1e-3);
  EXPECT_LT(l2_distance(back, u0) / std::sqrt(mass(u0)), 1e-9);
}

TEST(Solve, ScalingSymmetry) {
  // u_lambda(t, x) = lambda^2 u(lambda^3 t, lambda x) solves the same equation.
  const double lambda = 0.5;
  const FrequencyLattice lat(20.0, 32);
  const SpectralField u0 = final_state(lat, gaussian_bump(lat, 1.0, 1.0, 10.0, 10.0), 0.0, 1e-3);
  const SpectralField uT = final_state(lat, u0, 0.2, 1e-3);
  const SpectralField v0 = rescale(u0, lambda);
  const SpectralField vT = final_state(v0.lattice(), v0, rescaled_horizon(0.2, lambda), 8e-3);
  EXPECT_LT(l2_distance(rescale(uT, lambda), vT) / std::sqrt(mass(vT)), 1e-9);
}

TEST(Solve, DealiasedStateStaysInDealiasSet) {
  const FrequencyLattice lat(20.0, 32);
  const SpectralField u = final_state(lat, gaussian_bump(lat, 2.0, 0.6, 10.0, 10.0), 0.1, 1e-3);
  for (const Mode& m : u.support()) EXPECT_TRUE(in_dealias_set(m, lat.modes()));
}

TEST(Solve, RejectsBadConfig) {
  const FrequencyLattice lat(2.0 * M_PI, 16);
  SolverConfig sc;
  sc.dt = 0.0;
  EXPECT_THROW(ZkSolver(lat, sc), std::invalid_argument);
  sc.dt = 1e-3;
  sc.record_every = 0;
  EXPECT_THROW(ZkSolver(lat, sc), std::invalid_argument);
  sc.record_every = 1;
  sc.dt = 10.0;
  EXPECT_THROW(ZkSolver(lat, sc), std::invalid_argument);
  EXPECT_THROW(scheme_from_name("euler"), std::invalid_argument);
}
