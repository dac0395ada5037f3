#include <gtest/gtest.h>

#include <cmath>

#include "zklab/errors.hpp"
#include "zklab/estimates.hpp"
#include "zklab/rng.hpp"

using namespace zklab;

namespace {

const double kS = -1.0 / 13.0;

SpectralField unit_random(const FrequencyLattice& lat, double kmin, double kmax, std::uint64_t seed) {
  SpectralField u = band_limited_random(lat, kmin, kmax, 1.0, seed);
  u *= 1.0 / std::sqrt(mass(u));
  return u;
}

const SweepCell& cell(const SweepReport& r, const std::string& label) {
  for (const SweepCell& c : r.cells)
    if (c.label == label) return c;
  throw std::out_of_range("no cell " + label);
}

}  // namespace

TEST(SweepReport, Relations) {
  SweepReport r;
  EXPECT_TRUE(r.add("a", 1.0, "<=", 1.0).pass);
  EXPECT_FALSE(r.add("b", 2.0, "<=", 1.0).pass);
  EXPECT_TRUE(r.add("c", 2.0, ">=", 1.0).pass);
  EXPECT_TRUE(r.add("d", 1.5, "in", 1.0, 0, 2.0).pass);
  EXPECT_FALSE(r.add("e", NAN, ">=", 0.0).pass);
  EXPECT_THROW(r.add("f", 0.0, "<", 1.0), std::invalid_argument);
  EXPECT_FALSE(r.pass());
}

TEST(LogLogSlope, PowerLaws) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625}), -2.0, 1e-12);
  EXPECT_NEAR(loglog_slope({2, 4}, {3, 3}), 0.0, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), std::invalid_argument);
  EXPECT_THROW(loglog_slope({1, 2}, {0, 1}), std::invalid_argument);
}

TEST(Fti1, TrivialSymbolGivesZero) {
  const SweepReport r = verify_fti1(SymbolParams::make(0.0, 16), 4000, 1, 0.0);
  EXPECT_TRUE(r.pass());
  for (const SweepCell& c : r.cells) EXPECT_LE(c.observed, 1e-12) << c.label;
}

TEST(Fti1, StrataAndBound) {
  const SweepReport r = verify_fti1(SymbolParams::make(kS, 16), 8000, 3, 0.85);
  ASSERT_EQ(r.cells.size(), 4u);
  EXPECT_TRUE(r.pass());
  EXPECT_LE(cell(r, "all_low").observed, 1e-12);
  EXPECT_EQ(cell(r, "zero_min").observed, 0.0);
  EXPECT_GT(cell(r, "high_high_low").observed, 0.1);
  EXPECT_EQ(cell(r, "equal_scale").samples, 2000u);
  EXPECT_THROW(verify_fti1(SymbolParams::make(kS, 16), 0, 1, 1.0), std::invalid_argument);
}

TEST(Differentiation, SecondOrderIdentity) {
  const FrequencyLattice lat(2.0 * M_PI, 32);
  const SpectralField u0 = unit_random(lat, 1.0, 2.0, 7);
  const SweepReport r = verify_differentiation(u0, {1e-2, 3e-3, 1e-3}, 2, SymbolParams::make(kS, 1), 1e-4);
  EXPECT_TRUE(r.pass());
  EXPECT_LT(cell(r, "residual_at_finest_dt").observed, 1e-5);
}

TEST(Differentiation, ThirdOrderIdentity) {
  const FrequencyLattice lat(2.0 * M_PI, 32);
  const SpectralField u0 = unit_random(lat, 1.0, 2.0, 7);
  const RefinementStudy st = differentiation_refinement(u0, {3e-3, 1e-3}, 3, SymbolParams::make(kS, 1));
  ASSERT_EQ(st.checks.size(), 2u);
  EXPECT_LT(st.checks[1].residual, 1e-4);
  EXPECT_GT(st.order, 1.7);
}

TEST(Differentiation, FreeFlowKeepsModifiedMass) {
  const FrequencyLattice lat(2.0 * M_PI, 32);
  const SpectralField u0 = unit_random(lat, 1.0, 2.0, 8);
  const RefinementStudy st = differentiation_refinement(u0, {1e-3}, 2, SymbolParams::make(kS, 1), false);
  EXPECT_LT(std::abs(st.checks[0].lhs), 1e-12);
}

TEST(Differentiation, GenericRightSideMatchesFastPath) {
  const FrequencyLattice lat(2.0 * M_PI, 16);
  for (std::uint64_t seed : {1, 2, 3}) {
    const SpectralField u = unit_random(lat, 1.0, 3.0, seed);
    const SymbolParams p = SymbolParams::make(kS, 1);
    const cplx generic = differentiation_rhs_generic_k2(u, p);
    const cplx fast = cplx(0.0, 2.0 / 3.0) * lambda3_M3(u, p);
    EXPECT_LT(std::abs(generic - fast), 1e-12 * std::max(1.0, std::abs(fast)));
  }
}

TEST(Differentiation, BudgetAndArguments) {
  const FrequencyLattice lat(2.0 * M_PI, 32);
  const SpectralField u0 = unit_random(lat, 1.0, 8.0, 9);
  EXPECT_THROW(differentiation_refinement(u0, {1e-3}, 3, SymbolParams::make(kS, 1), true, 10),
               std::length_error);
  EXPECT_THROW(differentiation_refinement(u0, {1e-3}, 4, SymbolParams::make(kS, 1)), std::invalid_argument);
}

namespace {

ScanConfig small_scan() {
  ScanConfig c;
  c.modes = 32;
  c.N_list = {2, 4};
  c.delta = 0.01;
  c.dt = 1e-4;
  return c;
}

}  // namespace

TEST(Scan, RejectsBadLists) {
  ScanConfig c = small_scan();
  c.N_list = {4};
  EXPECT_THROW(almost_conservation_scan(c), ConfigError);
  c.N_list = {3, 4};
  EXPECT_THROW(almost_conservation_scan(c), ConfigError);
  c = small_scan();
  c.kmin = 100.0;
  EXPECT_THROW(almost_conservation_scan(c), ConfigError);
}

TEST(Scan, TrivialSymbolIsConserved) {
  ScanConfig c = small_scan();
  c.s = 0.0;
  const ScanResult r = almost_conservation_scan(c);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const ScanRow& row : r.rows) {
    EXPECT_NEAR(row.E1_start, 1.0, 1e-12);
    EXPECT_LT(row.drift, 1e-10);
  }
}

TEST(Scan, FreeFlowKeepsModifiedMass) {
  ScanConfig c = small_scan();
  c.nonlinear = false;
  const ScanResult r = almost_conservation_scan(c);
  for (const ScanRow& row : r.rows) EXPECT_LT(row.E0_drift, 1e-12);
  const SweepReport rep = scan_report(c, r, 10.0);
  EXPECT_EQ(rep.rows.size(), 2u);
  EXPECT_TRUE(rep.pass());
}

TEST(Scan, RatioSamplesFillIntegrals) {
  ScanConfig c = small_scan();
  c.ratio_samples = 4;
  const ScanResult r = almost_conservation_scan(c);
  for (const ScanRow& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.trilinear_ratio));
    EXPECT_TRUE(std::isfinite(row.quadrilinear_ratio));
  }
  c.ratio_samples = 3;
  EXPECT_THROW(almost_conservation_scan(c), ConfigError);
}

TEST(CorrectionBound, SmallLattice) {
  const SweepReport r = verify_correction_bound(2.0 * M_PI, 16, {2, 4}, kS, 2, 1, 1.0);
  EXPECT_EQ(r.cells.size(), 2u);
  EXPECT_TRUE(r.pass());
  const SweepReport z = verify_correction_bound(2.0 * M_PI, 16, {2}, 0.0, 2, 1, 0.0);
  EXPECT_TRUE(z.pass());
}

TEST(Strichartz, FftFriendlySizes) {
  EXPECT_EQ(fft_friendly_size(1), 4);
  EXPECT_EQ(fft_friendly_size(7), 8);
  EXPECT_EQ(fft_friendly_size(11), 12);
  EXPECT_EQ(fft_friendly_size(97), 100);
  EXPECT_EQ(fft_friendly_size(2000), 2000);
  for (int n = 1; n < 3000; n += 37) {
    int m = fft_friendly_size(n);
    EXPECT_GE(m, n);
    EXPECT_EQ(m % 2, 0);
    for (int f : {2, 3, 5})
      while (m % f == 0) m /= f;
    EXPECT_EQ(m, 1);
  }
}

TEST(Strichartz, PacketIsRealAndOnShell) {
  const FrequencyLattice lat(48.0, 128);
  const SpectralField u = shell_packet(lat, {4.0, 0.5}, 1.0, 4, {3.0, -2.0});
  EXPECT_LT(u.hermitian_defect(), 1e-14);
  for (const Mode& m : u.support()) {
    const double r = lat.point(m).norm();
    EXPECT_GT(r, 2.0);
    EXPECT_LT(r, 8.0);
  }
  EXPECT_THROW(shell_packet(FrequencyLattice(4.0, 8), {4.0, 0.0}, 1.0, 4, {}), std::out_of_range);
}

TEST(Strichartz, FreeProductNormOfConstants) {
  const FrequencyLattice lat(2.0 * M_PI, 8);
  const SpectralField one = single_mode(lat, {0, 0}, 1.0, 0.0);
  const double v = free_product_norm(one, one, 0.5, 5);
  EXPECT_NEAR(v, std::sqrt(0.5) * 2.0 * M_PI, 1e-12);
  EXPECT_THROW(free_product_norm(one, one, 0.5, 4), std::invalid_argument);
}

TEST(Strichartz, SmallPairs) {
  StrichartzConfig cfg;
  cfg.trials = 1;
  const SweepReport r = bilinear_strichartz_constant({{1, 1}, {4, 1}}, cfg, 4.0);
  EXPECT_TRUE(r.pass());
  for (const SweepCell& c : r.cells) EXPECT_GT(c.observed, 0.0);
  EXPECT_THROW(bilinear_strichartz_samples(1, 4, cfg), std::invalid_argument);
  EXPECT_THROW(bilinear_strichartz_samples(3, 1, cfg), std::invalid_argument);
}

TEST(Transversality, WorkedAndCollinear) {
  const auto p = [](double x, double y) { return surface_point({x, y}, 0.0); };
  EXPECT_DOUBLE_EQ(std::abs(transversality_det(p(1, 0), p(0, 1), p(-1, -1)).unnormalized), 9.0);
  EXPECT_EQ(transversality_det(p(1, 1), p(2, 2), p(-3, -3)).unnormalized, 0.0);
  const auto n = unit_normal({0.3, -1.2});
  EXPECT_NEAR(n[0] * n[0] + n[1] * n[1] + n[2] * n[2], 1.0, 1e-15);
  EXPECT_EQ(p(1, 2).residual(), 0.0);
}

TEST(Transversality, SweepFactorizes) {
  const SweepReport r = transversality_sweep(2000, 5, 1e-10, 50);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.rows.size(), 2000u);
}

TEST(LoomisWhitney, ZeroFunctionsGiveZero) {
  const LwGeometry geo = near_antipodal_geometry(1.0, 1.0, 0.08, 0.1);
  const PatchFunction f = random_patch_function(geo.P1, 3, 1);
  PatchFunction g{geo.P2, {}};
  LwQuadrature q;
  q.lines = 32;
  q.scan = 512;
  q.across = 16;
  q.patch_points = 16;
  const LwEvaluation e = lw_evaluate(geo, f, g, q);
  EXPECT_EQ(e.conv_norm, 0.0);
  EXPECT_EQ(e.ratio(), 0.0);
}

TEST(LoomisWhitney, PlanesToyIsBounded) {
  const PatchFunction f = random_patch_function({0, 1, 0, 1}, 3, 2);
  const PatchFunction g = random_patch_function({0, 1, -1, 0}, 3, 3);
  const double r = lw_planes_ratio(f, g, 128);
  EXPECT_GT(r, 0.0);
  EXPECT_LE(r, 1.0);
}

TEST(LoomisWhitney, CertifiedLowerBoundIsBelowSamples) {
  for (double b : {0.02, 0.08}) {
    const LwGeometry geo = near_antipodal_geometry(1.0, 1.0, b, 0.1);
    const CertifiedD d = certify_transversality(geo.P1, geo.P2, geo.P3);
    EXPECT_GT(d.lower, 0.0);
    EXPECT_LE(d.lower, d.sampled_min);
    EXPECT_LE(d.sampled_min, d.sampled_max);
  }
}
