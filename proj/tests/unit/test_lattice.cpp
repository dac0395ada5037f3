#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "zklab/lattice.hpp"
#include "zklab/rng.hpp"

using namespace zklab;

TEST(Lattice, TwoPiBoxHasIntegerFrequencies) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 8);
  EXPECT_DOUBLE_EQ(lat.spacing(), 1.0);
  EXPECT_EQ(lat.kmin(), -4);
  EXPECT_EQ(lat.kmax(), 3);
  std::set<double> xs;
  for (const Mode& m : lat.all_modes()) xs.insert(lat.point(m).xi);
  EXPECT_EQ(xs, (std::set<double>{-4, -3, -2, -1, 0, 1, 2, 3}));
}

TEST(Lattice, SpacingIsTwoPiOverBox) {
  EXPECT_DOUBLE_EQ(build_lattice(4.0 * M_PI, 8).spacing(), 0.5);
  EXPECT_DOUBLE_EQ(build_lattice(20.0, 16).spacing(), 2.0 * M_PI / 20.0);
}

TEST(Lattice, RejectsOddOrNonPositive) {
  EXPECT_THROW(build_lattice(2.0 * M_PI, 7), std::invalid_argument);
  EXPECT_THROW(build_lattice(0.0, 8), std::invalid_argument);
  EXPECT_THROW(build_lattice(-1.0, 8), std::invalid_argument);
}

TEST(Lattice, IndexFrequencyRoundTrip) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 * static_cast<int>(rng.between(2, 256));
    const FrequencyLattice lat(rng.uniform(0.5, 100.0), n);
    for (int j = 0; j < 50; ++j) {
      const std::int64_t k = rng.between(lat.kmin(), lat.kmax());
      const auto back = lat.index_of(lat.freq(k));
      ASSERT_TRUE(back.has_value());
      EXPECT_EQ(*back, k);
    }
    EXPECT_FALSE(lat.index_of(lat.freq(lat.kmax() + 1)).has_value());
    EXPECT_FALSE(lat.index_of(0.5 * lat.spacing()).has_value());
  }
}

TEST(Lattice, FlatSlotRoundTrip) {
  const FrequencyLattice lat(3.0, 12);
  std::set<std::size_t> seen;
  for (const Mode& m : lat.all_modes()) {
    EXPECT_EQ(lat.mode_of_flat(lat.flat(m)), m);
    seen.insert(lat.flat(m));
  }
  EXPECT_EQ(seen.size(), 144u);
}

TEST(Cutoffs, ChiAndPsiShape) {
  EXPECT_EQ(chi(0.0), 1.0);
  EXPECT_EQ(chi(1.0), 1.0);
  EXPECT_EQ(chi(2.0), 0.0);
  EXPECT_EQ(chi(-1.5), chi(1.5));
  Rng rng(3);
  double prev = 1.0;
  for (double x = 1.0; x <= 2.0; x += 1e-3) {
    EXPECT_LE(chi(x), prev + 1e-15);
    prev = chi(x);
  }
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(0.0, 8.0);
    EXPECT_GE(psi(x), 0.0);
    if (x <= 0.5 || x >= 2.0) EXPECT_EQ(psi(x), 0.0);
  }
}

TEST(Shells, UnitShellSupport) {
  const FrequencyLattice lat = build_lattice(8.0 * M_PI, 32);  // spacing 1/4
  const auto shell = lat.dyadic_shell(1);
  std::set<Mode> in(shell.begin(), shell.end());
  for (const Mode& m : lat.all_modes()) {
    const double r = lat.point(m).norm();
    if (in.count(m)) {
      EXPECT_GE(r, 0.5);
      EXPECT_LE(r, 2.0);
    } else {
      EXPECT_TRUE(r <= 0.5 || r >= 2.0) << r;
    }
  }
}

TEST(Shells, CoreIsDiskOfRadiusTwo) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 16);
  for (const Mode& m : lat.dyadic_shell(0)) EXPECT_LE(lat.point(m).norm(), 2.0);
  EXPECT_THROW(lat.dyadic_shell(3), std::invalid_argument);
}

TEST(Shells, PartitionOfUnity) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 64);
  const std::vector<int> family = lp_family(lat.freq(lat.kmax()) * std::sqrt(2.0));
  for (const Mode& m : lat.all_modes()) {
    const double r = lat.point(m).norm();
    double s = 0.0;
    for (int N : family) s += psi_N(r, N);
    EXPECT_NEAR(s, 1.0, 1e-14) << r;
  }
}

TEST(ZeroSum, NegationClosure) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 8);
  const auto s = zero_sum_triples(lat, {{1, 0}}, {{1, 0}}, std::nullopt, 10, 0);
  ASSERT_EQ(s.triples.size(), 1u);
  EXPECT_EQ(s.triples[0].k[2], (Mode{-2, 0}));
  EXPECT_DOUBLE_EQ(s.triples[0].zeta(2).xi, -2.0);
}

TEST(ZeroSum, NoTripleInsideSingleton) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 8);
  const std::vector<Mode> one{{1, 1}};
  const auto s = zero_sum_triples(lat, one, one, one, 10, 0);
  EXPECT_TRUE(s.triples.empty());
  EXPECT_TRUE(s.exhaustive);
}

TEST(ZeroSum, ExhaustiveCountIsSquare) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 16);
  const auto shell = lat.dyadic_shell(2);
  const auto s = zero_sum_triples(lat, shell, shell, std::nullopt, 1u << 30, 0);
  EXPECT_TRUE(s.exhaustive);
  EXPECT_EQ(s.triples.size(), shell.size() * shell.size());
  for (const auto& t : s.triples) EXPECT_EQ(t.k[0] + t.k[1] + t.k[2], (Mode{0, 0}));
}

TEST(ZeroSum, SampledWhenOverBudget) {
  const FrequencyLattice lat = build_lattice(2.0 * M_PI, 32);
  const auto all = lat.all_modes();
  const auto s = zero_sum_triples(lat, all, all, std::nullopt, 500, 9);
  EXPECT_FALSE(s.exhaustive);
  EXPECT_EQ(s.triples.size(), 500u);
  const auto again = zero_sum_triples(lat, all, all, std::nullopt, 500, 9);
  for (std::size_t i = 0; i < s.triples.size(); ++i) EXPECT_EQ(s.triples[i].k, again.triples[i].k);
  EXPECT_THROW(zero_sum_triples(lat, all, all, std::nullopt, 0, 9), std::invalid_argument);
}
