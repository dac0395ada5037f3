#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "zklab/field.hpp"
#include "zklab/trajectory.hpp"

namespace zklab {

// ---- Littlewood-Paley ------------------------------------------------------

// Multiply by psi_N(|zeta|); N = 0 multiplies by chi(|zeta|).
SpectralField project_PN(const SpectralField& u, int N);

// ---- Modulation ------------------------------------------------------------

// Discrete space-time transform of a uniformly sampled trajectory over the
// window [0, T), T = M * dt_sample, using the first M states.
//   U(tau_m, zeta) = (1/M) sum_j uhat(t_j, zeta) e^{-i tau_m t_j},
//   tau_m = 2 pi m / T, m centred in [-M/2, M/2).
struct SpaceTimeSpectrum {
  FrequencyLattice lat;
  int M = 0;
  double T = 0.0;
  std::vector<cplx> data;  // [m slot][flat mode]

  double tau_spacing() const;
  double tau(int slot) const;
  cplx& at(int slot, std::size_t flat) { return data[static_cast<std::size_t>(slot) * lat.modes() * lat.modes() + flat]; }
  cplx at(int slot, std::size_t flat) const { return data[static_cast<std::size_t>(slot) * lat.modes() * lat.modes() + flat]; }
  double norm2() const;
};

SpaceTimeSpectrum space_time_transform(const Trajectory& traj);

// Multiply by psi_L(|tau - xi^3 - eta^3|); L = 0 uses chi. Throws when the
// time-frequency spacing exceeds max(L, 1) / 2.
SpaceTimeSpectrum project_QL(const SpaceTimeSpectrum& st, int L);

// ---- Angular sectors -------------------------------------------------------

// beta_j(t) = chi(t - j) / sum_k chi(t - k).
double beta(double t);
// beta^A_j(theta) with the angle variable taken periodically.
double beta_A(double theta, int j, int A);

struct SectorWeight {
  int j;
  double weight;
};
// Sectors with beta^A_j(theta(zeta)) > 0. Throws for zeta = 0.
std::vector<SectorWeight> sector_of(const FreqPoint& z, int A);

// ---- Tiles and Whitney classes --------------------------------------------

struct TileIndex {
  double A = 1;
  double N1 = 1;
  std::int64_t kx = 0;
  std::int64_t ky = 0;

  double side() const { return N1 / A; }
  FreqPoint lower() const { return {kx * side(), ky * side()}; }
  FreqPoint center() const { return {(kx + 0.5) * side(), (ky + 0.5) * side()}; }
  bool operator==(const TileIndex&) const = default;
};

TileIndex tile_of(const FreqPoint& z, double A, double N1);
// Containing tile at scale A/2^levels.
TileIndex ancestor(const TileIndex& t, int levels);

double H1(const FreqPoint& z1, const FreqPoint& z2);
double H2(const FreqPoint& z1, const FreqPoint& z2);
double H3(const FreqPoint& z1, const FreqPoint& z2);
double H1_signed(const FreqPoint& z1, const FreqPoint& z2);
double H2_signed(const FreqPoint& z1, const FreqPoint& z2);

struct Interval {
  double lo, hi;
  double min_abs() const { return (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi)); }
};
// Exact ranges of the signed functionals over the closed tile pair.
Interval H1_range(const TileIndex& k1, const TileIndex& k2);
Interval H2_range(const TileIndex& k1, const TileIndex& k2);

struct WhitneyClass {
  bool in_Z1 = false;
  bool in_Z2 = false;
  double H1_min = 0.0;
  double H2_min = 0.0;
  bool in_Z() const { return in_Z1 || in_Z2; }
};

WhitneyClass whitney_classify(const TileIndex& k1, const TileIndex& k2);

// Frequency boxes for the high-high orthogonality count: |xi1|,|xi2| in [N1/2, 2N1]; |eta1|,|eta2|,|eta3|
// in [N3/2, 2N3] with N3 = n3_ratio * N1; |xi3| <= N3 / gap.
struct WhitneyBoxConfig {
  double N1 = 1.0;
  double n3_ratio = 1.0 / 32.0;
  double gap = 8.0;
  double base_scale = 33554432.0;  // 2^25

  double N3() const { return n3_ratio * N1; }
  bool admissible_zeta1(const FreqPoint& z1) const;
  bool admissible(const FreqPoint& z1, const FreqPoint& z2) const;
};

struct PartnerScan {
  std::uint64_t count = 0;          // #{k2 admissible : (k1,k2) in Z~_A}
  std::vector<TileIndex> partners;  // listed when count is small enough to enumerate
  std::vector<std::pair<TileIndex, WhitneyClass>> examined;
  std::uint64_t distinct_coarse = 0;  // tiles at scale A/2 holding a partner
};

// Exhaustive partner scan for tile k1 at scale A (k1.A). Above the base scale
// Z~_A = pairs of Z_A whose parent pair lies outside Z_{A/2}; at the base
// scale Z~ = Z and the count is obtained as (#admissible) - (#admissible
// outside Z).
PartnerScan orthogonality_scan(const TileIndex& k1, const WhitneyBoxConfig& cfg);
std::uint64_t orthogonality_count(const TileIndex& k1, const WhitneyBoxConfig& cfg);

}  // namespace zklab
