#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "zklab/fft.hpp"
#include "zklab/lattice.hpp"

namespace zklab {

// Real field on the periodic box, stored by its Fourier-series coefficients
// on the full n x n index set (FFT order). Nyquist modes (index -n/2) are
// kept at zero so that every stored mode has its conjugate partner in range.
//   u(x) = sum_k uhat(k) e^{i zeta_k . x},   int u^2 = area * sum |uhat|^2.
class SpectralField {
 public:
  explicit SpectralField(const FrequencyLattice& lat);

  const FrequencyLattice& lattice() const { return lat_; }
  int n() const { return lat_.modes(); }

  cplx& operator[](const Mode& m) { return c_[lat_.flat(m)]; }
  const cplx& operator[](const Mode& m) const { return c_[lat_.flat(m)]; }
  // Zero for out-of-range modes.
  cplx at(const Mode& m) const { return lat_.in_range(m) ? c_[lat_.flat(m)] : cplx{}; }

  std::vector<cplx>& coeffs() { return c_; }
  const std::vector<cplx>& coeffs() const { return c_; }

  static SpectralField from_physical(const FrequencyLattice& lat, const std::vector<double>& u);
  std::vector<double> to_physical() const;

  std::vector<cplx> half_spectrum() const;
  static SpectralField from_half(const FrequencyLattice& lat, const std::vector<cplx>& half);

  // Symmetrize to exact Hermitian form and clear Nyquist modes.
  void enforce_hermitian();
  double hermitian_defect() const;

  // Modes with nonzero coefficient.
  std::vector<Mode> support() const;
  double max_support_radius() const;

  SpectralField& operator*=(double a);
  SpectralField& operator+=(const SpectralField& o);

 private:
  FrequencyLattice lat_;
  std::vector<cplx> c_;
};

// 2/3-rule mask: |k| <= ceil(n/3) - 1 on each axis.
std::int64_t dealias_kmax(int n);
bool in_dealias_set(const Mode& m, int n);
void apply_dealias(SpectralField& u);

// Initial data library.
SpectralField gaussian_bump(const FrequencyLattice& lat, double amplitude, double width,
                            double cx, double cy);
SpectralField solitary_profile(const FrequencyLattice& lat, double amplitude, double width,
                               double cx, double cy);
// Random phases with |uhat| ~ <zeta>^{-alpha} on kmin <= |zeta| <= kmax.
SpectralField band_limited_random(const FrequencyLattice& lat, double kmin_radius,
                                  double kmax_radius, double alpha, std::uint64_t seed);
// a cos(zeta.x) + b sin(zeta.x) for a single lattice mode.
SpectralField single_mode(const FrequencyLattice& lat, const Mode& m, double a, double b);

double l2_distance(const SpectralField& a, const SpectralField& b);

}  // namespace zklab
