#pragma once

#include <complex>
#include <vector>

#include "zklab/field.hpp"
#include "zklab/trajectory.hpp"

namespace zklab {

// exp(i t (xi^3 + eta^3)), the free propagator multiplier.
cplx linear_phase(const FreqPoint& z, double t);
inline double dispersion(const FreqPoint& z) { return z.xi * z.xi * z.xi + z.eta * z.eta * z.eta; }

// Pseudo-spectral integrator for u_t + (dx^3 + dy^3) u + (dx + dy) u^2 = 0,
// i.e. uhat_t = i(xi^3+eta^3) uhat - i(xi+eta) (u^2)^.
// A negative dt integrates backward in time.
class ZkSolver {
 public:
  ZkSolver(const FrequencyLattice& lat, const SolverConfig& cfg);

  const SolverConfig& config() const { return cfg_; }
  const FrequencyLattice& lattice() const { return lat_; }

  // Largest |dt * (xi^3 + eta^3)| over the active modes, in radians.
  double max_phase_per_step() const { return max_phase_; }

  SpectralField step(const SpectralField& u) const;
  Trajectory solve(const SpectralField& u0, double T) const;

  // In-place step on the half spectrum (FFTW r2c layout).
  void step_half(std::vector<cplx>& v) const;

 private:
  void nonlinear(const std::vector<cplx>& v, std::vector<cplx>& out) const;
  SpectralField prepare(const SpectralField& u0) const;

  FrequencyLattice lat_;
  SolverConfig cfg_;
  int hc_;
  std::size_t hsize_;
  std::vector<double> phi_, weight_;
  std::vector<unsigned char> active_;
  std::vector<cplx> e_half_, e_full_;
  std::vector<cplx> q_, f1_, f2_, f3_;
  double max_phase_ = 0.0;
};

}  // namespace zklab
