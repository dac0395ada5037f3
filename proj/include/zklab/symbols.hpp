#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "zklab/lattice.hpp"

namespace zklab {

using Triple = std::array<FreqPoint, 3>;
using Quad = std::array<FreqPoint, 4>;

struct SymbolParams {
  double s = 0.0;
  double N = 1.0;
  double gamma0 = 1.0;

  // gamma0 defaults to N^{-1/2}.
  static SymbolParams make(double s, double N, std::optional<double> gamma0 = std::nullopt);
  void validate() const;
};

double multiplier_m_radial(double r, const SymbolParams& p);
double multiplier_m(const FreqPoint& z, const SymbolParams& p);

// P = xi1 xi2 xi3 + eta1 eta2 eta3; h3 = 3iP on the zero-sum hypersurface.
double resonance_P(const Triple& t);
double sum_of_cubes(const Triple& t);

double symbol_M3(const Triple& t, const SymbolParams& p);
// Same, from precomputed m^2 values.
inline double symbol_M3_from(const Triple& t, double m1sq, double m2sq, double m3sq) {
  return m1sq * (t[0].xi + t[0].eta) + m2sq * (t[1].xi + t[1].eta) + m3sq * (t[2].xi + t[2].eta);
}

bool indicator_nonresonant(const Triple& t, const SymbolParams& p);

// Indicator and sigma3 from precomputed radii r[j] and squared multipliers.
inline bool indicator_from(const Triple& t, const double* r, const SymbolParams& p) {
  if (r[0] <= p.N && r[1] <= p.N && r[2] <= p.N) return true;
  const double P = t[0].xi * t[1].xi * t[2].xi + t[0].eta * t[1].eta * t[2].eta;
  return std::abs(P) >= p.gamma0 * (r[0] * r[1] * r[2]);
}
inline double sigma3_from(const Triple& t, const double* r, const double* msq,
                          const SymbolParams& p) {
  if (r[0] <= p.N && r[1] <= p.N && r[2] <= p.N) return 0.0;
  const double P = t[0].xi * t[1].xi * t[2].xi + t[0].eta * t[1].eta * t[2].eta;
  if (!(std::abs(P) >= p.gamma0 * (r[0] * r[1] * r[2]))) return 0.0;
  if (P == 0.0) return 0.0;
  return -2.0 * symbol_M3_from(t, msq[0], msq[1], msq[2]) / (9.0 * P);
}

// Real representative -2 M3 / (9P) of -2i M3 / (3 h3), gated by the indicator.
double sigma3_tilde(const Triple& t, const SymbolParams& p);

// sigma3_tilde(z1, z2, z3+z4) * (xi3+xi4+eta3+eta4).
double symbol_X_sigma3(const Quad& q, const SymbolParams& p);

// |M3| / (max m^2 * min |zeta_j|); nullopt for min |zeta_j| = 0 with M3 = 0.
// Throws VerificationFailure when min |zeta_j| = 0 and M3 != 0.
std::optional<double> fti1_ratio(const Triple& t, const SymbolParams& p);

}  // namespace zklab
