#include "zklab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zklab/errors.hpp"

namespace zklab {

SymbolParams SymbolParams::make(double s, double N, std::optional<double> gamma0) {
  SymbolParams p{s, N, gamma0 ? *gamma0 : 1.0 / std::sqrt(N)};
  p.validate();
  return p;
}

void SymbolParams::validate() const {
  if (!(s > -0.5 && s <= 0.0)) throw std::invalid_argument("SymbolParams: need -1/2 < s <= 0");
  if (!(N >= 1.0)) throw std::invalid_argument("SymbolParams: need N >= 1");
  if (!(gamma0 > 0.0 && gamma0 <= 1.0))
    throw std::invalid_argument("SymbolParams: need 0 < gamma0 <= 1");
}

double multiplier_m_radial(double r, const SymbolParams& p) {
  const double N = p.N;
  if (p.s == 0.0 || r <= N) return 1.0;
  if (r >= 2.0 * N) return std::pow(r / N, p.s);
  // Cubic Hermite on [N, 2N] matching value and slope at both ends.
  const double t = (r - N) / N;
  const double y1 = std::exp2(p.s);
  const double d1 = p.s * std::exp2(p.s - 1.0);  // slope in t units
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * 1.0 + h01 * y1 + h11 * d1;
}

double multiplier_m(const FreqPoint& z, const SymbolParams& p) {
  return multiplier_m_radial(z.norm(), p);
}

double resonance_P(const Triple& t) {
  return t[0].xi * t[1].xi * t[2].xi + t[0].eta * t[1].eta * t[2].eta;
}

double sum_of_cubes(const Triple& t) {
  double s = 0.0;
  for (const auto& z : t) s += z.xi * z.xi * z.xi + z.eta * z.eta * z.eta;
  return s;
}

double symbol_M3(const Triple& t, const SymbolParams& p) {
  double m[3];
  for (int j = 0; j < 3; ++j) {
    const double mj = multiplier_m(t[j], p);
    m[j] = mj * mj;
  }
  return symbol_M3_from(t, m[0], m[1], m[2]);
}

namespace {

void radii_and_msq(const Triple& t, const SymbolParams& p, double* r, double* msq) {
  for (int j = 0; j < 3; ++j) {
    r[j] = t[j].norm();
    const double m = multiplier_m_radial(r[j], p);
    msq[j] = m * m;
  }
}

}  // namespace

bool indicator_nonresonant(const Triple& t, const SymbolParams& p) {
  double r[3] = {t[0].norm(), t[1].norm(), t[2].norm()};
  return indicator_from(t, r, p);
}

double sigma3_tilde(const Triple& t, const SymbolParams& p) {
  double r[3], msq[3];
  radii_and_msq(t, p, r, msq);
  return sigma3_from(t, r, msq, p);
}

double symbol_X_sigma3(const Quad& q, const SymbolParams& p) {
  const FreqPoint w = q[2] + q[3];
  const double weight = w.xi + w.eta;
  if (weight == 0.0) return 0.0;
  return sigma3_tilde({q[0], q[1], w}, p) * weight;
}

std::optional<double> fti1_ratio(const Triple& t, const SymbolParams& p) {
  const double M3 = symbol_M3(t, p);
  double mmax = 0.0, rmin = t[0].norm();
  for (const auto& z : t) {
    const double m = multiplier_m(z, p);
    mmax = std::max(mmax, m * m);
    rmin = std::min(rmin, z.norm());
  }
  if (rmin == 0.0) {
    if (M3 == 0.0) return std::nullopt;
    std::ostringstream os;
    os << "fti1: M3 = " << M3 << " on a triple with a zero frequency";
    throw VerificationFailure(os.str());
  }
  return std::abs(M3) / (mmax * rmin);
}

}  // namespace zklab
