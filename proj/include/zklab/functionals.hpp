#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zklab/field.hpp"
#include "zklab/symbols.hpp"
#include "zklab/trajectory.hpp"

namespace zklab {

template <int K>
using Symbol = std::function<double(const std::array<FreqPoint, K>&)>;

// Value of a k-linear functional with its provenance. Sampled estimates
// carry a one-sigma standard error; exhaustive sums report zero.
struct LambdaResult {
  cplx value{};
  double std_error = 0.0;
  bool exhaustive = true;
  std::uint64_t terms = 0;
};

inline constexpr std::uint64_t kDefaultBudget = 1ULL << 40;

double mass(const SpectralField& u);
double energy(const SpectralField& u);

SpectralField apply_I(const SpectralField& u, const SymbolParams& p);
double modified_mass_E0(const SpectralField& u, const SymbolParams& p);

// Lambda_k = area * sum over zero-sum lattice k-tuples of M * prod uhat_j.
LambdaResult lambda2(const Symbol<2>& M, const SpectralField& u1, const SpectralField& u2,
                     std::uint64_t budget = kDefaultBudget, std::uint64_t seed = 0);
LambdaResult lambda3(const Symbol<3>& M, const SpectralField& u1, const SpectralField& u2,
                     const SpectralField& u3, std::uint64_t budget = kDefaultBudget,
                     std::uint64_t seed = 0);
LambdaResult lambda4(const Symbol<4>& M, const SpectralField& u1, const SpectralField& u2,
                     const SpectralField& u3, const SpectralField& u4,
                     std::uint64_t budget = kDefaultBudget, std::uint64_t seed = 0);

// Lambda_4 for symbols depending on (z3, z4) only through w = z3 + z4:
//   area * sum_{z1,z2} S(z1, z2, w) uhat1(z1) uhat2(z2) C(w),  w = -z1-z2,
// with C the full autocorrelation of u3, u4. When `collapsed_mask` is set,
// w outside the mask is dropped.
using CollapsedSymbol = std::function<double(const FreqPoint&, const FreqPoint&, const FreqPoint&)>;
LambdaResult lambda4_collapsed(const CollapsedSymbol& S, const SpectralField& u1,
                               const SpectralField& u2, const SpectralField& u3,
                               const SpectralField& u4,
                               const std::function<bool(const Mode&)>& collapsed_mask = {},
                               std::uint64_t budget = kDefaultBudget);

template <int K>
Symbol<K> symmetrize(const Symbol<K>& M) {
  return [M](const std::array<FreqPoint, K>& z) {
    std::array<int, K> idx{};
    for (int i = 0; i < K; ++i) idx[i] = i;
    double s = 0.0;
    int count = 0;
    do {
      std::array<FreqPoint, K> w{};
      for (int i = 0; i < K; ++i) w[i] = z[idx[i]];
      s += M(w);
      ++count;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return s / count;
  };
}

enum class M3Region { All, Resonant, NonResonant };

// Fast exhaustive Lambda_3 paths using a tabulated multiplier.
cplx lambda3_M3(const SpectralField& u, const SymbolParams& p, M3Region region = M3Region::All);
cplx lambda3_sigma3(const SpectralField& u, const SymbolParams& p);
cplx lambda3_sigma3_h3(const SpectralField& u, const SymbolParams& p);  // Lambda_3(sigma3 h3)
// Lambda_4(X(sigma3)) with the collapsed slot restricted to `mask`.
cplx lambda4_X_sigma3(const SpectralField& u, const SymbolParams& p,
                      const std::function<bool(const Mode&)>& collapsed_mask = {});

// E0 + Lambda_3(sigma3). Throws VerificationFailure if the imaginary part of
// the correction exceeds 1e-10 relative.
double corrected_mass_E1(const SpectralField& u, const SymbolParams& p);

// u_lambda(x) = lambda^2 u(lambda x) on the box of side L / lambda.
SpectralField rescale(const SpectralField& u0, double lambda);
// Same, mapped onto a given target lattice; throws if a mode of u0 lands off
// the target lattice or out of its range.
SpectralField rescale_onto(const SpectralField& u0, double lambda, const FrequencyLattice& target);
inline double rescaled_horizon(double T, double lambda) { return T / (lambda * lambda * lambda); }

// Embed into a lattice with the same box and more modes.
SpectralField zero_pad(const SpectralField& u, int modes);

struct FunctionalSeries {
  std::vector<double> t, mass, energy, E0, Lambda3_sigma3, E1_tilde;
};

FunctionalSeries track(const Trajectory& traj, const SymbolParams& p);

}  // namespace zklab
