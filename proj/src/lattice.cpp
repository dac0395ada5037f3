#include "zklab/lattice.hpp"

#include <algorithm>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "zklab/rng.hpp"

namespace zklab {

FrequencyLattice::FrequencyLattice(double box_length, int modes_per_axis)
    : box_length_(box_length), n_(modes_per_axis) {
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw std::invalid_argument("box_length must be positive");
  if (modes_per_axis < 4 || modes_per_axis % 2 != 0)
    throw std::invalid_argument("modes_per_axis must be even and >= 4, got " +
                                std::to_string(modes_per_axis));
  spacing_ = 2.0 * std::numbers::pi / box_length;
}

FrequencyLattice build_lattice(double box_length, int modes_per_axis) {
  return FrequencyLattice(box_length, modes_per_axis);
}

std::optional<std::int64_t> FrequencyLattice::index_of(double f) const {
  const double q = f / spacing_;
  const double r = std::nearbyint(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return std::nullopt;
  const auto k = static_cast<std::int64_t>(r);
  if (!in_range(k)) return std::nullopt;
  return k;
}

std::vector<Mode> FrequencyLattice::all_modes() const {
  std::vector<Mode> out;
  out.reserve(static_cast<std::size_t>(n_) * n_);
  for (std::int64_t a = kmin(); a <= kmax(); ++a)
    for (std::int64_t b = kmin(); b <= kmax(); ++b) out.push_back({a, b});
  return out;
}

std::vector<Mode> FrequencyLattice::dyadic_shell(int N) const {
  if (N != 0 && !is_dyadic(N))
    throw std::invalid_argument("dyadic_shell: N must be 0 or a power of two, got " +
                                std::to_string(N));
  std::vector<Mode> out;
  for (const Mode& m : all_modes()) {
    const double r = point(m).norm();
    if (psi_N(r, N) != 0.0) out.push_back(m);
  }
  return out;
}

namespace {

double smooth_step(double t) {
  // 0 for t <= 0, 1 for t >= 1, C-infinity in between.
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

double chi(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 1.0;
  if (ax >= 2.0) return 0.0;
  return 1.0 - smooth_step(ax - 1.0);
}

double psi(double x) { return chi(x) - chi(2.0 * x); }

double psi_N(double r, double N) {
  if (N == 0.0) return chi(r);
  return psi(r / N);
}

bool is_dyadic(std::int64_t N) { return N >= 1 && (N & (N - 1)) == 0; }

std::vector<int> lp_family(double rmax) {
  std::vector<int> out{0};
  for (int N = 2; N < (1 << 30); N *= 2) {
    out.push_back(N);
    if (N >= rmax) break;
  }
  return out;
}

TripleSampling zero_sum_triples(const FrequencyLattice& lat, const std::vector<Mode>& slot1,
                                const std::vector<Mode>& slot2,
                                const std::optional<std::vector<Mode>>& slot3,
                                std::uint64_t budget, std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("zero_sum_triples: budget must be >= 1");
  TripleSampling out;
  if (slot1.empty() || slot2.empty() || (slot3 && slot3->empty())) {
    out.exhaustive = true;
    return out;
  }
  std::set<Mode> third;
  if (slot3) third.insert(slot3->begin(), slot3->end());
  auto emit = [&](const Mode& a, const Mode& b) {
    const Mode c = -(a + b);
    if (slot3 && !third.count(c)) return;
    out.triples.push_back({{a, b, c}, lat.spacing()});
  };
  const auto combos = static_cast<std::uint64_t>(slot1.size()) * slot2.size();
  if (combos <= budget) {
    out.exhaustive = true;
    for (const Mode& a : slot1)
      for (const Mode& b : slot2) emit(a, b);
    return out;
  }
  Rng rng(seed);
  for (std::uint64_t i = 0; i < budget; ++i) {
    const Mode& a = slot1[rng.below(slot1.size())];
    const Mode& b = slot2[rng.below(slot2.size())];
    emit(a, b);
  }
  return out;
}

}  // namespace zklab
