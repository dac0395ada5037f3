#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace zklab {

struct FreqPoint {
  double xi = 0.0;
  double eta = 0.0;

  double norm() const { return std::hypot(xi, eta); }
  FreqPoint operator+(const FreqPoint& o) const { return {xi + o.xi, eta + o.eta}; }
  FreqPoint operator-(const FreqPoint& o) const { return {xi - o.xi, eta - o.eta}; }
  FreqPoint operator-() const { return {-xi, -eta}; }
  FreqPoint operator*(double a) const { return {a * xi, a * eta}; }
};

// Integer mode index; frequency is spacing * (kx, ky).
struct Mode {
  std::int64_t kx = 0;
  std::int64_t ky = 0;

  Mode operator+(const Mode& o) const { return {kx + o.kx, ky + o.ky}; }
  Mode operator-() const { return {-kx, -ky}; }
  bool operator==(const Mode&) const = default;
  auto operator<=>(const Mode&) const = default;
};

class FrequencyLattice {
 public:
  FrequencyLattice(double box_length, int modes_per_axis);

  double box_length() const { return box_length_; }
  int modes() const { return n_; }
  double spacing() const { return spacing_; }
  double area() const { return box_length_ * box_length_; }

  double freq(std::int64_t k) const { return static_cast<double>(k) * spacing_; }
  FreqPoint point(const Mode& m) const { return {freq(m.kx), freq(m.ky)}; }

  std::int64_t kmin() const { return -n_ / 2; }
  std::int64_t kmax() const { return n_ / 2 - 1; }
  bool in_range(std::int64_t k) const { return k >= kmin() && k <= kmax(); }
  bool in_range(const Mode& m) const { return in_range(m.kx) && in_range(m.ky); }

  // Index whose frequency is f; nullopt when f is off-lattice or out of range.
  std::optional<std::int64_t> index_of(double f) const;

  // Storage slot of a centred index (FFT order) and its inverse.
  int slot(std::int64_t k) const { return static_cast<int>(k < 0 ? k + n_ : k); }
  std::int64_t index_of_slot(int j) const { return j < n_ / 2 ? j : j - n_; }
  std::size_t flat(const Mode& m) const {
    return static_cast<std::size_t>(slot(m.kx)) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(slot(m.ky));
  }
  Mode mode_of_flat(std::size_t f) const {
    return {index_of_slot(static_cast<int>(f / static_cast<std::size_t>(n_))),
            index_of_slot(static_cast<int>(f % static_cast<std::size_t>(n_)))};
  }

  std::vector<Mode> all_modes() const;

  // Modes with psi_N(|zeta|) != 0; N = 0 is the chi(|zeta|) core.
  std::vector<Mode> dyadic_shell(int N) const;

  bool operator==(const FrequencyLattice& o) const {
    return box_length_ == o.box_length_ && n_ == o.n_;
  }

 private:
  double box_length_;
  int n_;
  double spacing_;
};

FrequencyLattice build_lattice(double box_length, int modes_per_axis);

// Smooth cutoffs: chi is even, 1 on [-1,1], 0 outside [-2,2].
double chi(double x);
double psi(double x);
// psi(r/N) for dyadic N >= 1, chi(r) for N = 0.
double psi_N(double r, double N);
bool is_dyadic(std::int64_t N);

// Littlewood-Paley index set covering radii up to rmax: the core 0 and the
// shells N = 2, 4, ... . The N = 1 shell overlaps the core and is left out.
std::vector<int> lp_family(double rmax);

template <int K>
struct ZeroSumTuple {
  std::array<Mode, K> k{};
  double spacing = 1.0;

  FreqPoint zeta(int j) const {
    return {static_cast<double>(k[j].kx) * spacing, static_cast<double>(k[j].ky) * spacing};
  }
  std::array<FreqPoint, K> points() const {
    std::array<FreqPoint, K> z{};
    for (int j = 0; j < K; ++j) z[j] = zeta(j);
    return z;
  }
};
using ZeroSumTriple = ZeroSumTuple<3>;
using ZeroSumQuad = ZeroSumTuple<4>;

struct TripleSampling {
  std::vector<ZeroSumTriple> triples;
  bool exhaustive = false;
};

// Triples (z1, z2, -z1-z2) with z1 in slot1, z2 in slot2 and, when slot3 is
// given, z3 in slot3. Exhaustive when |slot1|*|slot2| <= budget, otherwise
// `budget` uniformly drawn pairs (those failing the slot3 test are dropped).
TripleSampling zero_sum_triples(const FrequencyLattice& lat, const std::vector<Mode>& slot1,
                                const std::vector<Mode>& slot2,
                                const std::optional<std::vector<Mode>>& slot3,
                                std::uint64_t budget, std::uint64_t seed);

}  // namespace zklab
