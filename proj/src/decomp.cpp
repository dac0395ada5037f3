#include "zklab/decomp.hpp"

#include <functional>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "zklab/solver.hpp"

namespace zklab {

SpectralField project_PN(const SpectralField& u, int N) {
  if (N != 0 && !is_dyadic(N)) throw std::invalid_argument("project_PN: N must be 0 or dyadic");
  SpectralField out = u;
  const FrequencyLattice& lat = u.lattice();
  auto& c = out.coeffs();
  for (std::size_t f = 0; f < c.size(); ++f)
    if (c[f] != cplx{}) c[f] *= psi_N(lat.point(lat.mode_of_flat(f)).norm(), N);
  return out;
}

double SpaceTimeSpectrum::tau_spacing() const { return 2.0 * std::numbers::pi / T; }

double SpaceTimeSpectrum::tau(int slot) const {
  const int m = slot < M / 2 ? slot : slot - M;
  return m * tau_spacing();
}

double SpaceTimeSpectrum::norm2() const {
  double s = 0.0;
  for (const cplx& v : data) s += std::norm(v);
  return s;
}

SpaceTimeSpectrum space_time_transform(const Trajectory& traj) {
  if (traj.states.size() < 3) throw std::invalid_argument("space_time_transform: need >= 3 states");
  const int M = static_cast<int>(traj.states.size()) - 1;
  const double dts = traj.times[1] - traj.times[0];
  for (int j = 1; j <= M; ++j)
    if (std::abs((traj.times[j] - traj.times[j - 1]) - dts) > 1e-9 * std::abs(dts))
      throw std::invalid_argument("space_time_transform: non-uniform sampling");
  const FrequencyLattice& lat = traj.states[0].lattice();
  SpaceTimeSpectrum st{lat, M, M * dts, {}};
  const std::size_t nm = static_cast<std::size_t>(lat.modes()) * lat.modes();
  st.data.assign(nm * M, cplx{});
  ComplexFft1 fft(M);
  std::vector<cplx> col(M), out(M);
  for (std::size_t f = 0; f < nm; ++f) {
    bool any = false;
    for (int j = 0; j < M; ++j) {
      col[j] = traj.states[j].coeffs()[f];
      any = any || col[j] != cplx{};
    }
    if (!any) continue;
    fft.forward(col.data(), out.data());
    for (int m = 0; m < M; ++m) st.at(m, f) = out[m] / static_cast<double>(M);
  }
  return st;
}

SpaceTimeSpectrum project_QL(const SpaceTimeSpectrum& st, int L) {
  if (L != 0 && !is_dyadic(L)) throw std::invalid_argument("project_QL: L must be 0 or dyadic");
  if (st.tau_spacing() > 0.5 * std::max(L, 1))
    throw std::invalid_argument("project_QL: trajectory too short to resolve modulation L=" +
                                std::to_string(L));
  SpaceTimeSpectrum out = st;
  const std::size_t nm = static_cast<std::size_t>(st.lat.modes()) * st.lat.modes();
  for (int m = 0; m < st.M; ++m) {
    const double tau = st.tau(m);
    for (std::size_t f = 0; f < nm; ++f) {
      cplx& v = out.at(m, f);
      if (v == cplx{}) continue;
      const double w = dispersion(st.lat.point(st.lat.mode_of_flat(f)));
      v *= psi_N(std::abs(tau - w), L);
    }
  }
  return out;
}

double beta(double t) {
  double s = 0.0;
  const double fl = std::floor(t);
  for (int k = -3; k <= 3; ++k) s += chi(t - (fl + k));
  return chi(t) / s;
}

namespace {

// Reduce d to [-A, A) modulo 2A.
double reduce(double d, int A) {
  const double p = 2.0 * A;
  d = std::fmod(d + A, p);
  if (d < 0) d += p;
  return d - A;
}

void require_sector_A(int A) {
  if (!is_dyadic(A) || A < 64) throw std::invalid_argument("sector: A must be dyadic and >= 64");
}

}  // namespace

double beta_A(double theta, int j, int A) {
  require_sector_A(A);
  const double x = A * theta / std::numbers::pi;
  return beta(reduce(x - j, A)) + beta(reduce(x - (j - A), A));
}

std::vector<SectorWeight> sector_of(const FreqPoint& z, int A) {
  require_sector_A(A);
  if (z.xi == 0.0 && z.eta == 0.0) throw std::invalid_argument("sector_of: zeta = 0 has no angle");
  const double theta = std::atan2(z.eta, z.xi);
  const double x = A * theta / std::numbers::pi;
  std::vector<SectorWeight> out;
  // Only j within distance 2 of x or x + A (mod 2A) can contribute.
  std::set<int> cand;
  for (double c : {x, x + A})
    for (int d = -2; d <= 2; ++d) {
      int j = static_cast<int>(std::floor(c)) + d;
      j = ((j % A) + A) % A;
      cand.insert(j);
    }
  for (int j : cand) {
    const double w = beta_A(theta, j, A);
    if (w > 0.0) out.push_back({j, w});
  }
  return out;
}

TileIndex tile_of(const FreqPoint& z, double A, double N1) {
  const double s = A / N1;
  return {A, N1, static_cast<std::int64_t>(std::floor(z.xi * s)),
          static_cast<std::int64_t>(std::floor(z.eta * s))};
}

TileIndex ancestor(const TileIndex& t, int levels) {
  const double f = std::ldexp(1.0, levels);
  return {t.A / f, t.N1, t.kx >> levels, t.ky >> levels};
}

double H1_signed(const FreqPoint& a, const FreqPoint& b) {
  return a.xi * b.xi * (a.xi + b.xi) + a.eta * b.eta * (a.eta + b.eta);
}
double H2_signed(const FreqPoint& a, const FreqPoint& b) {
  return a.xi * b.eta + b.xi * a.eta + 2.0 * (a.xi * a.eta + b.xi * b.eta);
}
double H1(const FreqPoint& a, const FreqPoint& b) { return std::abs(H1_signed(a, b)); }
double H2(const FreqPoint& a, const FreqPoint& b) { return std::abs(H2_signed(a, b)); }
double H3(const FreqPoint& a, const FreqPoint& b) { return std::abs(a.xi * b.eta - b.xi * a.eta); }

namespace {

// Range of f(a,b) = ab(a+b) on [a0,a1] x [b0,b1]. The only interior critical
// point is the origin; on edges f is quadratic in the free variable.
Interval cubic_pair_range(double a0, double a1, double b0, double b1) {
  auto f = [](double a, double b) { return a * b * (a + b); };
  double lo = f(a0, b0), hi = lo;
  auto take = [&](double a, double b) {
    const double v = f(a, b);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  take(a0, b1);
  take(a1, b0);
  take(a1, b1);
  for (double a : {a0, a1}) {
    const double b = -0.5 * a;
    if (b > b0 && b < b1) take(a, b);
  }
  for (double b : {b0, b1}) {
    const double a = -0.5 * b;
    if (a > a0 && a < a1) take(a, b);
  }
  if (a0 < 0 && a1 > 0 && b0 < 0 && b1 > 0) take(0.0, 0.0);
  return {lo, hi};
}

}  // namespace

Interval H1_range(const TileIndex& k1, const TileIndex& k2) {
  const double s1 = k1.side(), s2 = k2.side();
  const Interval x = cubic_pair_range(k1.kx * s1, (k1.kx + 1) * s1, k2.kx * s2, (k2.kx + 1) * s2);
  const Interval y = cubic_pair_range(k1.ky * s1, (k1.ky + 1) * s1, k2.ky * s2, (k2.ky + 1) * s2);
  return {x.lo + y.lo, x.hi + y.hi};
}

Interval H2_range(const TileIndex& k1, const TileIndex& k2) {
  // Affine in each variable separately: extremes sit at the 16 corners.
  const double s1 = k1.side(), s2 = k2.side();
  double lo = 0, hi = 0;
  bool first = true;
  for (int c = 0; c < 16; ++c) {
    const FreqPoint a{(k1.kx + (c & 1)) * s1, (k1.ky + ((c >> 1) & 1)) * s1};
    const FreqPoint b{(k2.kx + ((c >> 2) & 1)) * s2, (k2.ky + ((c >> 3) & 1)) * s2};
    const double v = H2_signed(a, b);
    lo = first ? v : std::min(lo, v);
    hi = first ? v : std::max(hi, v);
    first = false;
  }
  return {lo, hi};
}

WhitneyClass whitney_classify(const TileIndex& k1, const TileIndex& k2) {
  if (k1.A != k2.A || k1.N1 != k2.N1)
    throw std::invalid_argument("whitney_classify: tiles at different scales");
  WhitneyClass w;
  w.H1_min = H1_range(k1, k2).min_abs();
  w.H2_min = H2_range(k1, k2).min_abs();
  const double N1 = k1.N1;
  w.in_Z1 = w.H1_min >= N1 * N1 * N1 / k1.A;
  w.in_Z2 = w.H2_min >= N1 * N1 / k1.A;
  return w;
}

bool WhitneyBoxConfig::admissible_zeta1(const FreqPoint& z1) const {
  const double n3 = N3();
  const double ax = std::abs(z1.xi), ay = std::abs(z1.eta);
  return ax >= 0.5 * N1 && ax <= 2.0 * N1 && ay >= 0.5 * n3 && ay <= 2.0 * n3;
}

bool WhitneyBoxConfig::admissible(const FreqPoint& z1, const FreqPoint& z2) const {
  if (!admissible_zeta1(z1) || !admissible_zeta1(z2)) return false;
  const double n3 = N3();
  const double xi3 = std::abs(z1.xi + z2.xi), eta3 = std::abs(z1.eta + z2.eta);
  return xi3 <= n3 / gap && eta3 >= 0.5 * n3 && eta3 <= 2.0 * n3;
}

namespace {

bool less_tile(const TileIndex& a, const TileIndex& b) {
  return a.kx != b.kx ? a.kx < b.kx : a.ky < b.ky;
}

struct TileLess {
  bool operator()(const TileIndex& a, const TileIndex& b) const { return less_tile(a, b); }
};

int level_gap(double A, double Ac) { return static_cast<int>(std::lround(std::log2(A / Ac))); }

// Tiles at the scale of k1 that may hold an admissible zeta2.
std::vector<TileIndex> universe(const TileIndex& k1, const WhitneyBoxConfig& cfg) {
  const double s = k1.side(), n3 = cfg.N3();
  const double a0 = k1.kx * s, a1 = (k1.kx + 1) * s;
  const double lo_x = -a1 - n3 / cfg.gap - s, hi_x = -a0 + n3 / cfg.gap + s;
  const double lo_y = -2.0 * n3 - s, hi_y = 2.0 * n3 + s;
  std::vector<TileIndex> out;
  for (auto kx = static_cast<std::int64_t>(std::floor(lo_x / s));
       kx <= static_cast<std::int64_t>(std::floor(hi_x / s)); ++kx)
    for (auto ky = static_cast<std::int64_t>(std::floor(lo_y / s));
         ky <= static_cast<std::int64_t>(std::floor(hi_y / s)); ++ky)
      out.push_back({k1.A, k1.N1, kx, ky});
  return out;
}

// Partner tiles k2 at the scale of k1 with (k1, k2) outside Z, obtained by
// refinement from a coarse scale; outside-Z is inherited by ancestors.
std::vector<TileIndex> outside_Z(const TileIndex& k1, const WhitneyBoxConfig& cfg) {
  double Ac = std::exp2(std::ceil(std::log2(16.0 / cfg.n3_ratio)));
  if (Ac > k1.A) Ac = k1.A;
  const int levels = level_gap(k1.A, Ac);
  std::vector<TileIndex> cur;
  const TileIndex top = ancestor(k1, levels);
  for (const TileIndex& t : universe(top, cfg))
    if (!whitney_classify(top, t).in_Z()) cur.push_back(t);
  for (int l = levels - 1; l >= 0; --l) {
    const TileIndex a1 = ancestor(k1, l);
    std::vector<TileIndex> next;
    for (const TileIndex& p : cur)
      for (int c = 0; c < 4; ++c) {
        const TileIndex ch{a1.A, a1.N1, 2 * p.kx + (c & 1), 2 * p.ky + (c >> 1)};
        if (!whitney_classify(a1, ch).in_Z()) next.push_back(ch);
      }
    std::sort(next.begin(), next.end(), less_tile);
    cur.swap(next);
  }
  return cur;
}

std::uint64_t admissible_axis_count(std::int64_t klo, std::int64_t khi, double s,
                                    const std::function<bool(double)>& ok) {
  std::uint64_t c = 0;
  for (std::int64_t k = klo; k <= khi; ++k)
    if (ok((k + 0.5) * s)) ++c;
  return c;
}

}  // namespace

PartnerScan orthogonality_scan(const TileIndex& k1, const WhitneyBoxConfig& cfg) {
  PartnerScan res;
  const FreqPoint c1 = k1.center();
  if (!cfg.admissible_zeta1(c1)) return res;
  const double s = k1.side(), n3 = cfg.N3();
  const bool base = k1.A <= cfg.base_scale;
  if (base) {
    // Z~ = Z: count admissible partners minus those outside Z. The admissible
    // set is a product of an xi-set and an eta-set.
    auto okx = [&](double x) {
      const double ax = std::abs(x);
      return ax >= 0.5 * cfg.N1 && ax <= 2.0 * cfg.N1 && std::abs(c1.xi + x) <= n3 / cfg.gap;
    };
    auto oky = [&](double y) {
      const double ay = std::abs(y), a3 = std::abs(c1.eta + y);
      return ay >= 0.5 * n3 && ay <= 2.0 * n3 && a3 >= 0.5 * n3 && a3 <= 2.0 * n3;
    };
    const auto xlo = static_cast<std::int64_t>(std::floor((-c1.xi - n3 / cfg.gap) / s)) - 1;
    const auto xhi = static_cast<std::int64_t>(std::floor((-c1.xi + n3 / cfg.gap) / s)) + 1;
    const auto ylo = static_cast<std::int64_t>(std::floor(-2.0 * n3 / s)) - 1;
    const auto yhi = static_cast<std::int64_t>(std::floor(2.0 * n3 / s)) + 1;
    const std::uint64_t total =
        admissible_axis_count(xlo, xhi, s, okx) * admissible_axis_count(ylo, yhi, s, oky);
    std::uint64_t outside = 0;
    for (const TileIndex& t : outside_Z(k1, cfg))
      if (cfg.admissible(c1, t.center())) ++outside;
    res.count = total - outside;
    return res;
  }
  const TileIndex parent = ancestor(k1, 1);
  std::set<TileIndex, TileLess> coarse;
  for (const TileIndex& p : outside_Z(parent, cfg))
    for (int c = 0; c < 4; ++c) {
      const TileIndex ch{k1.A, k1.N1, 2 * p.kx + (c & 1), 2 * p.ky + (c >> 1)};
      const WhitneyClass w = whitney_classify(k1, ch);
      res.examined.push_back({ch, w});
      if (!w.in_Z() || !cfg.admissible(c1, ch.center())) continue;
      ++res.count;
      res.partners.push_back(ch);
      coarse.insert(p);
    }
  res.distinct_coarse = coarse.size();
  return res;
}

std::uint64_t orthogonality_count(const TileIndex& k1, const WhitneyBoxConfig& cfg) {
  return orthogonality_scan(k1, cfg).count;
}

}  // namespace zklab
