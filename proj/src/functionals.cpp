#include "zklab/functionals.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zklab/errors.hpp"
#include "zklab/rng.hpp"

namespace zklab {

namespace {

void require_same(const SpectralField& a, const SpectralField& b) {
  if (!(a.lattice() == b.lattice()))
    throw std::invalid_argument("functional: fields live on different lattices");
}

// Fixed-order reduction so results do not depend on the thread count.
cplx ordered_sum(const std::vector<cplx>& v) {
  cplx s{};
  for (const cplx& x : v) s += x;
  return s;
}

// Radius and squared multiplier over indices [-n, n) per axis, which covers
// every sum of two in-range modes.
struct ModeTable {
  int n;
  double spacing;
  std::vector<double> r, msq;

  ModeTable(const FrequencyLattice& lat, const SymbolParams& p)
      : n(lat.modes()), spacing(lat.spacing()) {
    const std::size_t w = 2 * static_cast<std::size_t>(n);
    r.resize(w * w);
    msq.resize(w * w);
    for (std::int64_t a = -n; a < n; ++a)
      for (std::int64_t b = -n; b < n; ++b) {
        const std::size_t f = idx({a, b});
        r[f] = std::hypot(a * spacing, b * spacing);
        const double m = multiplier_m_radial(r[f], p);
        msq[f] = m * m;
      }
  }
  std::size_t idx(const Mode& m) const {
    return static_cast<std::size_t>(m.kx + n) * (2 * static_cast<std::size_t>(n)) +
           static_cast<std::size_t>(m.ky + n);
  }
};

// Exhaustive sum over (z1, z2) in supp(u)^2 with z3 = -z1-z2 in range of
// W(t, r, msq) uhat(z1) uhat(z2) uhat(z3), times the box area.
template <class W>
cplx tabulated_lambda3(const SpectralField& u, const SymbolParams& p, W weight) {
  const FrequencyLattice& lat = u.lattice();
  const ModeTable tab(lat, p);
  const std::vector<Mode> supp = u.support();
  const auto& c = u.coeffs();
  std::vector<cplx> partial(supp.size());
  const std::int64_t ns = static_cast<std::int64_t>(supp.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < ns; ++i) {
    const Mode& a = supp[static_cast<std::size_t>(i)];
    const cplx ca = c[lat.flat(a)];
    const std::size_t fa = tab.idx(a);
    cplx acc{};
    for (const Mode& b : supp) {
      const Mode m3 = -(a + b);
      if (!lat.in_range(m3)) continue;
      const cplx c3 = c[lat.flat(m3)];
      if (c3 == cplx{}) continue;
      const std::size_t fb = tab.idx(b), f3 = tab.idx(m3);
      const Triple t{lat.point(a), lat.point(b), lat.point(m3)};
      const double r[3] = {tab.r[fa], tab.r[fb], tab.r[f3]};
      const double msq[3] = {tab.msq[fa], tab.msq[fb], tab.msq[f3]};
      const double w = weight(t, r, msq);
      if (w == 0.0) continue;
      acc += w * (ca * c[lat.flat(b)] * c3);
    }
    partial[static_cast<std::size_t>(i)] = acc;
  }
  return lat.area() * ordered_sum(partial);
}

// Autocorrelation sum_{z3+z4=w} uhat3(z3) uhat4(z4) on the doubled lattice.
SpectralField autocorrelation(const SpectralField& u3, const SpectralField& u4) {
  const int n2 = 2 * u3.n();
  const SpectralField a = zero_pad(u3, n2);
  const SpectralField b = zero_pad(u4, n2);
  std::vector<double> pa = a.to_physical();
  const std::vector<double> pb = b.to_physical();
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  return SpectralField::from_physical(a.lattice(), pa);
}

}  // namespace

double mass(const SpectralField& u) {
  double s = 0.0;
  for (const cplx& v : u.coeffs()) s += std::norm(v);
  return u.lattice().area() * s;
}

SpectralField zero_pad(const SpectralField& u, int modes) {
  if (modes < u.n()) throw std::invalid_argument("zero_pad: target smaller than source");
  const FrequencyLattice big(u.lattice().box_length(), modes);
  SpectralField out(big);
  const FrequencyLattice& lat = u.lattice();
  for (std::size_t f = 0; f < u.coeffs().size(); ++f)
    if (u.coeffs()[f] != cplx{}) out[lat.mode_of_flat(f)] = u.coeffs()[f];
  return out;
}

double energy(const SpectralField& u) {
  const FrequencyLattice& lat = u.lattice();
  double quad = 0.0;
  for (std::size_t f = 0; f < u.coeffs().size(); ++f) {
    const double a2 = std::norm(u.coeffs()[f]);
    if (a2 == 0.0) continue;
    const FreqPoint z = lat.point(lat.mode_of_flat(f));
    quad += (0.5 * (z.xi * z.xi + z.eta * z.eta) - 0.5 * z.xi * z.eta) * a2;
  }
  // The cube of a field band-limited to |k| < n/2 is resolved on 2n points.
  const std::vector<double> v = zero_pad(u, 2 * u.n()).to_physical();
  double cube = 0.0;
  for (double x : v) cube += x * x * x;
  cube *= lat.area() / static_cast<double>(v.size());
  return lat.area() * quad - cube / 3.0;
}

SpectralField apply_I(const SpectralField& u, const SymbolParams& p) {
  SpectralField out = u;
  const FrequencyLattice& lat = u.lattice();
  auto& c = out.coeffs();
  for (std::size_t f = 0; f < c.size(); ++f)
    if (c[f] != cplx{}) c[f] *= multiplier_m(lat.point(lat.mode_of_flat(f)), p);
  return out;
}

double modified_mass_E0(const SpectralField& u, const SymbolParams& p) {
  return mass(apply_I(u, p));
}

LambdaResult lambda2(const Symbol<2>& M, const SpectralField& u1, const SpectralField& u2,
                     std::uint64_t /*budget*/, std::uint64_t /*seed*/) {
  require_same(u1, u2);
  const FrequencyLattice& lat = u1.lattice();
  LambdaResult res;
  cplx s{};
  for (const Mode& a : u1.support()) {
    const cplx c2 = u2.at(-a);
    if (c2 == cplx{}) continue;
    s += M({lat.point(a), lat.point(-a)}) * (u1[a] * c2);
    ++res.terms;
  }
  res.value = lat.area() * s;
  return res;
}

LambdaResult lambda3(const Symbol<3>& M, const SpectralField& u1, const SpectralField& u2,
                     const SpectralField& u3, std::uint64_t budget, std::uint64_t seed) {
  require_same(u1, u2);
  require_same(u1, u3);
  const FrequencyLattice& lat = u1.lattice();
  const std::vector<Mode> s1 = u1.support(), s2 = u2.support();
  LambdaResult res;
  if (s1.empty() || s2.empty()) return res;
  const std::uint64_t combos = static_cast<std::uint64_t>(s1.size()) * s2.size();
  auto term = [&](const Mode& a, const Mode& b) -> cplx {
    const Mode m3 = -(a + b);
    const cplx c3 = u3.at(m3);
    if (c3 == cplx{}) return {};
    return M({lat.point(a), lat.point(b), lat.point(m3)}) * (u1[a] * u2[b] * c3);
  };
  std::vector<cplx> partial(s1.size());
  const std::int64_t n1 = static_cast<std::int64_t>(s1.size());
  if (combos <= budget) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n1; ++i) {
      cplx acc{};
      for (const Mode& b : s2) acc += term(s1[static_cast<std::size_t>(i)], b);
      partial[static_cast<std::size_t>(i)] = acc;
    }
    res.value = lat.area() * ordered_sum(partial);
    res.terms = combos;
    return res;
  }
  // Stratified by z1: each stratum draws m partners uniformly from supp(u2).
  const std::uint64_t m = std::max<std::uint64_t>(2, budget / s1.size());
  std::vector<double> var(s1.size());
  for (std::int64_t i = 0; i < n1; ++i) {
    Rng rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
    cplx sum{};
    double sq = 0.0;
    for (std::uint64_t j = 0; j < m; ++j) {
      const cplx t = term(s1[static_cast<std::size_t>(i)], s2[rng.below(s2.size())]);
      sum += t;
      sq += std::norm(t);
    }
    const cplx mean = sum / static_cast<double>(m);
    const double v = (sq / static_cast<double>(m) - std::norm(mean)) * static_cast<double>(m) /
                     static_cast<double>(m - 1);
    const double scale = static_cast<double>(s2.size());
    partial[static_cast<std::size_t>(i)] = scale * mean;
    var[static_cast<std::size_t>(i)] = scale * scale * std::max(v, 0.0) / static_cast<double>(m);
  }
  double vtot = 0.0;
  for (double v : var) vtot += v;
  res.value = lat.area() * ordered_sum(partial);
  res.std_error = lat.area() * std::sqrt(vtot);
  res.exhaustive = false;
  res.terms = m * s1.size();
  return res;
}

LambdaResult lambda4(const Symbol<4>& M, const SpectralField& u1, const SpectralField& u2,
                     const SpectralField& u3, const SpectralField& u4, std::uint64_t budget,
                     std::uint64_t seed) {
  require_same(u1, u2);
  require_same(u1, u3);
  require_same(u1, u4);
  const FrequencyLattice& lat = u1.lattice();
  const std::vector<Mode> s1 = u1.support(), s2 = u2.support(), s3 = u3.support();
  LambdaResult res;
  if (s1.empty() || s2.empty() || s3.empty()) return res;
  const std::uint64_t combos = static_cast<std::uint64_t>(s1.size()) * s2.size() * s3.size();
  auto term = [&](const Mode& a, const Mode& b, const Mode& c) -> cplx {
    const Mode m4 = -(a + b + c);
    const cplx c4 = u4.at(m4);
    if (c4 == cplx{}) return {};
    return M({lat.point(a), lat.point(b), lat.point(c), lat.point(m4)}) *
           (u1[a] * u2[b] * u3[c] * c4);
  };
  std::vector<cplx> partial(s1.size());
  const std::int64_t n1 = static_cast<std::int64_t>(s1.size());
  if (combos <= budget) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n1; ++i) {
      cplx acc{};
      for (const Mode& b : s2)
        for (const Mode& c : s3) acc += term(s1[static_cast<std::size_t>(i)], b, c);
      partial[static_cast<std::size_t>(i)] = acc;
    }
    res.value = lat.area() * ordered_sum(partial);
    res.terms = combos;
    return res;
  }
  const std::uint64_t m = std::max<std::uint64_t>(2, budget / s1.size());
  double vtot = 0.0;
  for (std::int64_t i = 0; i < n1; ++i) {
    Rng rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
    cplx sum{};
    double sq = 0.0;
    for (std::uint64_t j = 0; j < m; ++j) {
      const cplx t = term(s1[static_cast<std::size_t>(i)], s2[rng.below(s2.size())],
                          s3[rng.below(s3.size())]);
      sum += t;
      sq += std::norm(t);
    }
    const cplx mean = sum / static_cast<double>(m);
    const double v = (sq / static_cast<double>(m) - std::norm(mean)) * static_cast<double>(m) /
                     static_cast<double>(m - 1);
    const double scale = static_cast<double>(s2.size()) * static_cast<double>(s3.size());
    partial[static_cast<std::size_t>(i)] = scale * mean;
    vtot += scale * scale * std::max(v, 0.0) / static_cast<double>(m);
  }
  res.value = lat.area() * ordered_sum(partial);
  res.std_error = lat.area() * std::sqrt(vtot);
  res.exhaustive = false;
  res.terms = m * s1.size();
  return res;
}

LambdaResult lambda4_collapsed(const CollapsedSymbol& S, const SpectralField& u1,
                               const SpectralField& u2, const SpectralField& u3,
                               const SpectralField& u4,
                               const std::function<bool(const Mode&)>& collapsed_mask,
                               std::uint64_t budget) {
  require_same(u1, u2);
  require_same(u1, u3);
  require_same(u1, u4);
  const FrequencyLattice& lat = u1.lattice();
  const std::vector<Mode> s1 = u1.support(), s2 = u2.support();
  LambdaResult res;
  const std::uint64_t combos = static_cast<std::uint64_t>(s1.size()) * s2.size();
  if (combos > budget)
    throw std::length_error("lambda4_collapsed: budget below the exhaustive pair count");
  if (s1.empty() || s2.empty()) return res;
  const SpectralField C = autocorrelation(u3, u4);
  const FrequencyLattice& big = C.lattice();
  std::vector<cplx> partial(s1.size());
  const std::int64_t n1 = static_cast<std::int64_t>(s1.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n1; ++i) {
    const Mode& a = s1[static_cast<std::size_t>(i)];
    cplx acc{};
    for (const Mode& b : s2) {
      const Mode w = -(a + b);
      if (collapsed_mask && !collapsed_mask(w)) continue;
      const cplx cw = C.at(w);
      if (cw == cplx{}) continue;
      const double sv = S(lat.point(a), lat.point(b), big.point(w));
      if (sv == 0.0) continue;
      acc += sv * (u1[a] * u2[b] * cw);
    }
    partial[static_cast<std::size_t>(i)] = acc;
  }
  res.value = lat.area() * ordered_sum(partial);
  res.terms = combos;
  return res;
}

cplx lambda3_M3(const SpectralField& u, const SymbolParams& p, M3Region region) {
  return tabulated_lambda3(u, p, [&](const Triple& t, const double* r, const double* msq) {
    if (region != M3Region::All) {
      const bool nr = indicator_from(t, r, p);
      if ((region == M3Region::Resonant) == nr) return 0.0;
    }
    return symbol_M3_from(t, msq[0], msq[1], msq[2]);
  });
}

cplx lambda3_sigma3(const SpectralField& u, const SymbolParams& p) {
  return tabulated_lambda3(u, p, [&](const Triple& t, const double* r, const double* msq) {
    return sigma3_from(t, r, msq, p);
  });
}

cplx lambda3_sigma3_h3(const SpectralField& u, const SymbolParams& p) {
  const cplx v =
      tabulated_lambda3(u, p, [&](const Triple& t, const double* r, const double* msq) {
        const double s = sigma3_from(t, r, msq, p);
        return s == 0.0 ? 0.0 : 3.0 * resonance_P(t) * s;
      });
  return cplx(0.0, 1.0) * v;
}

cplx lambda4_X_sigma3(const SpectralField& u, const SymbolParams& p,
                      const std::function<bool(const Mode&)>& collapsed_mask) {
  const FrequencyLattice& lat = u.lattice();
  const ModeTable tab(lat, p);
  const std::vector<Mode> supp = u.support();
  const SpectralField C = autocorrelation(u, u);
  const auto& c = u.coeffs();
  std::vector<cplx> partial(supp.size());
  const std::int64_t ns = static_cast<std::int64_t>(supp.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < ns; ++i) {
    const Mode& a = supp[static_cast<std::size_t>(i)];
    const cplx ca = c[lat.flat(a)];
    cplx acc{};
    for (const Mode& b : supp) {
      const Mode w = -(a + b);
      if (collapsed_mask && !collapsed_mask(w)) continue;
      const FreqPoint zw = lat.point(w);
      const double weight = zw.xi + zw.eta;
      if (weight == 0.0) continue;
      const cplx cw = C.at(w);
      if (cw == cplx{}) continue;
      const std::size_t fa = tab.idx(a), fb = tab.idx(b), fw = tab.idx(w);
      const Triple t{lat.point(a), lat.point(b), zw};
      const double r[3] = {tab.r[fa], tab.r[fb], tab.r[fw]};
      const double msq[3] = {tab.msq[fa], tab.msq[fb], tab.msq[fw]};
      const double s = sigma3_from(t, r, msq, p);
      if (s == 0.0) continue;
      acc += (s * weight) * (ca * c[lat.flat(b)] * cw);
    }
    partial[static_cast<std::size_t>(i)] = acc;
  }
  return lat.area() * ordered_sum(partial);
}

double corrected_mass_E1(const SpectralField& u, const SymbolParams& p) {
  const double e0 = modified_mass_E0(u, p);
  const cplx l3 = lambda3_sigma3(u, p);
  const double scale = std::max({std::abs(l3), std::pow(e0, 1.5), 1e-300});
  if (std::abs(l3.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "corrected_mass_E1: Lambda3(sigma3) imaginary residual " << l3.imag();
    throw VerificationFailure(os.str());
  }
  return e0 + l3.real();
}

SpectralField rescale(const SpectralField& u0, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("rescale: need 0 < lambda <= 1");
  const FrequencyLattice target(u0.lattice().box_length() / lambda, u0.n());
  SpectralField out(target);
  out.coeffs() = u0.coeffs();
  out *= lambda * lambda;
  return out;
}

SpectralField rescale_onto(const SpectralField& u0, double lambda, const FrequencyLattice& target) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("rescale: need 0 < lambda <= 1");
  const FrequencyLattice& lat = u0.lattice();
  SpectralField out(target);
  for (const Mode& m : u0.support()) {
    const FreqPoint z = lat.point(m) * lambda;
    const auto kx = target.index_of(z.xi), ky = target.index_of(z.eta);
    if (!kx || !ky)
      throw std::out_of_range("rescale_onto: bandwidth overflow or off-lattice mode");
    out[{*kx, *ky}] = lambda * lambda * u0[m];
  }
  out.enforce_hermitian();
  return out;
}

FunctionalSeries track(const Trajectory& traj, const SymbolParams& p) {
  FunctionalSeries fs;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const SpectralField& u = traj.states[i];
    const double e0 = modified_mass_E0(u, p);
    const double e1 = corrected_mass_E1(u, p);
    fs.t.push_back(traj.times[i]);
    fs.mass.push_back(mass(u));
    fs.energy.push_back(energy(u));
    fs.E0.push_back(e0);
    fs.Lambda3_sigma3.push_back(e1 - e0);
    fs.E1_tilde.push_back(e1);
  }
  return fs;
}

}  // namespace zklab
