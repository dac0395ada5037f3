#include "zklab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "zklab/rng.hpp"

namespace zklab {

SpectralField::SpectralField(const FrequencyLattice& lat)
    : lat_(lat), c_(static_cast<std::size_t>(lat.modes()) * lat.modes()) {}

std::vector<cplx> SpectralField::half_spectrum() const {
  const int n = this->n();
  const int hc = n / 2 + 1;
  std::vector<cplx> h(static_cast<std::size_t>(n) * hc);
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < hc; ++jy) {
      const std::int64_t kx = lat_.index_of_slot(jx);
      const std::int64_t ky = jy;
      const Mode m{kx, ky};
      h[static_cast<std::size_t>(jx) * hc + jy] = lat_.in_range(m) ? c_[lat_.flat(m)] : cplx{};
    }
  return h;
}

SpectralField SpectralField::from_half(const FrequencyLattice& lat, const std::vector<cplx>& half) {
  SpectralField u(lat);
  const int n = lat.modes();
  const int hc = n / 2 + 1;
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < hc; ++jy) {
      const Mode m{lat.index_of_slot(jx), jy};
      if (!lat.in_range(m) || m.kx == lat.kmin()) continue;
      const cplx v = half[static_cast<std::size_t>(jx) * hc + jy];
      u[m] = v;
      const Mode mm = -m;
      if (lat.in_range(mm)) u[mm] = std::conj(v);
    }
  u.enforce_hermitian();
  return u;
}

SpectralField SpectralField::from_physical(const FrequencyLattice& lat,
                                           const std::vector<double>& u) {
  const int n = lat.modes();
  if (u.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("from_physical: grid size mismatch");
  RealFft2& fft = real_fft(n);
  std::vector<cplx> half(fft.half_size());
  fft.forward(u.data(), half.data());
  return from_half(lat, half);
}

std::vector<double> SpectralField::to_physical() const {
  const int n = this->n();
  RealFft2& fft = real_fft(n);
  std::vector<cplx> half = half_spectrum();
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  fft.backward(half.data(), out.data());
  return out;
}

void SpectralField::enforce_hermitian() {
  const std::int64_t kmin = lat_.kmin();
  for (std::size_t f = 0; f < c_.size(); ++f) {
    const Mode m = lat_.mode_of_flat(f);
    if (m.kx == kmin || m.ky == kmin) {
      c_[f] = {};
      continue;
    }
    const Mode mm = -m;
    if (mm < m) continue;
    if (mm == m) {
      c_[f] = {c_[f].real(), 0.0};
      continue;
    }
    const std::size_t g = lat_.flat(mm);
    const cplx avg = 0.5 * (c_[f] + std::conj(c_[g]));
    c_[f] = avg;
    c_[g] = std::conj(avg);
  }
}

double SpectralField::hermitian_defect() const {
  double d = 0.0;
  for (std::size_t f = 0; f < c_.size(); ++f) {
    const Mode m = lat_.mode_of_flat(f);
    const Mode mm = -m;
    if (!lat_.in_range(mm)) {
      d = std::max(d, std::abs(c_[f]));
      continue;
    }
    d = std::max(d, std::abs(c_[f] - std::conj(c_[lat_.flat(mm)])));
  }
  return d;
}

std::vector<Mode> SpectralField::support() const {
  std::vector<Mode> s;
  for (std::int64_t a = lat_.kmin(); a <= lat_.kmax(); ++a)
    for (std::int64_t b = lat_.kmin(); b <= lat_.kmax(); ++b) {
      const Mode m{a, b};
      if (c_[lat_.flat(m)] != cplx{}) s.push_back(m);
    }
  return s;
}

double SpectralField::max_support_radius() const {
  double r = 0.0;
  for (const Mode& m : support()) r = std::max(r, lat_.point(m).norm());
  return r;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& v : c_) v *= a;
  return *this;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!(o.lat_ == lat_)) throw std::invalid_argument("field lattices differ");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

std::int64_t dealias_kmax(int n) { return (n + 2) / 3 - 1; }

bool in_dealias_set(const Mode& m, int n) {
  const std::int64_t K = dealias_kmax(n);
  return std::abs(m.kx) <= K && std::abs(m.ky) <= K;
}

void apply_dealias(SpectralField& u) {
  const int n = u.n();
  auto& c = u.coeffs();
  for (std::size_t f = 0; f < c.size(); ++f)
    if (!in_dealias_set(u.lattice().mode_of_flat(f), n)) c[f] = {};
}

namespace {

template <class F>
SpectralField from_function(const FrequencyLattice& lat, F&& f) {
  const int n = lat.modes();
  const double h = lat.box_length() / n;
  std::vector<double> u(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u[static_cast<std::size_t>(i) * n + j] = f(i * h, j * h);
  return SpectralField::from_physical(lat, u);
}

// Periodic distance to the centre along one axis.
double wrap(double d, double L) { return d - L * std::nearbyint(d / L); }

}  // namespace

SpectralField gaussian_bump(const FrequencyLattice& lat, double amplitude, double width,
                            double cx, double cy) {
  const double L = lat.box_length();
  return from_function(lat, [&](double x, double y) {
    const double dx = wrap(x - cx, L), dy = wrap(y - cy, L);
    return amplitude * std::exp(-(dx * dx + dy * dy) / (width * width));
  });
}

SpectralField solitary_profile(const FrequencyLattice& lat, double amplitude, double width,
                               double cx, double cy) {
  const double L = lat.box_length();
  return from_function(lat, [&](double x, double y) {
    const double dx = wrap(x - cx, L), dy = wrap(y - cy, L);
    const double c = std::cosh(std::hypot(dx, dy) / width);
    return amplitude / (c * c);
  });
}

SpectralField band_limited_random(const FrequencyLattice& lat, double kmin_radius,
                                  double kmax_radius, double alpha, std::uint64_t seed) {
  SpectralField u(lat);
  Rng rng(seed);
  for (std::int64_t a = lat.kmin() + 1; a <= lat.kmax(); ++a)
    for (std::int64_t b = lat.kmin() + 1; b <= lat.kmax(); ++b) {
      const Mode m{a, b};
      if (-m < m) continue;
      const double r = lat.point(m).norm();
      const double amp_draw = rng.uniform();
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      if (r < kmin_radius || r > kmax_radius || (m.kx == 0 && m.ky == 0)) continue;
      const double amp = std::pow(1.0 + r * r, -0.5 * alpha) * (0.5 + amp_draw);
      u[m] = std::polar(amp, phase);
      u[-m] = std::conj(u[m]);
    }
  return u;
}

SpectralField single_mode(const FrequencyLattice& lat, const Mode& m, double a, double b) {
  SpectralField u(lat);
  if (!lat.in_range(m) || !lat.in_range(-m) || m.kx == lat.kmin() || m.ky == lat.kmin())
    throw std::invalid_argument("single_mode: mode out of range");
  if (m == Mode{0, 0}) {
    u[m] = a;
    return u;
  }
  // a cos + b sin = (a - ib)/2 e^{i} + (a + ib)/2 e^{-i}
  u[m] = cplx(0.5 * a, -0.5 * b);
  u[-m] = cplx(0.5 * a, 0.5 * b);
  return u;
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) s += std::norm(a.coeffs()[i] - b.coeffs()[i]);
  return std::sqrt(a.lattice().area() * s);
}

}  // namespace zklab
