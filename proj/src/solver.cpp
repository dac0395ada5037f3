#include "zklab/solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "zklab/errors.hpp"

namespace zklab {

std::string scheme_name(Scheme s) { return s == Scheme::IFRK4 ? "ifrk4" : "etdrk4"; }

Scheme scheme_from_name(const std::string& s) {
  if (s == "ifrk4") return Scheme::IFRK4;
  if (s == "etdrk4") return Scheme::ETDRK4;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected ifrk4 or etdrk4)");
}

cplx linear_phase(const FreqPoint& z, double t) { return std::polar(1.0, t * dispersion(z)); }

ZkSolver::ZkSolver(const FrequencyLattice& lat, const SolverConfig& cfg)
    : lat_(lat), cfg_(cfg), hc_(lat.modes() / 2 + 1) {
  if (!(cfg.dt != 0.0 && std::isfinite(cfg.dt))) throw std::invalid_argument("solver: dt must be nonzero");
  if (cfg.record_every < 1) throw std::invalid_argument("solver: record_every must be >= 1");
  const int n = lat.modes();
  hsize_ = static_cast<std::size_t>(n) * hc_;
  phi_.resize(hsize_);
  weight_.resize(hsize_);
  active_.resize(hsize_);
  e_half_.resize(hsize_);
  e_full_.resize(hsize_);
  const double h = cfg.dt;
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < hc_; ++jy) {
      const std::size_t f = static_cast<std::size_t>(jx) * hc_ + jy;
      const Mode m{lat.index_of_slot(jx), jy};
      const bool in = lat.in_range(m) && m.kx != lat.kmin() && (!cfg.dealias || in_dealias_set(m, n));
      active_[f] = in ? 1 : 0;
      const FreqPoint z = lat.point(m);
      phi_[f] = in ? dispersion(z) : 0.0;
      weight_[f] = in ? z.xi + z.eta : 0.0;
      e_half_[f] = std::polar(1.0, 0.5 * h * phi_[f]);
      e_full_[f] = std::polar(1.0, h * phi_[f]);
      max_phase_ = std::max(max_phase_, std::abs(h * phi_[f]));
    }
  if (max_phase_ > 2.0 * std::numbers::pi * cfg.phase_budget) {
    std::ostringstream os;
    os << "solver: phase per step " << max_phase_ << " exceeds budget 2*pi*" << cfg.phase_budget;
    throw std::invalid_argument(os.str());
  }
  if (cfg.scheme == Scheme::ETDRK4) {
    // Contour-averaged phi functions (Kassam-Trefethen), 32 points on |r| = 1.
    constexpr int M = 32;
    q_.resize(hsize_);
    f1_.resize(hsize_);
    f2_.resize(hsize_);
    f3_.resize(hsize_);
    for (std::size_t f = 0; f < hsize_; ++f) {
      const cplx Lh(0.0, h * phi_[f]);
      cplx q{}, a{}, b{}, c{};
      for (int k = 0; k < M; ++k) {
        const cplx r = std::polar(1.0, std::numbers::pi * (k + 0.5) / M * 2.0);
        const cplx z = Lh + r;
        const cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
        const cplx z3 = z * z * z;
        q += (ez2 - 1.0) / z;
        a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        b += (2.0 + z + ez * (-2.0 + z)) / z3;
        c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      q_[f] = h * q / static_cast<double>(M);
      f1_[f] = h * a / static_cast<double>(M);
      f2_[f] = h * b / static_cast<double>(M);
      f3_[f] = h * c / static_cast<double>(M);
    }
  }
}

void ZkSolver::nonlinear(const std::vector<cplx>& v, std::vector<cplx>& out) const {
  RealFft2& fft = real_fft(lat_.modes());
  thread_local std::vector<double> grid;
  grid.resize(static_cast<std::size_t>(lat_.modes()) * lat_.modes());
  fft.backward(v.data(), grid.data());
  for (double& x : grid) x *= x;
  out.resize(hsize_);
  fft.forward(grid.data(), out.data());
  for (std::size_t f = 0; f < hsize_; ++f)
    out[f] = active_[f] ? cplx(0.0, -weight_[f]) * out[f] : cplx{};
}

void ZkSolver::step_half(std::vector<cplx>& v) const {
  const double h = cfg_.dt;
  if (!cfg_.nonlinear) {
    for (std::size_t f = 0; f < hsize_; ++f) v[f] *= e_full_[f];
    return;
  }
  thread_local std::vector<cplx> k1, k2, k3, k4, tmp;
  tmp.resize(hsize_);
  if (cfg_.scheme == Scheme::IFRK4) {
    nonlinear(v, k1);
    for (std::size_t f = 0; f < hsize_; ++f) tmp[f] = e_half_[f] * (v[f] + 0.5 * h * k1[f]);
    nonlinear(tmp, k2);
    for (std::size_t f = 0; f < hsize_; ++f) tmp[f] = e_half_[f] * v[f] + 0.5 * h * k2[f];
    nonlinear(tmp, k3);
    for (std::size_t f = 0; f < hsize_; ++f) tmp[f] = e_full_[f] * v[f] + h * e_half_[f] * k3[f];
    nonlinear(tmp, k4);
    for (std::size_t f = 0; f < hsize_; ++f)
      v[f] = e_full_[f] * v[f] +
             (h / 6.0) * (e_full_[f] * k1[f] + 2.0 * e_half_[f] * (k2[f] + k3[f]) + k4[f]);
  } else {
    thread_local std::vector<cplx> a, b;
    a.resize(hsize_);
    b.resize(hsize_);
    nonlinear(v, k1);
    for (std::size_t f = 0; f < hsize_; ++f) a[f] = e_half_[f] * v[f] + q_[f] * k1[f];
    nonlinear(a, k2);
    for (std::size_t f = 0; f < hsize_; ++f) b[f] = e_half_[f] * v[f] + q_[f] * k2[f];
    nonlinear(b, k3);
    for (std::size_t f = 0; f < hsize_; ++f)
      tmp[f] = e_half_[f] * a[f] + q_[f] * (2.0 * k3[f] - k1[f]);
    nonlinear(tmp, k4);
    for (std::size_t f = 0; f < hsize_; ++f)
      v[f] = e_full_[f] * v[f] + k1[f] * f1_[f] + 2.0 * (k2[f] + k3[f]) * f2_[f] + k4[f] * f3_[f];
  }
  double s = 0.0;
  for (std::size_t f = 0; f < hsize_; ++f) s += std::norm(v[f]);
  if (!std::isfinite(s)) throw SolverError("solver: non-finite state after step");
}

SpectralField ZkSolver::prepare(const SpectralField& u0) const {
  if (!(u0.lattice() == lat_)) throw std::invalid_argument("solver: field lattice mismatch");
  SpectralField u = u0;
  u.enforce_hermitian();
  if (cfg_.dealias) apply_dealias(u);
  return u;
}

SpectralField ZkSolver::step(const SpectralField& u) const {
  std::vector<cplx> v = prepare(u).half_spectrum();
  step_half(v);
  return SpectralField::from_half(lat_, v);
}

Trajectory ZkSolver::solve(const SpectralField& u0, double T) const {
  if (T < 0.0) throw std::invalid_argument("solve: horizon must be non-negative");
  const double steps_real = T / std::abs(cfg_.dt);
  const auto steps = static_cast<long long>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("solve: horizon is not a whole number of steps");
  if (steps % cfg_.record_every != 0)
    throw std::invalid_argument("solve: step count is not a multiple of record_every");
  Trajectory tr;
  tr.config = cfg_;
  SpectralField u = prepare(u0);
  tr.states.push_back(u);
  tr.times.push_back(0.0);
  std::vector<cplx> v = u.half_spectrum();
  for (long long i = 1; i <= steps; ++i) {
    step_half(v);
    if (i % cfg_.record_every == 0) {
      tr.states.push_back(SpectralField::from_half(lat_, v));
      tr.times.push_back(static_cast<double>(i) * cfg_.dt);
    }
  }
  return tr;
}

}  // namespace zklab
