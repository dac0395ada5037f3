#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "zklab/estimates.hpp"
#include "zklab/rng.hpp"

namespace zklab {

int fft_friendly_size(int n) {
  for (int m = std::max(n, 4);; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1 && m % 2 == 0) return m;
  }
}

SpectralField shell_packet(const FrequencyLattice& lat, const FreqPoint& zc, double sigma, int N,
                           const FreqPoint& x0) {
  SpectralField u(lat);
  const double h = lat.spacing();
  const double reach = 6.0 * sigma;
  for (const FreqPoint& c : {zc, -zc}) {
    const double edge = N > 0 ? 2.0 * N : 2.0;
    const auto lo_x = static_cast<std::int64_t>(std::floor(std::max(c.xi - reach, -edge) / h));
    const auto hi_x = static_cast<std::int64_t>(std::ceil(std::min(c.xi + reach, edge) / h));
    const auto lo_y = static_cast<std::int64_t>(std::floor(std::max(c.eta - reach, -edge) / h));
    const auto hi_y = static_cast<std::int64_t>(std::ceil(std::min(c.eta + reach, edge) / h));
    for (std::int64_t kx = lo_x; kx <= hi_x; ++kx)
      for (std::int64_t ky = lo_y; ky <= hi_y; ++ky) {
        const Mode m{kx, ky};
        if (!lat.in_range(m) || kx == lat.kmin() || ky == lat.kmin())
          throw std::out_of_range("shell_packet: packet does not fit the lattice");
        const FreqPoint z = lat.point(m);
        const FreqPoint d = z - c;
        const double g = std::exp(-(d.xi * d.xi + d.eta * d.eta) / (2.0 * sigma * sigma));
        const double w = psi_N(z.norm(), N);
        if (g * w == 0.0) continue;
        u[m] += g * w * std::polar(1.0, -(z.xi * x0.xi + z.eta * x0.eta));
      }
  }
  return u;
}

double free_product_norm(const SpectralField& phi1, const SpectralField& phi3, double delta,
                         int time_samples) {
  if (!(phi1.lattice() == phi3.lattice())) throw std::invalid_argument("free_product_norm: lattice mismatch");
  if (time_samples < 3 || time_samples % 2 == 0)
    throw std::invalid_argument("free_product_norm: time_samples must be odd and >= 3");
  const FrequencyLattice& lat = phi1.lattice();
  const int n = lat.modes();
  RealFft2& fft = real_fft(n);
  const int hc = n / 2 + 1;
  struct Entry {
    std::size_t slot;
    cplx c;
    double phi;
  };
  auto entries = [&](const SpectralField& u) {
    std::vector<Entry> e;
    for (const Mode& m : u.support()) {
      if (m.ky < 0 || m.ky >= hc) continue;
      const std::size_t slot = static_cast<std::size_t>(lat.slot(m.kx)) * hc + static_cast<std::size_t>(m.ky);
      const FreqPoint z = lat.point(m);
      e.push_back({slot, u[m], z.xi * z.xi * z.xi + z.eta * z.eta * z.eta});
    }
    return e;
  };
  const std::vector<Entry> e1 = entries(phi1), e3 = entries(phi3);
  std::vector<cplx> half(fft.half_size());
  std::vector<double> g1(static_cast<std::size_t>(n) * n), g3(g1.size());
  const double cell = lat.area() / (static_cast<double>(n) * n);
  double integral = 0.0;
  for (int j = 0; j < time_samples; ++j) {
    const double t = delta * j / (time_samples - 1);
    std::fill(half.begin(), half.end(), cplx{});
    for (const Entry& e : e1) half[e.slot] = e.c * std::polar(1.0, t * e.phi);
    fft.backward(half.data(), g1.data());
    std::fill(half.begin(), half.end(), cplx{});
    for (const Entry& e : e3) half[e.slot] = e.c * std::polar(1.0, t * e.phi);
    fft.backward(half.data(), g3.data());
    double s = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
      const double p = g1[i] * g3[i];
      s += p * p;
    }
    const double w = (j == 0 || j == time_samples - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    integral += w * s * cell;
  }
  integral *= delta / (time_samples - 1) / 3.0;
  return std::sqrt(integral);
}

std::vector<StrichartzSample> bilinear_strichartz_samples(int N1, int N3,
                                                          const StrichartzConfig& cfg) {
  if (!(N1 >= N3 && N3 >= 1)) throw std::invalid_argument("strichartz: need N1 >= N3 >= 1");
  if (!is_dyadic(N1) || !is_dyadic(N3)) throw std::invalid_argument("strichartz: N1, N3 must be dyadic");
  const double box = cfg.box_scale / N3;
  const double h = 2.0 * std::numbers::pi / box;
  const double sigma1 = cfg.packet_width * N1, sigma3 = cfg.packet_width * N3;
  const double reach1 = std::min(2.0 * N1, N1 + 6.0 * sigma1);
  const double reach3 = std::min(2.0 * N3, N3 + 6.0 * sigma3);
  const int need = 2 * static_cast<int>(std::ceil((reach1 + reach3) / h)) + 4;
  const int n = fft_friendly_size(need);
  const FrequencyLattice lat(box, n);
  const double delta = cfg.delta_scale / (static_cast<double>(N1) * N1);
  const FreqPoint centre{0.5 * box, 0.5 * box};
  std::vector<StrichartzSample> out;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(cfg.seed * 7919ULL + static_cast<std::uint64_t>(N1) * 131 + static_cast<std::uint64_t>(N3) * 17 +
            static_cast<std::uint64_t>(trial));
    const double th1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double th3 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const FreqPoint z1{N1 * std::cos(th1), N1 * std::sin(th1)};
    const FreqPoint z3{N3 * std::cos(th3), N3 * std::sin(th3)};
    // Packet 1 moves with velocity -grad phi; start it so it crosses the centre mid-window.
    const FreqPoint grad1{3.0 * z1.xi * z1.xi, 3.0 * z1.eta * z1.eta};
    const FreqPoint x1 = centre + grad1 * (0.5 * delta);
    const SpectralField phi1 = shell_packet(lat, z1, sigma1, N1, x1);
    const SpectralField phi3 = shell_packet(lat, z3, sigma3, N3, centre);
    StrichartzSample s;
    s.N1 = N1;
    s.N3 = N3;
    s.trial = trial;
    s.fft_size = n;
    s.product_norm = free_product_norm(phi1, phi3, delta, cfg.time_samples);
    s.data_norm1 = std::sqrt(mass(phi1));
    s.data_norm3 = std::sqrt(mass(phi3));
    s.ratio = s.product_norm * N1 / (std::sqrt(static_cast<double>(N3)) * s.data_norm1 * s.data_norm3);
    out.push_back(s);
  }
  return out;
}

SweepReport bilinear_strichartz_constant(const std::vector<std::pair<int, int>>& pairs,
                                         const StrichartzConfig& cfg, double growth_factor) {
  SweepReport rep;
  rep.name = "bilinear_strichartz";
  rep.seed = cfg.seed;
  {
    std::ostringstream os;
    os << "box=" << cfg.box_scale << "/N3 delta=" << cfg.delta_scale << "/N1^2 trials=" << cfg.trials
       << " pairs=";
    for (std::size_t i = 0; i < pairs.size(); ++i)
      os << (i ? ";" : "") << pairs[i].first << "," << pairs[i].second;
    rep.grid = os.str();
  }
  rep.columns = {"N1", "N3", "trial", "fft_size", "product_norm", "data_norm1", "data_norm3", "ratio"};
  std::vector<std::pair<std::pair<int, int>, double>> maxima;
  for (const auto& [N1, N3] : pairs) {
    double mx = 0.0;
    for (const StrichartzSample& s : bilinear_strichartz_samples(N1, N3, cfg)) {
      rep.rows.push_back({static_cast<double>(s.N1), static_cast<double>(s.N3),
                          static_cast<double>(s.trial), static_cast<double>(s.fft_size),
                          s.product_norm, s.data_norm1, s.data_norm3, s.ratio});
      mx = std::max(mx, s.ratio);
    }
    maxima.push_back({{N1, N3}, mx});
    std::ostringstream lab;
    lab << "max_ratio_N1=" << N1 << "_N3=" << N3;
    rep.add(lab.str(), mx, ">=", 0.0, static_cast<std::uint64_t>(cfg.trials));
  }
  // Non-increase within growth_factor as N1 grows at fixed N3.
  for (std::size_t i = 0; i < maxima.size(); ++i)
    for (std::size_t j = i + 1; j < maxima.size(); ++j) {
      const auto& a = maxima[i];
      const auto& b = maxima[j];
      if (a.first.second != b.first.second || b.first.first <= a.first.first) continue;
      bool adjacent = true;
      for (std::size_t k = i + 1; k < j; ++k)
        if (maxima[k].first.second == a.first.second && maxima[k].first.first > a.first.first &&
            maxima[k].first.first < b.first.first)
          adjacent = false;
      if (!adjacent) continue;
      std::ostringstream lab;
      lab << "growth_N1=" << a.first.first << "->" << b.first.first << "_N3=" << a.first.second;
      rep.add(lab.str(), b.second / a.second, "<=", growth_factor);
    }
  return rep;
}

}  // namespace zklab
