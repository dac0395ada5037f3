#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "zklab/estimates.hpp"
#include "zklab/rng.hpp"

namespace zklab {

namespace {

struct Iv {
  double lo, hi;
};

Iv operator+(Iv a, Iv b) { return {a.lo + b.lo, a.hi + b.hi}; }
Iv operator-(Iv a, Iv b) { return {a.lo - b.hi, a.hi - b.lo}; }
Iv operator*(Iv a, Iv b) {
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Iv square(double x0, double x1) {
  if (x0 <= 0.0 && x1 >= 0.0) return {0.0, std::max(x0 * x0, x1 * x1)};
  return {std::min(x0 * x0, x1 * x1), std::max(x0 * x0, x1 * x1)};
}

double inv_len(double a, double b) { return 1.0 / std::sqrt(1.0 + a * a + b * b); }

// Component ranges of (-1, a, b)/sqrt(1+a^2+b^2) with a = 3 xi^2, b = 3 eta^2.
// Each component is monotone in a and b separately, so the ranges are exact.
std::array<Iv, 3> normal_range(const Box2& B) {
  const Iv sx = square(B.x0, B.x1), sy = square(B.y0, B.y1);
  const double a0 = 3 * sx.lo, a1 = 3 * sx.hi, b0 = 3 * sy.lo, b1 = 3 * sy.hi;
  return {Iv{-inv_len(a0, b0), -inv_len(a1, b1)}, Iv{a0 * inv_len(a0, b1), a1 * inv_len(a1, b0)},
          Iv{b0 * inv_len(a1, b0), b1 * inv_len(a0, b1)}};
}

Iv det_range(const std::array<Iv, 3>& n1, const std::array<Iv, 3>& n2, const std::array<Iv, 3>& n3) {
  const Iv cx = n2[1] * n3[2] - n2[2] * n3[1];
  const Iv cy = n2[2] * n3[0] - n2[0] * n3[2];
  const Iv cz = n2[0] * n3[1] - n2[1] * n3[0];
  return n1[0] * cx + n1[1] * cy + n1[2] * cz;
}

double det_at(const FreqPoint& z1, const FreqPoint& z2, const FreqPoint& z3) {
  return transversality_det(surface_point(z1, 0), surface_point(z2, 0), surface_point(z3, 0)).normalized;
}

double min_abs(Iv v) { return (v.lo <= 0 && v.hi >= 0) ? 0.0 : std::min(std::abs(v.lo), std::abs(v.hi)); }

std::array<Box2, 4> split(const Box2& b) {
  const double xm = 0.5 * (b.x0 + b.x1), ym = 0.5 * (b.y0 + b.y1);
  return {Box2{b.x0, xm, b.y0, ym}, Box2{xm, b.x1, b.y0, ym}, Box2{b.x0, xm, ym, b.y1},
          Box2{xm, b.x1, ym, b.y1}};
}

double phi(const FreqPoint& z) { return z.xi * z.xi * z.xi + z.eta * z.eta * z.eta; }
double jac(const FreqPoint& z) {
  const double a = 3 * z.xi * z.xi, b = 3 * z.eta * z.eta;
  return std::sqrt(1 + a * a + b * b);
}

constexpr double kGL8x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
constexpr double kGL8w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss(double a, double b, int pieces, F&& f) {
  double s = 0.0;
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double m = a + (p + 0.5) * h, r = 0.5 * h;
    for (int i = 0; i < 8; ++i) s += kGL8w[i] * r * f(m + r * kGL8x[i]);
  }
  return s;
}

struct Rect {
  double u0, u1, v0, v1;
  bool contains(double u, double v) const { return u >= u0 && u <= u1 && v >= v0 && v <= v1; }
};

// Integral of fn over {a u^2 + b v^2 = K} within R against the coarea
// measure delta(a u^2 + b v^2 - K) du dv.
template <class Fn>
double conic_integral(double a, double b, double K, const Rect& R, Fn&& fn) {
  if (a == 0.0 || b == 0.0) return 0.0;
  if (a < 0) {
    a = -a;
    b = -b;
    K = -K;
  }
  const double weight = 1.0 / (2.0 * std::sqrt(std::abs(a * b)));
  double total = 0.0;
  auto run = [&](auto&& point, double t0, double t1, std::vector<double> bps) {
    bps.push_back(t0);
    bps.push_back(t1);
    std::sort(bps.begin(), bps.end());
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
      const double lo = std::max(bps[i], t0), hi = std::min(bps[i + 1], t1);
      if (!(hi > lo)) continue;
      const auto [um, vm] = point(0.5 * (lo + hi));
      if (!R.contains(um, vm)) continue;
      total += gauss(lo, hi, 4, [&](double t) {
        const auto [u, v] = point(t);
        return fn(u, v);
      });
    }
  };
  if (b > 0) {
    if (K <= 0) return 0.0;
    const double al = std::sqrt(K / a), ga = std::sqrt(K / b);
    std::vector<double> bps;
    const double tau = 2.0 * std::numbers::pi;
    for (double ue : {R.u0, R.u1})
      if (std::abs(ue) <= al) {
        const double t = std::acos(ue / al);
        bps.push_back(t);
        bps.push_back(tau - t);
      }
    for (double ve : {R.v0, R.v1})
      if (std::abs(ve) <= ga) {
        double t = std::asin(ve / ga);
        bps.push_back(t < 0 ? t + tau : t);
        bps.push_back(std::numbers::pi - std::asin(ve / ga));
      }
    run([&](double t) { return std::pair{al * std::cos(t), ga * std::sin(t)}; }, 0.0, tau, bps);
  } else if (K > 0) {
    const double al = std::sqrt(K / a), ga = std::sqrt(K / -b);
    const double t0 = std::asinh(R.v0 / ga), t1 = std::asinh(R.v1 / ga);
    for (double sg : {-1.0, 1.0}) {
      std::vector<double> bps;
      for (double ue : {R.u0, R.u1}) {
        const double c = ue / (sg * al);
        if (c >= 1.0) {
          bps.push_back(std::acosh(c));
          bps.push_back(-std::acosh(c));
        }
      }
      run([&](double t) { return std::pair{sg * al * std::cosh(t), ga * std::sinh(t)}; }, t0, t1, bps);
    }
  } else if (K < 0) {
    const double al = std::sqrt(-K / a), ga = std::sqrt(-K / -b);
    const double t0 = std::asinh(R.u0 / al), t1 = std::asinh(R.u1 / al);
    for (double sg : {-1.0, 1.0}) {
      std::vector<double> bps;
      for (double ve : {R.v0, R.v1}) {
        const double c = ve / (sg * ga);
        if (c >= 1.0) {
          bps.push_back(std::acosh(c));
          bps.push_back(-std::acosh(c));
        }
      }
      run([&](double t) { return std::pair{al * std::sinh(t), sg * ga * std::cosh(t)}; }, t0, t1, bps);
    }
  }
  return weight * total;
}

// Half-width of the (u, v) window at z3: z1 = z3/2 + (u, v) in P1 and
// z3 - z1 = z3/2 - (u, v) in P2.
bool window(const LwGeometry& g, const FreqPoint& z3, Rect& R) {
  const double hx = 0.5 * z3.xi, hy = 0.5 * z3.eta;
  R.u0 = std::max(g.P1.x0 - hx, hx - g.P2.x1);
  R.u1 = std::min(g.P1.x1 - hx, hx - g.P2.x0);
  R.v0 = std::max(g.P1.y0 - hy, hy - g.P2.y1);
  R.v1 = std::min(g.P1.y1 - hy, hy - g.P2.y0);
  return R.u0 < R.u1 && R.v0 < R.v1;
}

double conic_level(const LwGeometry& g, const FreqPoint& z3) {
  return 0.75 * phi(z3) + g.c3 - g.c1 - g.c2;
}

Iv quad_range(double a, double lo, double hi) {
  const Iv s = square(lo, hi);
  return a >= 0 ? Iv{a * s.lo, a * s.hi} : Iv{a * s.hi, a * s.lo};
}

bool feasible(const LwGeometry& g, const FreqPoint& z3) {
  if (z3.xi < g.P3.x0 || z3.xi > g.P3.x1 || z3.eta < g.P3.y0 || z3.eta > g.P3.y1) return false;
  Rect R;
  if (!window(g, z3, R)) return false;
  const Iv q = quad_range(3 * z3.xi, R.u0, R.u1) + quad_range(3 * z3.eta, R.v0, R.v1);
  const double K = conic_level(g, z3);
  return K >= q.lo && K <= q.hi;
}

}  // namespace

CertifiedD certify_transversality(const Box2& P1, const Box2& P2, const Box2& P3, double tightness,
                                  std::uint64_t max_nodes) {
  struct Node {
    Box2 b[3];
    double lower;
  };
  auto cmp = [](const Node& x, const Node& y) { return x.lower > y.lower; };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> pq(cmp);
  CertifiedD out;
  out.sampled_min = INFINITY;
  auto make = [&](const Box2& a, const Box2& b, const Box2& c) {
    Node n{{a, b, c}, min_abs(det_range(normal_range(a), normal_range(b), normal_range(c)))};
    const double v = std::abs(det_at(a.center(), b.center(), c.center()));
    out.sampled_min = std::min(out.sampled_min, v);
    out.sampled_max = std::max(out.sampled_max, v);
    ++out.nodes;
    return n;
  };
  pq.push(make(P1, P2, P3));
  while (true) {
    const Node top = pq.top();
    out.lower = top.lower;
    if (top.lower >= tightness * out.sampled_min) {
      out.converged = true;
      break;
    }
    if (out.nodes >= max_nodes) break;
    pq.pop();
    int w = 0;
    for (int i = 1; i < 3; ++i)
      if (top.b[i].width() > top.b[w].width()) w = i;
    for (const Box2& c : split(top.b[w])) {
      Box2 b[3] = {top.b[0], top.b[1], top.b[2]};
      b[w] = c;
      pq.push(make(b[0], b[1], b[2]));
    }
  }
  return out;
}

double PatchFunction::operator()(const FreqPoint& z) const {
  if (z.xi < patch.x0 || z.xi > patch.x1 || z.eta < patch.y0 || z.eta > patch.y1) return 0.0;
  const double u = (z.xi - patch.x0) / (patch.x1 - patch.x0);
  const double v = (z.eta - patch.y0) / (patch.y1 - patch.y0);
  double s = 0.0;
  for (const Bump& b : bumps) {
    const double du = u - b.u, dv = v - b.v;
    s += b.amp * std::exp(-(du * du + dv * dv) / (2.0 * b.width * b.width));
  }
  return s;
}

PatchFunction random_patch_function(const Box2& patch, int bumps, std::uint64_t seed) {
  Rng rng(seed);
  PatchFunction f{patch, {}};
  for (int i = 0; i < bumps; ++i)
    f.bumps.push_back({rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.15, 0.4),
                       rng.uniform(-1.0, 1.0)});
  return f;
}

LwGeometry near_antipodal_geometry(double r, double theta, double beta, double patch_fraction) {
  const FreqPoint z1{r * std::cos(theta), r * std::sin(theta)};
  const FreqPoint z2{-r * std::cos(theta + beta), -r * std::sin(theta + beta)};
  const FreqPoint z3 = z1 + z2;
  const double R = patch_fraction * r * beta;
  LwGeometry g;
  g.P1 = {z1.xi - R, z1.xi + R, z1.eta - R, z1.eta + R};
  g.P2 = {z2.xi - R, z2.xi + R, z2.eta - R, z2.eta + R};
  g.P3 = {z3.xi - 2 * R, z3.xi + 2 * R, z3.eta - 2 * R, z3.eta + 2 * R};
  g.c1 = 0.0;
  g.c2 = 0.0;
  g.c3 = phi(z1) + phi(z2) - phi(z3);
  return g;
}

LwEvaluation lw_evaluate(const LwGeometry& geo, const PatchFunction& f, const PatchFunction& g,
                         const LwQuadrature& q) {
  LwEvaluation ev;
  auto patch_norm = [&](const PatchFunction& h, const Box2& B) {
    const int m = q.patch_points;
    const double dx = (B.x1 - B.x0) / m, dy = (B.y1 - B.y0) / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const FreqPoint z{B.x0 + (i + 0.5) * dx, B.y0 + (j + 0.5) * dy};
        const double v = h(z);
        s += v * v * jac(z);
      }
    return std::sqrt(s * dx * dy);
  };
  ev.f_norm = patch_norm(f, geo.P1);
  ev.g_norm = patch_norm(g, geo.P2);

  const FreqPoint c3 = geo.P3.center();
  const FreqPoint z2c = geo.P2.center();
  // Across-strip direction: gradient of the tau mismatch in z3.
  FreqPoint e_perp{3 * (z2c.xi * z2c.xi - c3.xi * c3.xi), 3 * (z2c.eta * z2c.eta - c3.eta * c3.eta)};
  const double len = e_perp.norm();
  e_perp = len > 0 ? e_perp * (1.0 / len) : FreqPoint{1.0, 0.0};
  const FreqPoint e_par{-e_perp.eta, e_perp.xi};
  const double half = 0.5 * std::sqrt(2.0) * (geo.P3.x1 - geo.P3.x0);
  const double dp = 2 * half / q.lines;
  double total = 0.0;
  for (int li = 0; li < q.lines; ++li) {
    const double p = -half + (li + 0.5) * dp;
    auto at = [&](double qq) { return c3 + e_par * p + e_perp * qq; };
    const double ds = 2 * half / q.scan;
    int first = -1, last = -1;
    for (int k = 0; k <= q.scan; ++k)
      if (feasible(geo, at(-half + k * ds))) {
        if (first < 0) first = k;
        last = k;
      }
    if (first < 0) continue;
    auto edge = [&](double in, double out) {
      for (int it = 0; it < 50; ++it) {
        const double m = 0.5 * (in + out);
        (feasible(geo, at(m)) ? in : out) = m;
      }
      return in;
    };
    const double qlo = first > 0 ? edge(-half + first * ds, -half + (first - 1) * ds) : -half;
    const double qhi = last < q.scan ? edge(-half + last * ds, -half + (last + 1) * ds) : half;
    const double dq = (qhi - qlo) / q.across;
    for (int k = 0; k < q.across; ++k) {
      const FreqPoint z3 = at(qlo + (k + 0.5) * dq);
      Rect R;
      if (!window(geo, z3, R)) continue;
      const FreqPoint h{0.5 * z3.xi, 0.5 * z3.eta};
      const double G = conic_integral(3 * z3.xi, 3 * z3.eta, conic_level(geo, z3), R,
                                      [&](double u, double v) {
                                        const FreqPoint z1{h.xi + u, h.eta + v};
                                        const FreqPoint z2{h.xi - u, h.eta - v};
                                        return f(z1) * g(z2) * jac(z1) * jac(z2);
                                      });
      total += G * G * jac(z3) * dq * dp;
    }
  }
  ev.conv_norm = std::sqrt(total);
  return ev;
}

namespace {

double surface_diameter(const Box2& B, double c) {
  std::vector<std::array<double, 3>> pts;
  const int m = 8;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const FreqPoint z{B.x0 + (B.x1 - B.x0) * i / m, B.y0 + (B.y1 - B.y0) * j / m};
      pts.push_back({phi(z) + c, z.xi, z.eta});
    }
  double d = 0.0;
  for (const auto& a : pts)
    for (const auto& b : pts)
      d = std::max(d, std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]));
  return d;
}

}  // namespace

std::vector<LwRow> loomis_whitney_rows(const LwConfig& cfg) {
  std::vector<LwRow> rows;
  for (double beta : cfg.betas) {
    const LwGeometry geo = near_antipodal_geometry(cfg.r, cfg.theta, beta, cfg.patch_fraction);
    LwRow row;
    row.beta = beta;
    row.d = certify_transversality(geo.P1, geo.P2, geo.P3);
    row.diameter = std::max({surface_diameter(geo.P1, geo.c1), surface_diameter(geo.P2, geo.c2),
                             surface_diameter(geo.P3, geo.c3)});
    if (!(row.d.lower > 0.0) || row.diameter > cfg.diameter_factor * row.d.lower) {
      std::ostringstream os;
      os << "loomis_whitney: patch triple at beta=" << beta << " violates diam <= "
         << cfg.diameter_factor << " d (diam " << row.diameter << ", d " << row.d.lower << ")";
      throw std::invalid_argument(os.str());
    }
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t s = cfg.seed * 1000 + static_cast<std::uint64_t>(t) * 2;
      const PatchFunction f = random_patch_function(geo.P1, cfg.bumps, s);
      const PatchFunction g = random_patch_function(geo.P2, cfg.bumps, s + 1);
      row.max_ratio = std::max(row.max_ratio, lw_evaluate(geo, f, g, cfg.quad).ratio());
    }
    row.scaled = row.max_ratio * std::sqrt(row.d.lower);
    rows.push_back(row);
  }
  return rows;
}

double lw_planes_ratio(const PatchFunction& f, const PatchFunction& g, int points) {
  // S1 = {x = 0} carrying f(y, z), S2 = {y = 0} carrying g(x, z), S3 = {z = 0}.
  // (f*g)(x, y, 0) = int f(y, z) g(x, -z) dz.
  const Box2& F = f.patch;
  const Box2& G = g.patch;
  const double zlo = std::max(F.y0, -G.y1), zhi = std::min(F.y1, -G.y0);
  double conv = 0.0;
  const int m = points;
  const double dx = (G.x1 - G.x0) / m, dy = (F.x1 - F.x0) / m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = G.x0 + (i + 0.5) * dx, y = F.x0 + (j + 0.5) * dy;
      double h = 0.0;
      if (zhi > zlo) {
        const double dz = (zhi - zlo) / m;
        for (int k = 0; k < m; ++k) {
          const double z = zlo + (k + 0.5) * dz;
          h += f({y, z}) * g({x, -z}) * dz;
        }
      }
      conv += h * h * dx * dy;
    }
  auto norm2 = [m](const PatchFunction& h) {
    const Box2& B = h.patch;
    const double dx = (B.x1 - B.x0) / m, dy = (B.y1 - B.y0) / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double v = h({B.x0 + (i + 0.5) * dx, B.y0 + (j + 0.5) * dy});
        s += v * v * dx * dy;
      }
    return s;
  };
  const double den = std::sqrt(norm2(f) * norm2(g));
  return den > 0 ? std::sqrt(conv) / den : 0.0;
}

SweepReport loomis_whitney_empirical(const LwConfig& cfg, double slope_tolerance) {
  SweepReport rep;
  rep.name = "loomis_whitney";
  rep.seed = cfg.seed;
  {
    std::ostringstream os;
    os << "near_antipodal r=" << cfg.r << " theta=" << cfg.theta << " patch_fraction=" << cfg.patch_fraction
       << " betas=";
    for (std::size_t i = 0; i < cfg.betas.size(); ++i) os << (i ? "," : "") << cfg.betas[i];
    rep.grid = os.str();
  }
  rep.columns = {"beta", "d_certified", "d_sampled_min", "diameter", "max_ratio", "ratio_sqrt_d"};
  const std::vector<LwRow> rows = loomis_whitney_rows(cfg);
  std::vector<double> ds, ys;
  for (const LwRow& r : rows) {
    rep.rows.push_back({r.beta, r.d.lower, r.d.sampled_min, r.diameter, r.max_ratio, r.scaled});
    ds.push_back(r.d.lower);
    ys.push_back(r.scaled);
  }
  const double dmin = *std::min_element(ds.begin(), ds.end());
  const double dmax = *std::max_element(ds.begin(), ds.end());
  rep.add("d_range", dmax / dmin, ">=", 16.0, rows.size());
  rep.add("slope_log_ratio_sqrt_d_vs_log_d", loglog_slope(ds, ys), "in", -slope_tolerance,
          rows.size(), slope_tolerance);
  double toy = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    const Box2 F{0.0, 1.0, 0.0, 1.0}, G{0.0, 1.0, -1.0, 0.0};
    const std::uint64_t s = cfg.seed * 1000 + 500 + static_cast<std::uint64_t>(t) * 2;
    toy = std::max(toy, lw_planes_ratio(random_patch_function(F, cfg.bumps, s),
                                        random_patch_function(G, cfg.bumps, s + 1)));
  }
  rep.add("planes_toy_ratio", toy, "<=", 1.0, static_cast<std::uint64_t>(cfg.trials));
  return rep;
}

}  // namespace zklab
