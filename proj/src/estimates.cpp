#include "zklab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "zklab/errors.hpp"
#include "zklab/rng.hpp"

namespace zklab {

bool SweepReport::pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.pass; });
}

SweepCell& SweepReport::add(const std::string& label, double observed, const std::string& relation,
                            double threshold, std::uint64_t samples, double threshold_hi) {
  SweepCell c;
  c.label = label;
  c.observed = observed;
  c.relation = relation;
  c.threshold = threshold;
  c.threshold_hi = threshold_hi;
  c.samples = samples;
  if (relation == "<=")
    c.pass = observed <= threshold;
  else if (relation == ">=")
    c.pass = observed >= threshold;
  else if (relation == "in")
    c.pass = observed >= threshold && observed <= threshold_hi;
  else
    throw std::invalid_argument("SweepReport: unknown relation " + relation);
  if (!std::isfinite(observed)) c.pass = false;
  cells.push_back(c);
  return cells.back();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw std::invalid_argument("loglog_slope: non-positive value");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

// ---- Pointwise bound on M3 -------------------------------------------------

namespace {

FreqPoint polar_point(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

double log_uniform(Rng& rng, double a, double b) {
  return std::exp(rng.uniform(std::log(a), std::log(b)));
}

}  // namespace

// Strata where M3 vanishes identically only see cancellation error.
constexpr double kRoundoffFloor = 1e-12;

SweepReport verify_fti1(const SymbolParams& p, std::uint64_t samples, std::uint64_t seed,
                        double cstar) {
  p.validate();
  if (samples < 1) throw std::invalid_argument("verify_fti1: sample_count must be >= 1");
  SweepReport rep;
  rep.name = "fti1";
  rep.seed = seed;
  {
    std::ostringstream os;
    os << "s=" << p.s << " N=" << p.N << " strata=equal_scale,high_high_low,all_low,zero_min";
    rep.grid = os.str();
  }
  rep.columns = {"stratum", "xi1", "eta1", "xi2", "eta2", "ratio"};
  const std::uint64_t per = std::max<std::uint64_t>(1, samples / 4);
  const double twopi = 2.0 * std::numbers::pi;
  const char* names[4] = {"equal_scale", "high_high_low", "all_low", "zero_min"};
  for (int stratum = 0; stratum < 4; ++stratum) {
    Rng rng(seed * 4 + static_cast<std::uint64_t>(stratum));
    double worst = 0.0;
    std::uint64_t used = 0;
    while (used < per) {
      FreqPoint z1, z2;
      if (stratum == 0) {
        const double r = log_uniform(rng, p.N / 4, 64 * p.N);
        z1 = polar_point(r, rng.uniform(0, twopi));
        z2 = polar_point(r * log_uniform(rng, 0.5, 2.0), rng.uniform(0, twopi));
        const FreqPoint z3{-z1.xi - z2.xi, -z1.eta - z2.eta};
        const double a = z1.norm(), b = z2.norm(), c = z3.norm();
        if (std::min({a, b, c}) < 0.25 * std::max({a, b, c})) continue;
      } else if (stratum == 1) {
        const double r = log_uniform(rng, p.N / 4, 64 * p.N);
        z1 = polar_point(r, rng.uniform(0, twopi));
        const FreqPoint z3 = polar_point(r * log_uniform(rng, 1.0 / 4096, 0.25), rng.uniform(0, twopi));
        z2 = {-z1.xi - z3.xi, -z1.eta - z3.eta};
      } else if (stratum == 2) {
        z1 = polar_point(0.5 * p.N * std::sqrt(rng.uniform()), rng.uniform(0, twopi));
        z2 = polar_point(0.5 * p.N * std::sqrt(rng.uniform()), rng.uniform(0, twopi));
      } else {
        z1 = polar_point(log_uniform(rng, p.N / 16, 64 * p.N), rng.uniform(0, twopi));
        z2 = rng.uniform() < 0.5 ? FreqPoint{-z1.xi, -z1.eta} : FreqPoint{0.0, 0.0};
      }
      const Triple t{z1, z2, FreqPoint{-z1.xi - z2.xi, -z1.eta - z2.eta}};
      const std::optional<double> r = fti1_ratio(t, p);
      const double v = r.value_or(0.0);
      worst = std::max(worst, v);
      rep.rows.push_back({static_cast<double>(stratum), z1.xi, z1.eta, z2.xi, z2.eta, v});
      ++used;
    }
    const bool vanishing = stratum >= 2 || p.s == 0.0;
    rep.add(names[stratum], worst, "<=", vanishing ? kRoundoffFloor : cstar, used);
  }
  return rep;
}

// ---- Differentiation identity ------------------------------------------------

namespace {

cplx lambda_k_value(const SpectralField& u, int k, const SymbolParams& p) {
  if (k == 2) return {modified_mass_E0(u, p), 0.0};
  return lambda3_sigma3(u, p);
}

void require_budget(const SpectralField& u, std::uint64_t budget) {
  const auto s = static_cast<std::uint64_t>(u.support().size());
  if (s * s > budget) {
    std::ostringstream os;
    os << "differentiation: exhaustive higher sum needs " << s * s << " terms, budget " << budget;
    throw std::length_error(os.str());
  }
}

}  // namespace

cplx differentiation_rhs_generic_k2(const SpectralField& u, const SymbolParams& p) {
  // Lambda_2(M h2) vanishes on the diagonal; X(M)(z1,z2,z3) = M(z1, z2+z3)(xi2+xi3+eta2+eta3).
  const Symbol<3> X = [&p](const Triple& z) {
    const FreqPoint w{z[1].xi + z[2].xi, z[1].eta + z[2].eta};
    return multiplier_m(z[0], p) * multiplier_m(w, p) * (w.xi + w.eta);
  };
  const LambdaResult r = lambda3(X, u, u, u);
  return cplx(0.0, -2.0) * r.value;
}

DifferentiationCheck differentiation_check(const Trajectory& traj, int k, const SymbolParams& p,
                                           std::uint64_t budget) {
  if (k != 2 && k != 3) throw std::invalid_argument("differentiation_check: k must be 2 or 3");
  if (traj.states.size() < 3) throw std::invalid_argument("differentiation_check: need >= 3 states");
  const std::size_t mid = traj.states.size() / 2;
  const double h = traj.times[mid + 1] - traj.times[mid];
  if (std::abs((traj.times[mid] - traj.times[mid - 1]) - h) > 1e-12 * std::abs(h))
    throw std::invalid_argument("differentiation_check: non-uniform sampling");
  const SpectralField& u = traj.states[mid];
  require_budget(u, budget);
  DifferentiationCheck c;
  c.dt = h;
  c.lhs = (lambda_k_value(traj.states[mid + 1], k, p) - lambda_k_value(traj.states[mid - 1], k, p)) /
          (2.0 * h);
  if (!traj.config.nonlinear) {
    // Free flow: the modulus of every coefficient is constant.
    c.rhs = k == 2 ? cplx{} : lambda3_sigma3_h3(u, p);
  } else if (k == 2) {
    c.rhs = cplx(0.0, 2.0 / 3.0) * lambda3_M3(u, p);
  } else {
    const int n = u.n();
    const cplx l4 = lambda4_X_sigma3(u, p, [n](const Mode& w) { return in_dealias_set(w, n); });
    c.rhs = lambda3_sigma3_h3(u, p) - cplx(0.0, 3.0) * l4;
  }
  c.residual_abs = std::abs(c.lhs - c.rhs);
  c.residual = std::abs(c.rhs) > 0.0 ? c.residual_abs / std::abs(c.rhs) : c.residual_abs;
  return c;
}

RefinementStudy differentiation_refinement(const SpectralField& u0, const std::vector<double>& dts,
                                           int k, const SymbolParams& p, bool nonlinear,
                                           std::uint64_t budget) {
  RefinementStudy st;
  std::vector<double> x, y;
  for (double dt : dts) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.nonlinear = nonlinear;
    ZkSolver solver(u0.lattice(), cfg);
    const Trajectory tr = solver.solve(u0, 2.0 * dt);
    st.checks.push_back(differentiation_check(tr, k, p, budget));
    x.push_back(dt);
    y.push_back(st.checks.back().residual);
  }
  bool positive = x.size() >= 2;
  for (double v : y) positive = positive && v > 0.0;
  st.order = positive ? loglog_slope(x, y) : 0.0;
  return st;
}

SweepReport verify_differentiation(const SpectralField& u0, const std::vector<double>& dts, int k,
                                   const SymbolParams& p, double residual_threshold,
                                   std::uint64_t budget) {
  const RefinementStudy st = differentiation_refinement(u0, dts, k, p, true, budget);
  SweepReport rep;
  rep.name = "differentiation_k" + std::to_string(k);
  {
    std::ostringstream os;
    os << "k=" << k << " s=" << p.s << " N=" << p.N << " modes=" << u0.n() << " dts=";
    for (std::size_t i = 0; i < dts.size(); ++i) os << (i ? "," : "") << dts[i];
    rep.grid = os.str();
  }
  rep.columns = {"dt", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"};
  for (const auto& c : st.checks)
    rep.rows.push_back({c.dt, c.lhs.real(), c.lhs.imag(), c.rhs.real(), c.rhs.imag(), c.residual});
  const auto finest = std::min_element(st.checks.begin(), st.checks.end(),
                                       [](const auto& a, const auto& b) { return a.dt < b.dt; });
  rep.add("residual_at_finest_dt", finest->residual, "<=", residual_threshold, 1);
  if (st.checks.size() >= 2) rep.add("refinement_order", st.order, "in", 1.7, st.checks.size(), 2.3);
  return rep;
}

// ---- Almost conservation ---------------------------------------------------

SpectralField scan_initial_data(const ScanConfig& cfg) {
  const FrequencyLattice lat(cfg.box, cfg.modes);
  const double kmax = cfg.kmax > 0 ? cfg.kmax : static_cast<double>(dealias_kmax(cfg.modes)) * lat.spacing();
  SpectralField u = band_limited_random(lat, cfg.kmin, kmax, cfg.alpha, cfg.seed);
  apply_dealias(u);
  const double m = mass(u);
  if (m <= 0.0) throw ConfigError("scan: initial data is empty; check kmin/kmax");
  u *= 1.0 / std::sqrt(m);
  return u;
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

}  // namespace

ScanResult almost_conservation_scan(const ScanConfig& cfg) {
  if (cfg.N_list.size() < 2) throw ConfigError("scan: N_list needs at least two values to fit a slope");
  for (int N : cfg.N_list)
    if (!is_dyadic(N)) throw ConfigError("scan: N values must be dyadic");
  const SpectralField u0 = scan_initial_data(cfg);
  SolverConfig sc;
  sc.dt = cfg.dt;
  sc.nonlinear = cfg.nonlinear;
  const auto steps = static_cast<long long>(std::llround(cfg.delta / cfg.dt));
  sc.record_every = cfg.ratio_samples > 0 ? static_cast<int>(steps / cfg.ratio_samples) : static_cast<int>(steps);
  if (sc.record_every < 1 || steps % sc.record_every != 0)
    throw ConfigError("scan: delta/dt must be a multiple of ratio_samples");
  ZkSolver solver(u0.lattice(), sc);
  const Trajectory tr = solver.solve(u0, cfg.delta);
  ScanResult res;
  res.max_phase_per_step = solver.max_phase_per_step();
  const int n = cfg.modes;
  for (int N : cfg.N_list) {
    const SymbolParams p = SymbolParams::make(cfg.s, N);
    ScanRow row;
    row.N = N;
    row.gamma0 = p.gamma0;
    row.E1_start = corrected_mass_E1(tr.states.front(), p);
    row.E1_end = corrected_mass_E1(tr.states.back(), p);
    row.drift = std::abs(row.E1_end - row.E1_start);
    row.E0_drift = std::abs(modified_mass_E0(tr.states.back(), p) - modified_mass_E0(tr.states.front(), p));
    if (cfg.ratio_samples > 0) {
      std::vector<double> res3, res4;
      double e0max = 0.0;
      for (const SpectralField& u : tr.states) {
        res3.push_back((cplx(0.0, 2.0 / 3.0) * lambda3_M3(u, p, M3Region::Resonant)).real());
        res4.push_back(
            lambda4_X_sigma3(u, p, [n](const Mode& w) { return in_dealias_set(w, n); }).real());
        e0max = std::max(e0max, modified_mass_E0(u, p));
      }
      row.resonant_integral = std::abs(trapezoid(tr.times, res3));
      row.quadrilinear_integral = std::abs(trapezoid(tr.times, res4));
      const double g = p.gamma0, Nd = N;
      row.trilinear_ratio = row.resonant_integral / std::pow(e0max, 1.5) /
                            (std::pow(g, -0.5) * std::pow(Nd, -0.5) + std::pow(Nd, -0.25));
      row.quadrilinear_ratio = row.quadrilinear_integral / (e0max * e0max) / (1.0 / (g * Nd * Nd));
    }
    res.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  for (const auto& r : res.rows) {
    xs.push_back(r.N);
    ys.push_back(std::max(r.drift, 1e-300));
  }
  res.slope = loglog_slope(xs, ys);
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    if (res.rows[i].drift > res.rows[i - 1].drift) res.monotone = false;
  return res;
}

SweepReport scan_report(const ScanConfig& cfg, const ScanResult& r, double slope_threshold) {
  SweepReport rep;
  rep.name = "almost_conservation";
  rep.seed = cfg.seed;
  {
    std::ostringstream os;
    os << "box=" << cfg.box << " modes=" << cfg.modes << " s=" << cfg.s << " delta=" << cfg.delta
       << " dt=" << cfg.dt << " N=";
    for (std::size_t i = 0; i < cfg.N_list.size(); ++i) os << (i ? "," : "") << cfg.N_list[i];
    rep.grid = os.str();
  }
  rep.columns = {"N", "gamma0", "E1_start", "E1_end", "drift", "E0_drift", "trilinear_ratio",
                 "quadrilinear_ratio"};
  for (const auto& row : r.rows)
    rep.rows.push_back({static_cast<double>(row.N), row.gamma0, row.E1_start, row.E1_end, row.drift,
                        row.E0_drift, row.trilinear_ratio, row.quadrilinear_ratio});
  rep.add("slope", r.slope, "<=", slope_threshold, r.rows.size());
  if (!r.monotone) rep.notes.push_back("drifts are not monotone in N; flagged for review");
  return rep;
}

SweepReport verify_correction_bound(double box, int modes, const std::vector<int>& N_list, double s,
                                    int samples, std::uint64_t seed, double cstar) {
  SweepReport rep;
  rep.name = "correction_bound";
  rep.seed = seed;
  rep.grid = "box=" + std::to_string(box) + " modes=" + std::to_string(modes);
  rep.columns = {"N", "sample", "Lambda3_sigma3", "E0", "constant"};
  const FrequencyLattice lat(box, modes);
  const double kmax = static_cast<double>(dealias_kmax(modes)) * lat.spacing();
  for (int N : N_list) {
    const SymbolParams p = SymbolParams::make(s, N);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      SpectralField u = band_limited_random(lat, lat.spacing(), kmax, 1.0,
                                            seed * 1000003ULL + static_cast<std::uint64_t>(N) * 101 + i);
      apply_dealias(u);
      const double e0 = modified_mass_E0(u, p);
      const double l3 = std::abs(lambda3_sigma3(u, p));
      const double c = l3 / (std::pow(p.gamma0, -1.0) / N * std::pow(e0, 1.5));
      worst = std::max(worst, c);
      rep.rows.push_back({static_cast<double>(N), static_cast<double>(i), l3, e0, c});
    }
    rep.add("N=" + std::to_string(N), worst, "<=", cstar, static_cast<std::uint64_t>(samples));
  }
  return rep;
}

// ---- Transversality --------------------------------------------------------

SurfacePoint surface_point(const FreqPoint& z, double c) {
  return {z.xi * z.xi * z.xi + z.eta * z.eta * z.eta + c, z.xi, z.eta, c};
}

std::array<double, 3> unit_normal(const FreqPoint& z) {
  const double a = 3.0 * z.xi * z.xi, b = 3.0 * z.eta * z.eta;
  const double inv = 1.0 / std::sqrt(1.0 + a * a + b * b);
  return {-inv, a * inv, b * inv};
}

TransversalityDet transversality_det(const SurfacePoint& p1, const SurfacePoint& p2,
                                     const SurfacePoint& p3) {
  const double a1 = 3 * p1.xi * p1.xi, b1 = 3 * p1.eta * p1.eta;
  const double a2 = 3 * p2.xi * p2.xi, b2 = 3 * p2.eta * p2.eta;
  const double a3 = 3 * p3.xi * p3.xi, b3 = 3 * p3.eta * p3.eta;
  // Rows (-1, a_i, b_i).
  const double det = -(a2 * b3 - b2 * a3) + (a1 * b3 - b1 * a3) - (a1 * b2 - b1 * a2);
  const double norm = std::sqrt(1 + a1 * a1 + b1 * b1) * std::sqrt(1 + a2 * a2 + b2 * b2) *
                      std::sqrt(1 + a3 * a3 + b3 * b3);
  return {det, det / norm};
}

SweepReport transversality_sweep(std::uint64_t samples, std::uint64_t seed, double tol,
                                 std::int64_t coord_max) {
  SweepReport rep;
  rep.name = "transversality";
  rep.seed = seed;
  rep.grid = "integer zero-sum triples, |coord| <= " + std::to_string(coord_max);
  rep.columns = {"xi1", "eta1", "xi2", "eta2", "det", "factored", "rel_error"};
  Rng rng(seed);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const FreqPoint z1{static_cast<double>(rng.between(-coord_max, coord_max)),
                       static_cast<double>(rng.between(-coord_max, coord_max))};
    const FreqPoint z2{static_cast<double>(rng.between(-coord_max, coord_max)),
                       static_cast<double>(rng.between(-coord_max, coord_max))};
    const FreqPoint z3{-z1.xi - z2.xi, -z1.eta - z2.eta};
    const double det = transversality_det(surface_point(z1, 0), surface_point(z2, 0),
                                          surface_point(z3, 0)).unnormalized;
    const double fac = 9.0 * H3(z1, z2) * H2(z1, z2);
    const double scale = std::max(std::abs(det), fac);
    const double err = scale > 0 ? std::abs(std::abs(det) - fac) / scale : 0.0;
    worst = std::max(worst, err);
    if (i < 10000) rep.rows.push_back({z1.xi, z1.eta, z2.xi, z2.eta, det, fac, err});
  }
  rep.add("factorization_rel_error", worst, "<=", tol, samples);
  const double ex = transversality_det(surface_point({1, 0}, 0), surface_point({0, 1}, 0),
                                       surface_point({-1, -1}, 0)).unnormalized;
  rep.add("worked_example_det_minus_9", std::abs(ex - 9.0), "<=", 0.0, 1);
  return rep;
}

// ---- Orthogonality ------------------------------------------------------------

std::vector<OrthogonalityRow> orthogonality_ensemble(const WhitneyBoxConfig& cfg,
                                                     const std::vector<double>& scales, int tiles,
                                                     std::uint64_t seed) {
  std::vector<OrthogonalityRow> rows;
  Rng rng(seed);
  std::vector<FreqPoint> z1s;
  for (int i = 0; i < tiles; ++i) {
    const double sx = rng.uniform() < 0.5 ? -1.0 : 1.0, sy = rng.uniform() < 0.5 ? -1.0 : 1.0;
    z1s.push_back({sx * rng.uniform(0.5, 2.0) * cfg.N1, sy * rng.uniform(0.5, 2.0) * cfg.N3()});
  }
  for (double A : scales)
    for (const FreqPoint& z : z1s) {
      const TileIndex k1 = tile_of(z, A, cfg.N1);
      const PartnerScan s = orthogonality_scan(k1, cfg);
      rows.push_back({A, k1, s.count, s.distinct_coarse});
    }
  return rows;
}

SweepReport orthogonality_report(const WhitneyBoxConfig& cfg, const std::vector<OrthogonalityRow>& rows,
                                 double max_count, double max_scale_change) {
  SweepReport rep;
  rep.name = "orthogonality";
  {
    std::ostringstream os;
    os << "whitney_box N1=" << cfg.N1 << " N3=" << cfg.N3() << " gap=" << cfg.gap;
    rep.grid = os.str();
  }
  rep.columns = {"A", "k1x", "k1y", "count", "distinct_coarse"};
  std::vector<double> scales;
  for (const auto& r : rows) {
    rep.rows.push_back({r.A, static_cast<double>(r.k1.kx), static_cast<double>(r.k1.ky),
                        static_cast<double>(r.count), static_cast<double>(r.distinct_coarse)});
    if (std::find(scales.begin(), scales.end(), r.A) == scales.end()) scales.push_back(r.A);
  }
  std::vector<double> maxima;
  for (double A : scales) {
    double mx = 0, mc = 0;
    std::uint64_t n = 0;
    for (const auto& r : rows)
      if (r.A == A) {
        mx = std::max(mx, static_cast<double>(r.count));
        mc = std::max(mc, static_cast<double>(r.distinct_coarse));
        ++n;
      }
    maxima.push_back(mx);
    std::ostringstream lab;
    lab << "max_count_A=2^" << std::lround(std::log2(A));
    rep.add(lab.str(), mx, "<=", max_count, n);
    std::ostringstream note;
    note << "A=2^" << std::lround(std::log2(A)) << " max distinct coarse tiles holding partners: " << mc;
    rep.notes.push_back(note.str());
  }
  for (std::size_t i = 1; i < maxima.size(); ++i)
    rep.add("scale_change_" + std::to_string(i), std::abs(maxima[i] - maxima[i - 1]), "<=",
            max_scale_change);
  return rep;
}

}  // namespace zklab
