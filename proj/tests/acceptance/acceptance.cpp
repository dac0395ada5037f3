// One PASS/FAIL line per acceptance criterion. Run from the repository root.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "zklab/cli.hpp"
#include "zklab/errors.hpp"
#include "zklab/estimates.hpp"
#include "zklab/rng.hpp"
#include "zklab/solver.hpp"

using namespace zklab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

std::string failed_cells(const SweepReport& r) {
  std::string s;
  for (const SweepCell& c : r.cells)
    if (!c.pass) s += " " + c.label + "=" + fmt(c.observed);
  return s.empty() ? "" : " failing:" + s;
}

const double kS = -1.0 / 13.0;

Outcome conservation() {
  const FrequencyLattice lat(20.0, 128);
  const SpectralField u0 = gaussian_bump(lat, 1.0, 1.0, 10.0, 10.0);
  SolverConfig sc;
  sc.dt = 1e-3;
  sc.record_every = 50;
  const Trajectory tr = ZkSolver(lat, sc).solve(u0, 1.0);
  double dm = 0, de = 0;
  const double m0 = mass(tr.states.front()), e0 = energy(tr.states.front());
  for (const auto& u : tr.states) {
    dm = std::max(dm, std::abs(mass(u) - m0) / m0);
    de = std::max(de, std::abs(energy(u) - e0) / std::abs(e0));
  }
  return {dm < 1e-8 && de < 1e-6, "mass drift " + fmt(dm) + " (< 1e-8), energy drift " + fmt(de) + " (< 1e-6)"};
}

Outcome cube_identity() {
  const FrequencyLattice lat(20.0, 1024);
  Rng rng(2);
  double worst = 0.0;
  const std::int64_t K = 511;
  for (int i = 0; i < 1000000; ++i) {
    const Mode a{rng.between(-K, K), rng.between(-K, K)}, b{rng.between(-K, K), rng.between(-K, K)};
    const FreqPoint z1 = lat.point(a), z2 = lat.point(b), z3 = -(z1 + z2);
    const Triple t{z1, z2, z3};
    const double scale = std::pow(std::abs(z1.xi), 3) + std::pow(std::abs(z2.xi), 3) + std::pow(std::abs(z3.xi), 3) +
                         std::pow(std::abs(z1.eta), 3) + std::pow(std::abs(z2.eta), 3) +
                         std::pow(std::abs(z3.eta), 3);
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(sum_of_cubes(t) - 3.0 * resonance_P(t)) / scale);
  }
  return {worst <= 1e-12, "max relative error " + fmt(worst) + " over 1e6 triples (<= 1e-12)"};
}

Outcome differentiation() {
  const FrequencyLattice lat(2.0 * M_PI, 32);
  SpectralField u0 = band_limited_random(lat, 1.0, 2.0, 1.0, 7);
  u0 *= 1.0 / std::sqrt(mass(u0));
  const SweepReport r = verify_differentiation(u0, {1e-2, 3e-3, 1e-3}, 2, SymbolParams::make(kS, 1), 1e-4);
  return {r.pass(), "residual at dt=1e-3 " + fmt(r.cells[0].observed) + " (< 1e-4), order " +
                        fmt(r.cells[1].observed) + " (in [1.7, 2.3])" + failed_cells(r)};
}

Outcome scaling() {
  const ScanConfig cfg;
  const ScanResult res = almost_conservation_scan(cfg);
  const io::CsvTable ref = io::read_csv("data/reference/scan_drift.csv");
  std::size_t nc = 0, dc = 0;
  for (std::size_t i = 0; i < ref.columns.size(); ++i) {
    if (ref.columns[i] == "N") nc = i;
    if (ref.columns[i] == "drift") dc = i;
  }
  double worst_ref = 0.0;
  std::size_t matched = 0;
  for (const ScanRow& row : res.rows)
    for (const auto& r : ref.rows)
      if (std::stod(r[nc]) == row.N) {
        const double d = std::stod(r[dc]);
        worst_ref = std::max(worst_ref, std::abs(row.drift - d) / std::abs(d));
        ++matched;
      }
  std::vector<double> ns, ds;
  for (const auto& r : ref.rows) {
    ns.push_back(std::stod(r[nc]));
    ds.push_back(std::stod(r[dc]));
  }
  const double ref_slope = loglog_slope(ns, ds);
  const bool ok = res.slope <= -0.2 && matched == res.rows.size() && worst_ref <= 0.1 &&
                  std::abs(res.slope - ref_slope) <= 0.1 * std::abs(ref_slope);
  return {ok, "slope " + fmt(res.slope) + " (<= -0.2; reference " + fmt(ref_slope) +
                  " within 10%), worst deviation from reference drift table " +
                  fmt(worst_ref) + " (<= 0.1), " + std::to_string(matched) + "/" +
                  std::to_string(res.rows.size()) + " rows matched"};
}

Outcome fti1() {
  const double cstar = io::load_json("data/reference/fti1_cstar.json").at("cstar").get<double>();
  try {
    const SweepReport r = verify_fti1(SymbolParams::make(kS, 16), 100000, 1, cstar);
    double mx = 0;
    for (const auto& c : r.cells) mx = std::max(mx, c.observed);
    return {r.pass(), "extremal ratio " + fmt(mx) + " (<= C* = " + fmt(cstar) + "), zero-minimum triples clean" +
                          failed_cells(r)};
  } catch (const VerificationFailure& e) {
    return {false, std::string("zero-minimum triple with M3 != 0: ") + e.what()};
  }
}

Outcome transversality() {
  const SweepReport r = transversality_sweep(10000, 1, 1e-10);
  std::string d;
  for (const auto& c : r.cells) d += c.label + "=" + fmt(c.observed) + " ";
  return {r.pass(), d + failed_cells(r)};
}

Outcome orthogonality() {
  const WhitneyBoxConfig cfg;
  const auto rows = orthogonality_ensemble(cfg, {67108864.0, 134217728.0}, 64, 1);
  const SweepReport r = orthogonality_report(cfg, rows, 8.0, 2.0);
  std::string d;
  for (const auto& c : r.cells) d += c.label + "=" + fmt(c.observed) + " ";
  return {r.pass(), d + "(max count <= 8, scale change <= 2)"};
}

Outcome strichartz() {
  StrichartzConfig cfg;
  const SweepReport r = bilinear_strichartz_constant({{1, 1}, {4, 1}, {16, 1}, {64, 1}}, cfg, 2.0);
  std::string d;
  for (const auto& c : r.cells) d += c.label + "=" + fmt(c.observed) + " ";
  return {r.pass(), d + failed_cells(r)};
}

Outcome loomis_whitney() {
  const SweepReport r = loomis_whitney_empirical(LwConfig{}, 0.15);
  std::string d;
  for (const auto& c : r.cells) d += c.label + "=" + fmt(c.observed) + " ";
  return {r.pass(), d + failed_cells(r)};
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"solve", "configs/solve_gaussian.json"},
      {"verify", "configs/verify_fti1.json"},
      {"verify", "configs/verify_differentiation.json"},
      {"verify", "configs/verify_transversality.json"},
      {"verify", "configs/verify_correction_bound.json"},
      {"decomp-stats", "configs/decomp_stats.json"},
      {"transversality", "configs/transversality_lw.json"}};
  const fs::path root = fs::temp_directory_path() / "zklab_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const io::json cfg = io::load_json(runs[i].second);
    const fs::path a = root / (std::to_string(i) + "a"), b = root / (std::to_string(i) + "b");
    const io::RunRecord ra = cli::run_command(runs[i].first, cfg, a);
    cli::run_command(runs[i].first, cfg, b);
    for (const std::string& f : ra.files) {
      if (fs::path(f).extension() != ".csv") continue;
      ++files;
      if (io::csv_payload(io::read_file(a / f)) != io::csv_payload(io::read_file(b / f)))
        return {false, runs[i].second + ": " + f + " differs between runs"};
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(files) + " CSV payloads byte-identical across " + std::to_string(runs.size()) +
                    " configs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"conservation", conservation},
      {"cube_resonance_identity", cube_identity},
      {"differentiation_formula", differentiation},
      {"almost_conservation_scaling", scaling},
      {"fti1_pointwise_bound", fti1},
      {"transversality_factorization", transversality},
      {"whitney_almost_orthogonality", orthogonality},
      {"bilinear_strichartz_gain", strichartz},
      {"loomis_whitney_d_law", loomis_whitney},
      {"determinism", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
