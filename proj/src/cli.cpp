#include "zklab/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "zklab/errors.hpp"
#include "zklab/solver.hpp"
#include "zklab/version.hpp"

namespace zklab::cli {

namespace fs = io::fs;

namespace {

const json* find(const json& j, const std::string& path) {
  const json* node = &j;
  std::istringstream is(path);
  std::string part;
  while (std::getline(is, part, '.')) {
    if (!node->is_object()) return nullptr;
    const auto it = node->find(part);
    if (it == node->end() || it->is_null()) return nullptr;
    node = &*it;
  }
  return node;
}

template <class T>
T val(const json& j, const std::string& path, const T& fallback) {
  const json* n = find(j, path);
  if (!n) return fallback;
  try {
    return n->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + path + "': " + e.what());
  }
}

template <class T>
T req(const json& j, const std::string& path) {
  const json* n = find(j, path);
  if (!n) throw ConfigError("missing config key '" + path + "'");
  return val<T>(j, path, T{});
}

std::uint64_t seed_of(const json& cfg) { return val<std::uint64_t>(cfg, "seed", 1); }

FrequencyLattice lattice_from(const json& cfg) {
  const double box = val<double>(cfg, "lattice.box", 2.0 * M_PI);
  const int modes = val<int>(cfg, "lattice.modes", 64);
  try {
    return FrequencyLattice(box, modes);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SymbolParams symbol_from(const json& cfg) {
  const double s = val<double>(cfg, "symbol.s", -1.0 / 13.0);
  const double N = val<double>(cfg, "symbol.N", 1.0);
  const json* g = find(cfg, "symbol.gamma0");
  try {
    return SymbolParams::make(s, N, g ? std::optional<double>(g->get<double>()) : std::nullopt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SolverConfig solver_from(const json& cfg) {
  SolverConfig sc;
  sc.dt = val<double>(cfg, "solver.dt", sc.dt);
  try {
    sc.scheme = scheme_from_name(val<std::string>(cfg, "solver.scheme", "ifrk4"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  sc.dealias = val<bool>(cfg, "solver.dealias", sc.dealias);
  sc.record_every = val<int>(cfg, "solver.record_every", sc.record_every);
  sc.nonlinear = val<bool>(cfg, "solver.nonlinear", sc.nonlinear);
  sc.phase_budget = val<double>(cfg, "solver.phase_budget", sc.phase_budget);
  return sc;
}

SpectralField initial_from(const json& cfg, const FrequencyLattice& lat) {
  const std::string kind = val<std::string>(cfg, "initial.kind", "gaussian");
  const double L = lat.box_length();
  const double amp = val<double>(cfg, "initial.amplitude", 1.0);
  const double width = val<double>(cfg, "initial.width", 1.0);
  const double cx = val<double>(cfg, "initial.cx", 0.5 * L), cy = val<double>(cfg, "initial.cy", 0.5 * L);
  SpectralField u(lat);
  if (kind == "gaussian") {
    u = gaussian_bump(lat, amp, width, cx, cy);
  } else if (kind == "soliton") {
    u = solitary_profile(lat, amp, width, cx, cy);
  } else if (kind == "random") {
    const double kmax_default = static_cast<double>(dealias_kmax(lat.modes())) * lat.spacing();
    u = band_limited_random(lat, val<double>(cfg, "initial.kmin", lat.spacing()),
                            val<double>(cfg, "initial.kmax", kmax_default), val<double>(cfg, "initial.alpha", 1.0),
                            val<std::uint64_t>(cfg, "initial.seed", seed_of(cfg)));
  } else if (kind == "mode") {
    try {
      u = single_mode(lat, {val<std::int64_t>(cfg, "initial.kx", 1), val<std::int64_t>(cfg, "initial.ky", 0)},
                      val<double>(cfg, "initial.a", 1.0), val<double>(cfg, "initial.b", 0.0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (kind != "zero") {
    throw ConfigError("unknown initial.kind '" + kind + "' (gaussian, soliton, random, mode, zero)");
  }
  if (val<bool>(cfg, "initial.dealias", false)) apply_dealias(u);
  if (const json* m = find(cfg, "initial.mass")) {
    const double m0 = mass(u);
    if (m0 > 0) u *= std::sqrt(m->get<double>() / m0);
  }
  return u;
}

double rel_drift(const std::vector<double>& v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
  return v.front() != 0.0 ? worst / std::abs(v.front()) : worst;
}

std::string describe(const SweepCell& c) {
  std::ostringstream os;
  os.precision(6);
  os << c.observed << ' ' << c.relation << ' ' << c.threshold;
  if (c.relation == "in") os << ".." << c.threshold_hi;
  if (c.samples) os << " (" << c.samples << " samples)";
  return os.str();
}

// Writes rows, cells and report JSON; one verdict per cell.
void emit_report(const SweepReport& rep, const std::string& stem, const std::string& hash,
                 const fs::path& out, io::RunRecord& rec) {
  io::write_csv(out / (stem + ".csv"), io::report_rows_table(rep), hash);
  io::write_csv(out / (stem + "_cells.csv"), io::report_cells_table(rep), hash);
  json rj = io::report_json(rep);
  rj["config_hash"] = hash;
  rj["code_version"] = kCodeVersion;
  io::write_atomic(out / (stem + "_report.json"), rj.dump(2) + "\n");
  rec.files.insert(rec.files.end(), {stem + ".csv", stem + "_cells.csv", stem + "_report.json"});
  for (const SweepCell& c : rep.cells) rec.verdicts.push_back({rep.name + "/" + c.label, c.pass, describe(c)});
}

io::RunRecord start(const std::string& command, const json& cfg) {
  io::RunRecord r;
  r.command = command;
  r.config_hash = io::config_hash(cfg);
  r.started = io::utc_now();
  return r;
}

std::vector<double> doubles(const json& cfg, const std::string& path, std::vector<double> fallback) {
  return val<std::vector<double>>(cfg, path, std::move(fallback));
}

fs::path reference_path(const std::string& rel) {
  fs::path p(rel);
  if (p.is_relative() && !fs::exists(p)) p = fs::path(ZKLAB_SOURCE_DIR) / rel;
  return p;
}

double frozen_fti1_cstar() {
  const json j = io::load_json(reference_path("data/reference/fti1_cstar.json"));
  return j.at("cstar").get<double>();
}

ScanConfig scan_from(const json& cfg) {
  ScanConfig sc;
  sc.box = val<double>(cfg, "scan.box", sc.box);
  sc.modes = val<int>(cfg, "scan.modes", sc.modes);
  sc.N_list = val<std::vector<int>>(cfg, "scan.N_list", sc.N_list);
  sc.delta = val<double>(cfg, "scan.delta", sc.delta);
  sc.dt = val<double>(cfg, "scan.dt", sc.dt);
  sc.s = val<double>(cfg, "scan.s", sc.s);
  sc.alpha = val<double>(cfg, "scan.alpha", sc.alpha);
  sc.kmin = val<double>(cfg, "scan.kmin", sc.kmin);
  sc.kmax = val<double>(cfg, "scan.kmax", sc.kmax);
  sc.nonlinear = val<bool>(cfg, "scan.nonlinear", sc.nonlinear);
  sc.ratio_samples = val<int>(cfg, "scan.ratio_samples", sc.ratio_samples);
  sc.seed = seed_of(cfg);
  return sc;
}

WhitneyBoxConfig whitney_box_from(const json& cfg) {
  WhitneyBoxConfig c;
  c.N1 = val<double>(cfg, "whitney_box.N1", c.N1);
  c.n3_ratio = val<double>(cfg, "whitney_box.n3_ratio", c.n3_ratio);
  c.gap = val<double>(cfg, "whitney_box.gap", c.gap);
  c.base_scale = val<double>(cfg, "whitney_box.base_scale", c.base_scale);
  return c;
}

StrichartzConfig strichartz_from(const json& cfg) {
  StrichartzConfig c;
  c.box_scale = val<double>(cfg, "strichartz.box_scale", c.box_scale);
  c.time_samples = val<int>(cfg, "strichartz.time_samples", c.time_samples);
  c.delta_scale = val<double>(cfg, "strichartz.delta_scale", c.delta_scale);
  c.packet_width = val<double>(cfg, "strichartz.packet_width", c.packet_width);
  c.trials = val<int>(cfg, "strichartz.trials", c.trials);
  c.seed = seed_of(cfg);
  return c;
}

std::vector<std::pair<int, int>> pairs_from(const json& cfg) {
  std::vector<std::pair<int, int>> out;
  const json* p = find(cfg, "strichartz.pairs");
  if (!p) return {{1, 1}, {4, 1}, {16, 1}, {64, 1}};
  for (const json& e : *p) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("strichartz.pairs entries must be [N1, N3]");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

LwConfig lw_from(const json& cfg) {
  LwConfig c;
  c.r = val<double>(cfg, "loomis_whitney.r", c.r);
  c.theta = val<double>(cfg, "loomis_whitney.theta", c.theta);
  c.betas = doubles(cfg, "loomis_whitney.betas", c.betas);
  c.patch_fraction = val<double>(cfg, "loomis_whitney.patch_fraction", c.patch_fraction);
  c.diameter_factor = val<double>(cfg, "loomis_whitney.diameter_factor", c.diameter_factor);
  c.trials = val<int>(cfg, "loomis_whitney.trials", c.trials);
  c.bumps = val<int>(cfg, "loomis_whitney.bumps", c.bumps);
  c.quad.lines = val<int>(cfg, "loomis_whitney.lines", c.quad.lines);
  c.quad.scan = val<int>(cfg, "loomis_whitney.scan", c.quad.scan);
  c.quad.across = val<int>(cfg, "loomis_whitney.across", c.quad.across);
  c.quad.patch_points = val<int>(cfg, "loomis_whitney.patch_points", c.quad.patch_points);
  c.seed = seed_of(cfg);
  return c;
}

// ---- verifiers ----

SweepReport run_fti1(const json& cfg) {
  const SymbolParams p = symbol_from(cfg);
  const double cstar = val<double>(cfg, "fti1.cstar", p.s == 0.0 ? 0.0 : frozen_fti1_cstar());
  return verify_fti1(p, val<std::uint64_t>(cfg, "fti1.samples", 100000), seed_of(cfg), cstar);
}

SweepReport run_differentiation(const json& cfg) {
  const FrequencyLattice lat = lattice_from(cfg);
  const SpectralField u0 = initial_from(cfg, lat);
  return verify_differentiation(u0, doubles(cfg, "differentiation.dts", {1e-2, 3e-3, 1e-3}),
                                val<int>(cfg, "differentiation.k", 2), symbol_from(cfg),
                                val<double>(cfg, "differentiation.threshold", 1e-4),
                                val<std::uint64_t>(cfg, "differentiation.budget", kDefaultBudget));
}

SweepReport run_strichartz(const json& cfg) {
  return bilinear_strichartz_constant(pairs_from(cfg), strichartz_from(cfg),
                                      val<double>(cfg, "strichartz.growth_factor", 2.0));
}

SweepReport run_transversality(const json& cfg) {
  return transversality_sweep(val<std::uint64_t>(cfg, "transversality.samples", 10000), seed_of(cfg),
                              val<double>(cfg, "transversality.tolerance", 1e-10),
                              val<std::int64_t>(cfg, "transversality.coord_max", 1000));
}

SweepReport run_orthogonality(const json& cfg) {
  const WhitneyBoxConfig c = whitney_box_from(cfg);
  const auto rows = orthogonality_ensemble(c, doubles(cfg, "orthogonality.scales", {67108864.0, 134217728.0}),
                                           val<int>(cfg, "orthogonality.tiles", 64), seed_of(cfg));
  return orthogonality_report(c, rows, val<double>(cfg, "orthogonality.max_count", 8.0),
                              val<double>(cfg, "orthogonality.max_scale_change", 2.0));
}

SweepReport run_loomis_whitney(const json& cfg) {
  return loomis_whitney_empirical(lw_from(cfg), val<double>(cfg, "loomis_whitney.slope_tolerance", 0.15));
}

SweepReport run_correction_bound(const json& cfg) {
  const FrequencyLattice lat = lattice_from(cfg);
  return verify_correction_bound(lat.box_length(), lat.modes(),
                                 val<std::vector<int>>(cfg, "correction_bound.N_list", {2, 4, 8, 16}),
                                 val<double>(cfg, "symbol.s", -1.0 / 13.0),
                                 val<int>(cfg, "correction_bound.samples", 8), seed_of(cfg),
                                 req<double>(cfg, "correction_bound.cstar"));
}

using Verifier = SweepReport (*)(const json&);

const std::vector<std::pair<std::string, Verifier>>& verifiers() {
  static const std::vector<std::pair<std::string, Verifier>> v = {
      {"fti1", run_fti1},
      {"differentiation", run_differentiation},
      {"strichartz", run_strichartz},
      {"transversality", run_transversality},
      {"orthogonality", run_orthogonality},
      {"loomis_whitney", run_loomis_whitney},
      {"correction_bound", run_correction_bound}};
  return v;
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string tile_label(const TileIndex& t) { return std::to_string(t.kx) + ":" + std::to_string(t.ky); }

}  // namespace

json resolve_config(const Options& opt) {
  json cfg = opt.config.empty() ? json::object() : io::load_json(opt.config);
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  for (const std::string& o : opt.overrides) io::apply_override(cfg, o);
  if (opt.seed) cfg["seed"] = *opt.seed;
  return cfg;
}

std::vector<std::string> subcommands() {
  return {"solve", "scan-n", "verify", "decomp-stats", "strichartz", "transversality"};
}

std::vector<std::string> verifier_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : verifiers()) out.push_back(name);
  return out;
}

io::RunRecord cmd_solve(const json& cfg, const fs::path& out) {
  io::RunRecord rec = start("solve", cfg);
  const FrequencyLattice lat = lattice_from(cfg);
  const SpectralField u0 = initial_from(cfg, lat);
  const SolverConfig sc = solver_from(cfg);
  const double T = val<double>(cfg, "solver.T", 1.0);
  Trajectory traj;
  try {
    traj = ZkSolver(lat, sc).solve(u0, T);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const FunctionalSeries series = track(traj, symbol_from(cfg));
  io::write_csv(out / "series.csv", io::series_table(series), rec.config_hash);
  io::write_plot_spec(out / "series.plot.json",
                      {"functionals along the trajectory", "series.csv", "t",
                       {"mass", "energy", "E0", "E1_tilde"}, false, false},
                      rec.config_hash);
  rec.files = {"series.csv", "series.plot.json"};
  if (val<bool>(cfg, "output.trajectory", true)) {
    io::write_trajectory(out / "trajectory.zktraj", traj, rec.config_hash);
    rec.files.insert(rec.files.end(), {"trajectory.zktraj", "trajectory.zktraj.json"});
  }
  auto check = [&](const std::string& name, const std::vector<double>& v, const std::string& key) {
    const double d = rel_drift(v);
    const json* thr = find(cfg, key);
    std::ostringstream os;
    os.precision(6);
    os << d;
    if (thr) os << " <= " << thr->get<double>();
    rec.verdicts.push_back({name, !thr || d <= thr->get<double>(), os.str()});
  };
  check("mass_relative_drift", series.mass, "checks.mass_drift");
  check("energy_relative_drift", series.energy, "checks.energy_drift");
  rec.finished = io::utc_now();
  return rec;
}

io::RunRecord cmd_scan_N(const json& cfg, const fs::path& out) {
  io::RunRecord rec = start("scan-n", cfg);
  const ScanConfig sc = scan_from(cfg);
  ScanResult r;
  try {
    r = almost_conservation_scan(sc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const json* thr = find(cfg, "slope_threshold");
  SweepReport rep = scan_report(sc, r, thr ? thr->get<double>() : INFINITY);
  if (!thr) rep.cells.clear();
  rep.notes.push_back("fitted slope " + io::format_double(r.slope));
  emit_report(rep, "scan", rec.config_hash, out, rec);
  io::write_plot_spec(out / "scan.plot.json", {"E1 drift against N", "scan.csv", "N", {"drift"}, true, true},
                      rec.config_hash);
  rec.files.push_back("scan.plot.json");
  if (const json* ref = find(cfg, "reference")) {
    const double tol = val<double>(*ref, "tolerance", 0.1);
    const io::CsvTable t = io::read_csv(reference_path(req<std::string>(*ref, "path")));
    std::size_t ncol = 0, dcol = 0;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (t.columns[i] == "N") ncol = i;
      if (t.columns[i] == "drift") dcol = i;
    }
    for (const ScanRow& row : r.rows) {
      bool found = false;
      for (const auto& tr : t.rows)
        if (std::stod(tr[ncol]) == row.N) {
          found = true;
          const double ref_drift = std::stod(tr[dcol]);
          const double rel = std::abs(row.drift - ref_drift) / std::abs(ref_drift);
          rec.verdicts.push_back({"reference_drift_N=" + std::to_string(row.N), rel <= tol,
                                  io::format_double(rel) + " <= " + io::format_double(tol)});
        }
      if (!found) rec.verdicts.push_back({"reference_drift_N=" + std::to_string(row.N), false, "missing"});
    }
    std::vector<double> ns, ds;
    for (const auto& tr : t.rows) {
      ns.push_back(std::stod(tr[ncol]));
      ds.push_back(std::stod(tr[dcol]));
    }
    const double ref_slope = loglog_slope(ns, ds);
    const double rel = std::abs(r.slope - ref_slope) / std::abs(ref_slope);
    rec.verdicts.push_back({"reference_slope", rel <= tol,
                            io::format_double(r.slope) + " vs " + io::format_double(ref_slope) + ", relative " +
                                io::format_double(rel) + " <= " + io::format_double(tol)});
  }
  rec.finished = io::utc_now();
  return rec;
}

io::RunRecord cmd_verify(const json& cfg, const fs::path& out) {
  io::RunRecord rec = start("verify", cfg);
  const std::string name = val<std::string>(cfg, "verifier", "");
  for (const auto& [n, fn] : verifiers())
    if (n == name) {
      emit_report(fn(cfg), name, rec.config_hash, out, rec);
      rec.finished = io::utc_now();
      return rec;
    }
  throw ConfigError("unknown verifier '" + name + "'; available: " + joined(verifier_names()));
}

io::RunRecord cmd_decomp_stats(const json& cfg, const fs::path& out) {
  io::RunRecord rec = start("decomp-stats", cfg);
  const WhitneyBoxConfig c = whitney_box_from(cfg);
  const auto scales = doubles(cfg, "orthogonality.scales", {67108864.0, 134217728.0});
  const int tiles = val<int>(cfg, "orthogonality.tiles", 64);
  const auto rows = orthogonality_ensemble(c, scales, tiles, seed_of(cfg));
  io::CsvTable pairs;
  pairs.columns = {"A", "N1", "k1", "k2", "H1_min", "H2_min", "in_Z1", "in_Z2"};
  for (const OrthogonalityRow& r : rows) {
    const PartnerScan s = orthogonality_scan(r.k1, c);
    for (const auto& [k2, w] : s.examined)
      pairs.rows.push_back({io::format_double(r.A), io::format_double(c.N1), tile_label(r.k1), tile_label(k2),
                            io::format_double(w.H1_min), io::format_double(w.H2_min), w.in_Z1 ? "1" : "0",
                            w.in_Z2 ? "1" : "0"});
  }
  io::write_csv(out / "decomp_pairs.csv", pairs, rec.config_hash);
  rec.files.push_back("decomp_pairs.csv");
  emit_report(orthogonality_report(c, rows, val<double>(cfg, "orthogonality.max_count", 8.0),
                                   val<double>(cfg, "orthogonality.max_scale_change", 2.0)),
              "orthogonality", rec.config_hash, out, rec);
  rec.finished = io::utc_now();
  return rec;
}

io::RunRecord cmd_strichartz(const json& cfg, const fs::path& out) {
  io::RunRecord rec = start("strichartz", cfg);
  emit_report(run_strichartz(cfg), "strichartz", rec.config_hash, out, rec);
  rec.finished = io::utc_now();
  return rec;
}

io::RunRecord cmd_transversality(const json& cfg, const fs::path& out) {
  io::RunRecord rec = start("transversality", cfg);
  emit_report(run_transversality(cfg), "transversality", rec.config_hash, out, rec);
  if (val<bool>(cfg, "loomis_whitney.enabled", false))
    emit_report(run_loomis_whitney(cfg), "loomis_whitney", rec.config_hash, out, rec);
  rec.finished = io::utc_now();
  return rec;
}

io::RunRecord run_command(const std::string& command, const json& cfg, const fs::path& out) {
  io::RunRecord rec;
  if (command == "solve") rec = cmd_solve(cfg, out);
  else if (command == "scan-n") rec = cmd_scan_N(cfg, out);
  else if (command == "verify") rec = cmd_verify(cfg, out);
  else if (command == "decomp-stats") rec = cmd_decomp_stats(cfg, out);
  else if (command == "strichartz") rec = cmd_strichartz(cfg, out);
  else if (command == "transversality") rec = cmd_transversality(cfg, out);
  else throw ConfigError("unknown subcommand '" + command + "'; available: " + joined(subcommands()));
  rec.files.push_back("run_record.json");
  io::write_run_record(out, rec);
  return rec;
}

int main(int argc, char** argv) {
  CLI::App app{"zklab: numerical laboratory for the 2D Zakharov-Kuznetsov equation"};
  app.set_version_flag("--version", std::string(kCodeVersion));
  app.require_subcommand(1);
  Options opt;
  opt.out = "out";
  std::uint64_t seed = 0;
  for (const std::string& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "JSON config file");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--threads", opt.threads, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--override", opt.overrides, "KEY=VALUE with a dotted key path")->take_all();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    opt.command = sub->get_name();
    if (sub->count("--seed")) opt.seed = seed;
  }
#ifdef _OPENMP
  if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif
  try {
    const json cfg = resolve_config(opt);
    const io::RunRecord rec = run_command(opt.command, cfg, opt.out);
    for (const io::Verdict& v : rec.verdicts)
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
    std::cout << "config_hash=" << rec.config_hash << " out=" << opt.out.string() << "\n";
    return rec.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "zklab: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "zklab: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace zklab::cli
