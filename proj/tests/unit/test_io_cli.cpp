#include <gtest/gtest.h>

#include <fstream>

#include "zklab/cli.hpp"
#include "zklab/errors.hpp"
#include "zklab/io.hpp"
#include "zklab/solver.hpp"

using namespace zklab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zklab_unit_" + name);
  fs::remove_all(p);
  return p;
}

int run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "zklab");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

io::json small_solve() {
  return io::json::parse(R"({"lattice": {"box": 6.283185307179586, "modes": 16},
    "initial": {"kind": "gaussian", "amplitude": 0.5, "width": 1.0, "cx": 3.0, "cy": 3.0},
    "solver": {"dt": 0.001, "T": 0.01, "record_every": 5}})");
}

}  // namespace

TEST(Hash, StableAndKeyOrderFree) {
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const io::json a = io::json::parse(R"({"b": 1, "a": {"y": 2, "x": [1, 2]}})");
  const io::json b = io::json::parse(R"({"a": {"x": [1, 2], "y": 2}, "b": 1})");
  EXPECT_EQ(io::config_hash(a), io::config_hash(b));
  EXPECT_NE(io::config_hash(a), io::config_hash(io::json::parse(R"({"b": 2})")));
  EXPECT_EQ(io::config_hash(a).size(), 64u);
}

TEST(Override, ParsesDottedPaths) {
  io::json j = io::json::object();
  io::apply_override(j, "solver.dt=0.002");
  io::apply_override(j, "solver.scheme=etdrk4");
  io::apply_override(j, "scan.N_list=[2,4]");
  io::apply_override(j, "a.b.c=true");
  EXPECT_DOUBLE_EQ(j["solver"]["dt"].get<double>(), 0.002);
  EXPECT_EQ(j["solver"]["scheme"], "etdrk4");
  EXPECT_EQ(j["scan"]["N_list"].size(), 2u);
  EXPECT_TRUE(j["a"]["b"]["c"].get<bool>());
  EXPECT_THROW(io::apply_override(j, "novalue"), ConfigError);
  EXPECT_THROW(io::apply_override(j, "=3"), ConfigError);
  EXPECT_THROW(io::apply_override(j, "solver.dt.x=1"), ConfigError);
}

TEST(Csv, FormatAndRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(NAN), "nan");
  EXPECT_EQ(io::format_double(-INFINITY), "-inf");
  io::CsvTable t;
  t.columns = {"x", "y"};
  t.add_row({1.0, 1.0 / 3.0});
  t.add_row({-2.5, 1e-300});
  const std::string text = io::csv_text(t, "h123");
  EXPECT_EQ(text.rfind("# zklab config_hash=h123 code_version=", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(io::csv_payload(text), "x,y\n1,0.33333333333333331\n-2.5,1e-300\n");
  const fs::path d = scratch("csv");
  io::write_csv(d / "nested" / "t.csv", t, "h123");
  std::string hash;
  const io::CsvTable back = io::read_csv(d / "nested" / "t.csv", &hash);
  EXPECT_EQ(hash, "h123");
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(std::stod(back.rows[0][1]), 1.0 / 3.0);
  fs::remove_all(d);
}

TEST(Atomic, ReplacesWithoutLeftovers) {
  const fs::path d = scratch("atomic");
  io::write_atomic(d / "f.txt", "one");
  io::write_atomic(d / "f.txt", "two");
  EXPECT_EQ(io::read_file(d / "f.txt"), "two");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++n;
  EXPECT_EQ(n, 1u);
  EXPECT_THROW(io::read_file(d / "missing"), std::runtime_error);
  fs::remove_all(d);
}

TEST(Trajectory, BinaryRoundTrip) {
  const FrequencyLattice lat(5.0, 8);
  SolverConfig sc;
  sc.dt = 1e-3;
  sc.record_every = 2;
  const Trajectory tr = ZkSolver(lat, sc).solve(gaussian_bump(lat, 1.0, 0.8, 2.5, 2.5), 0.006);
  const fs::path d = scratch("traj");
  io::write_trajectory(d / "t.zktraj", tr, "abc");
  EXPECT_EQ(fs::file_size(d / "t.zktraj"), 8 + 4 + 8 + 8 + tr.states.size() * (8 + 64 * 16));
  EXPECT_TRUE(fs::exists(d / "t.zktraj.json"));
  const Trajectory back = io::read_trajectory(d / "t.zktraj");
  ASSERT_EQ(back.states.size(), tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    EXPECT_EQ(back.times[i], tr.times[i]);
    EXPECT_EQ(back.states[i].coeffs(), tr.states[i].coeffs());
  }
  std::ofstream(d / "t.zktraj", std::ios::binary | std::ios::app) << 'x';
  EXPECT_THROW(io::read_trajectory(d / "t.zktraj"), std::runtime_error);
  fs::remove_all(d);
}

TEST(RunRecord, JsonShape) {
  io::RunRecord r;
  r.command = "verify";
  r.verdicts = {{"a", true, ""}, {"b", false, "x"}};
  EXPECT_FALSE(r.pass());
  const io::json j = r.to_json();
  EXPECT_EQ(j["command"], "verify");
  EXPECT_EQ(j["verdicts"].size(), 2u);
}

TEST(Cli, SolveZeroDataIsFlat) {
  io::json cfg = small_solve();
  cfg["initial"] = {{"kind", "zero"}};
  const fs::path d = scratch("zero");
  const io::RunRecord r = cli::run_command("solve", cfg, d / "out");
  EXPECT_TRUE(r.pass());
  const io::CsvTable t = io::read_csv(d / "out" / "series.csv");
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& row : t.rows)
    for (std::size_t c = 1; c < row.size(); ++c) EXPECT_EQ(std::stod(row[c]), 0.0);
  EXPECT_TRUE(fs::exists(d / "out" / "run_record.json"));
  fs::remove_all(d);
}

TEST(Cli, SolveIsDeterministic) {
  const fs::path d = scratch("det");
  const io::RunRecord a = cli::run_command("solve", small_solve(), d / "a");
  cli::run_command("solve", small_solve(), d / "b");
  for (const std::string& f : a.files)
    if (fs::path(f).extension() == ".csv")
      EXPECT_EQ(io::csv_payload(io::read_file(d / "a" / f)), io::csv_payload(io::read_file(d / "b" / f)));
  EXPECT_EQ(io::read_file(d / "a" / "trajectory.zktraj"), io::read_file(d / "b" / "trajectory.zktraj"));
  fs::remove_all(d);
}

TEST(Cli, ResolveAppliesOverridesThenSeed) {
  const fs::path d = scratch("resolve");
  io::write_atomic(d / "c.json", R"({"seed": 1, "solver": {"dt": 0.5}})");
  cli::Options o;
  o.config = d / "c.json";
  o.overrides = {"solver.dt=0.25", "seed=5"};
  o.seed = 9;
  const io::json j = cli::resolve_config(o);
  EXPECT_DOUBLE_EQ(j["solver"]["dt"].get<double>(), 0.25);
  EXPECT_EQ(j["seed"].get<int>(), 9);
  o.config = d / "missing.json";
  EXPECT_THROW(cli::resolve_config(o), ConfigError);
  fs::remove_all(d);
}

TEST(Cli, UnknownNamesAreConfigErrors) {
  const fs::path d = scratch("unknown");
  EXPECT_THROW(cli::run_command("verify", io::json{{"verifier", "nope"}}, d), ConfigError);
  EXPECT_THROW(cli::run_command("frobnicate", io::json::object(), d), ConfigError);
  try {
    cli::run_command("verify", io::json{{"verifier", "nope"}}, d);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fti1"), std::string::npos);
  }
  fs::remove_all(d);
}

TEST(Cli, ExitCodes) {
  const fs::path d = scratch("exit");
  io::write_atomic(d / "solve.json", small_solve().dump());
  io::write_atomic(d / "bad.json", R"({"verifier": "nope"})");
  io::write_atomic(d / "strict.json", R"({"verifier": "transversality",
      "transversality": {"samples": 10, "tolerance": -1.0}})");
  EXPECT_EQ(run_main({"solve", "--config", (d / "solve.json").string(), "--out", (d / "o1").string()}), 0);
  EXPECT_TRUE(fs::exists(d / "o1" / "series.csv"));
  EXPECT_EQ(run_main({"verify", "--config", (d / "bad.json").string(), "--out", (d / "o2").string()}), 2);
  EXPECT_EQ(run_main({"verify", "--config", (d / "strict.json").string(), "--out", (d / "o3").string()}), 1);
  EXPECT_EQ(run_main({"nosuch"}), 2);
  EXPECT_EQ(run_main({"solve", "--threads", "-3"}), 2);
  EXPECT_EQ(run_main({"solve", "--config", (d / "solve.json").string(), "--override", "solver.scheme=bogus",
                      "--out", (d / "o4").string()}),
            2);
  fs::remove_all(d);
}
