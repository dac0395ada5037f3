#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "zklab/estimates.hpp"
#include "zklab/functionals.hpp"
#include "zklab/trajectory.hpp"

namespace zklab::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Compact dump with sorted keys; the input to config hashing.
std::string canonical(const json& j);
std::string sha256_hex(const std::string& bytes);
std::string config_hash(const json& config);

// %.17g; non-finite values print as nan, inf, -inf.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
};

// First line "# zklab config_hash=<hash> code_version=<v>", then header and rows, LF endings.
std::string csv_text(const CsvTable& t, const std::string& hash);
// Everything after the provenance line.
std::string csv_payload(const std::string& text);
CsvTable read_csv(const fs::path& path, std::string* hash = nullptr);

// Write to a sibling temp file, then rename over the target. Creates parent
// directories. Throws std::runtime_error on failure.
void write_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

void write_csv(const fs::path& path, const CsvTable& t, const std::string& hash);

CsvTable series_table(const FunctionalSeries& s);
CsvTable report_rows_table(const SweepReport& r);
CsvTable report_cells_table(const SweepReport& r);
json report_json(const SweepReport& r);

// Binary trajectory: magic "ZKTRAJ01", u32 modes, f64 box, u64 states, then per
// state f64 time and modes^2 (re, im) f64 pairs in FFT order, little endian.
// A JSON sidecar at <path>.json repeats the header fields with the solver
// config and provenance.
void write_trajectory(const fs::path& path, const Trajectory& traj, const std::string& hash);
Trajectory read_trajectory(const fs::path& path);

// Column roles for external plotting tools.
struct PlotSpec {
  std::string title;
  std::string data;
  std::string x;
  std::vector<std::string> y;
  bool logx = false, logy = false;
};
void write_plot_spec(const fs::path& path, const PlotSpec& spec, const std::string& hash);

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RunRecord {
  std::string command;
  std::string config_hash;
  std::string started, finished;  // UTC ISO 8601
  std::vector<std::string> files;  // relative to the output directory
  std::vector<Verdict> verdicts;

  bool pass() const;
  json to_json() const;
};
void write_run_record(const fs::path& dir, const RunRecord& r);
std::string utc_now();

json load_json(const fs::path& path);
// KEY=VALUE with a dotted key path. VALUE is parsed as JSON when possible,
// otherwise kept as a string. Throws ConfigError on malformed input.
void apply_override(json& j, const std::string& assignment);

}  // namespace zklab::io
