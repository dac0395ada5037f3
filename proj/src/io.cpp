#include "zklab/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "zklab/errors.hpp"
#include "zklab/version.hpp"

namespace zklab::io {

static_assert(std::endian::native == std::endian::little, "trajectory format assumes a little-endian host");

std::string canonical(const json& j) { return j.dump(); }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string config_hash(const json& config) { return sha256_hex(canonical(config)); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> r;
  r.reserve(values.size());
  for (double v : values) r.push_back(format_double(v));
  rows.push_back(std::move(r));
}

std::string csv_text(const CsvTable& t, const std::string& hash) {
  std::string s = "# zklab config_hash=" + hash + " code_version=" + kCodeVersion + "\n";
  auto line = [&s](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) {
    if (r.size() != t.columns.size()) throw std::invalid_argument("csv: row width does not match header");
    line(r);
  }
  return s;
}

std::string csv_payload(const std::string& text) {
  if (text.rfind("#", 0) != 0) return text;
  const auto nl = text.find('\n');
  return nl == std::string::npos ? std::string{} : text.substr(nl + 1);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const fs::path& path, std::string* hash) {
  std::istringstream is(read_file(path));
  std::string line;
  CsvTable t;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) {
      const auto p = line.find("config_hash=");
      if (hash && p != std::string::npos) *hash = line.substr(p + 12, line.find(' ', p) - p - 12);
      continue;
    }
    if (!header) {
      t.columns = split_line(line);
      header = true;
    } else {
      t.rows.push_back(split_line(line));
    }
  }
  return t;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_csv(const fs::path& path, const CsvTable& t, const std::string& hash) {
  write_atomic(path, csv_text(t, hash));
}

CsvTable series_table(const FunctionalSeries& s) {
  CsvTable t;
  t.columns = {"t", "mass", "energy", "E0", "Lambda3_sigma3", "E1_tilde"};
  for (std::size_t i = 0; i < s.t.size(); ++i)
    t.add_row({s.t[i], s.mass[i], s.energy[i], s.E0[i], s.Lambda3_sigma3[i], s.E1_tilde[i]});
  return t;
}

CsvTable report_rows_table(const SweepReport& r) {
  CsvTable t;
  t.columns = r.columns;
  for (const auto& row : r.rows) t.add_row(row);
  return t;
}

CsvTable report_cells_table(const SweepReport& r) {
  CsvTable t;
  t.columns = {"label", "observed", "relation", "threshold", "threshold_hi", "samples", "pass"};
  for (const SweepCell& c : r.cells)
    t.rows.push_back({c.label, format_double(c.observed), c.relation, format_double(c.threshold),
                      format_double(c.threshold_hi), std::to_string(c.samples), c.pass ? "1" : "0"});
  return t;
}

json report_json(const SweepReport& r) {
  json cells = json::array();
  for (const SweepCell& c : r.cells) {
    json cj = {{"label", c.label},       {"observed", format_double(c.observed)},
               {"relation", c.relation}, {"threshold", format_double(c.threshold)},
               {"samples", c.samples},   {"pass", c.pass}};
    if (c.relation == "in") cj["threshold_hi"] = format_double(c.threshold_hi);
    cells.push_back(cj);
  }
  return {{"name", r.name}, {"grid", r.grid}, {"seed", r.seed},
          {"pass", r.pass()}, {"cells", cells}, {"notes", r.notes}};
}

namespace {

template <class T>
void put(std::string& s, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  s.append(b, sizeof(T));
}

template <class T>
T get(const std::string& s, std::size_t& pos) {
  if (pos + sizeof(T) > s.size()) throw std::runtime_error("trajectory file truncated");
  T v;
  std::memcpy(&v, s.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

constexpr char kMagic[9] = "ZKTRAJ01";

}  // namespace

void write_trajectory(const fs::path& path, const Trajectory& traj, const std::string& hash) {
  if (traj.states.empty()) throw std::invalid_argument("write_trajectory: empty trajectory");
  const FrequencyLattice& lat = traj.states.front().lattice();
  std::string s(kMagic, 8);
  put<std::uint32_t>(s, static_cast<std::uint32_t>(lat.modes()));
  put<double>(s, lat.box_length());
  put<std::uint64_t>(s, traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    put<double>(s, traj.times[i]);
    for (const cplx& c : traj.states[i].coeffs()) {
      put<double>(s, c.real());
      put<double>(s, c.imag());
    }
  }
  write_atomic(path, s);
  const SolverConfig& c = traj.config;
  json side = {{"format", "ZKTRAJ01"},
               {"modes", lat.modes()},
               {"box", lat.box_length()},
               {"states", traj.states.size()},
               {"t_first", format_double(traj.times.front())},
               {"t_last", format_double(traj.times.back())},
               {"solver",
                {{"dt", format_double(c.dt)},
                 {"scheme", scheme_name(c.scheme)},
                 {"dealias", c.dealias},
                 {"record_every", c.record_every},
                 {"nonlinear", c.nonlinear}}},
               {"config_hash", hash},
               {"code_version", kCodeVersion}};
  fs::path sidecar = path;
  sidecar += ".json";
  write_atomic(sidecar, side.dump(2) + "\n");
}

Trajectory read_trajectory(const fs::path& path) {
  const std::string s = read_file(path);
  if (s.size() < 8 || s.compare(0, 8, kMagic) != 0) throw std::runtime_error("not a ZKTRAJ01 file: " + path.string());
  std::size_t pos = 8;
  const auto n = static_cast<int>(get<std::uint32_t>(s, pos));
  const double box = get<double>(s, pos);
  const auto count = get<std::uint64_t>(s, pos);
  const FrequencyLattice lat(box, n);
  Trajectory traj;
  for (std::uint64_t i = 0; i < count; ++i) {
    traj.times.push_back(get<double>(s, pos));
    SpectralField u(lat);
    for (cplx& c : u.coeffs()) {
      const double re = get<double>(s, pos);
      c = cplx{re, get<double>(s, pos)};
    }
    traj.states.push_back(std::move(u));
  }
  if (pos != s.size()) throw std::runtime_error("trailing bytes in " + path.string());
  fs::path sidecar = path;
  sidecar += ".json";
  if (fs::exists(sidecar)) {
    const json side = load_json(sidecar);
    const json& sv = side.at("solver");
    traj.config.dt = std::stod(sv.at("dt").get<std::string>());
    traj.config.scheme = scheme_from_name(sv.at("scheme").get<std::string>());
    traj.config.dealias = sv.at("dealias").get<bool>();
    traj.config.record_every = sv.at("record_every").get<int>();
    traj.config.nonlinear = sv.at("nonlinear").get<bool>();
  }
  return traj;
}

void write_plot_spec(const fs::path& path, const PlotSpec& spec, const std::string& hash) {
  const json j = {{"title", spec.title}, {"data", spec.data},   {"x", spec.x},
                  {"y", spec.y},         {"logx", spec.logx},   {"logy", spec.logy},
                  {"config_hash", hash}, {"code_version", kCodeVersion}};
  write_atomic(path, j.dump(2) + "\n");
}

bool RunRecord::pass() const {
  for (const Verdict& v : verdicts)
    if (!v.pass) return false;
  return true;
}

json RunRecord::to_json() const {
  json vs = json::array();
  for (const Verdict& v : verdicts) vs.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return {{"command", command},  {"config_hash", config_hash}, {"code_version", kCodeVersion},
          {"started", started},  {"finished", finished},       {"files", files},
          {"verdicts", vs},      {"pass", pass()}};
}

void write_run_record(const fs::path& dir, const RunRecord& r) {
  write_atomic(dir / "run_record.json", r.to_json().dump(2) + "\n");
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json load_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must be KEY=VALUE: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &j;
  std::istringstream is(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(is, part, '.')) {
    if (part.empty()) throw ConfigError("empty path component in '" + key + "'");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("'" + key + "' descends into a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError("'" + key + "' descends into a non-object");
  (*node)[parts.back()] = value;
}

}  // namespace zklab::io
