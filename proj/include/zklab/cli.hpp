#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zklab/io.hpp"

namespace zklab::cli {

using io::json;

struct Options {
  std::string command;
  io::fs::path config;
  std::optional<std::uint64_t> seed;
  io::fs::path out;
  int threads = 0;  // 0 keeps the runtime default
  std::vector<std::string> overrides;
};

// Config file (or {}), then overrides, then --seed. The result is what gets hashed.
json resolve_config(const Options& opt);

io::RunRecord cmd_solve(const json& cfg, const io::fs::path& out);
io::RunRecord cmd_scan_N(const json& cfg, const io::fs::path& out);
io::RunRecord cmd_verify(const json& cfg, const io::fs::path& out);
io::RunRecord cmd_decomp_stats(const json& cfg, const io::fs::path& out);
io::RunRecord cmd_strichartz(const json& cfg, const io::fs::path& out);
io::RunRecord cmd_transversality(const json& cfg, const io::fs::path& out);

// Dispatch by subcommand name; writes run_record.json into `out`.
io::RunRecord run_command(const std::string& command, const json& cfg, const io::fs::path& out);

std::vector<std::string> subcommands();
std::vector<std::string> verifier_names();

// Full entry point: 0 all verdicts pass, 1 any fail, 2 usage or config error.
int main(int argc, char** argv);

}  // namespace zklab::cli
