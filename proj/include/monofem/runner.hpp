#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "monofem/io.hpp"

namespace monofem {

// Configuration problems map to exit code 2, solver failures to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  io::json raw;
  std::filesystem::path config_dir;  // base for relative paths in the config
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  int jobs = 1;
};

RunConfig load_config(const std::filesystem::path& path);

// Executes one pipeline stage; writes its artifacts plus a manifest under
// output_dir. Known names: mesh, phantom, forward, ndmap, test, reconstruct,
// locpot, verify. Returns the process exit status.
int run_subcommand(const std::string& name, RunConfig& config);

}  // namespace monofem
