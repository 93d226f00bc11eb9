#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "meshless/schemes.hpp"

namespace meshless::cli {

/// Fully resolved run description (defaults < config file < MESHLESS_SEED <
/// command-line flags).
struct RunSpec {
  std::string command;
  int dim = 1;
  std::string init;
  std::vector<std::string> schemes;  // combination strings, see Combo::parse
  std::size_t n = 100;
  std::vector<std::size_t> n_values;
  std::vector<double> randomness{0.5};  // fraction of the lattice spacing
  double cfl = 0.05;
  double t_end = 1.0;
  std::string tableau = "ssprk3";
  bool mood = false;
  std::size_t seeds = 1;
  std::size_t grids = 100;
  std::uint64_t seed = 0;
  ModelParams params;
  std::filesystem::path out_dir = "out";
  std::size_t jobs = 1;
  std::string config_file;
};

/// Thrown for invalid command lines or configuration files. `exit_code` is 0
/// for --help output.
class UsageError : public std::exception {
 public:
  UsageError(std::string message, int exit_code)
      : message_(std::move(message)), exit_code_(exit_code) {}
  const char* what() const noexcept override { return message_.c_str(); }
  int exit_code() const { return exit_code_; }

 private:
  std::string message_;
  int exit_code_;
};

std::vector<std::string> commands();

/// `env_seed` stands in for the MESHLESS_SEED environment variable.
RunSpec parse_args(int argc, const char* const* argv,
                   std::optional<std::string> env_seed = std::nullopt);

/// Key-value dump of a spec, as written to manifest.txt.
std::string describe(const RunSpec& spec);

struct Artifact {
  std::string filename;
  std::string content;
};

/// Runs the requested study; returns the CSV tables and plot scripts.
std::vector<Artifact> run_command(const RunSpec& spec, std::ostream& log);

/// Writes artifacts plus manifest.txt into spec.out_dir.
void emit_outputs(const std::vector<Artifact>& artifacts, const RunSpec& spec);

}  // namespace meshless::cli
