#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boundstate/potential.hpp"

namespace boundstate::harness {

enum class Mode { Schrodinger, Dirac };
enum class GuessKind { Standard, Swapped, Random, Gaussian };

/// Error in a config file, formatted as "<file>:<line>: <message>".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::string name;
  Mode mode = Mode::Schrodinger;
  std::vector<Nucleus> nuclei;
  double box = 40.0;
  std::size_t n = 160;
  double epsilon_kernel = 1e-6;
  /// mu_0 for Schrodinger runs; E_0 - m c^2 for Dirac runs.
  std::optional<double> parameter0;
  bool fix_parameter = true;
  bool newton = false;
  int max_iters = 100;
  double tol = 1e-8;
  /// Empty means "auto": the smallest shift that makes V negative.
  std::optional<double> shift_tau = 0.0;
  GuessKind guess = GuessKind::Standard;
  std::uint64_t seed = 0;
  double gaussian_exponent = 1e8;
  /// Spinor or scalar BSFLD1 dump used for the projection column.
  std::optional<std::filesystem::path> reference;
  std::filesystem::path csv;
  std::filesystem::path summary;
  std::optional<std::filesystem::path> dump;
};

/// Parses flat `key = value` text with `#` comments.
RunConfig parse_config(std::istream& in, const std::string& source_name);
RunConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  bool paper_box = false;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

enum ExitStatus : int { kConverged = 0, kError = 1, kMaxIters = 2 };

struct RunReport {
  std::string name;
  int exit_status = kError;
  std::string message;
  int iterations = 0;
  double lambda = 0.0;
  double lambda_im = 0.0;
  /// Shifted energy: E - m c^2 for Dirac runs.
  double energy = 0.0;
  /// mu or kappa at the end of the run.
  double parameter = 0.0;
  double residual = 0.0;
  int newton_steps = 0;
  double wall_seconds = 0.0;
  Mode mode = Mode::Schrodinger;
};

/// Runs one config; output paths are resolved against out_dir.
RunReport run(const RunConfig& config, const std::filesystem::path& out_dir);

struct SuiteReport {
  std::vector<RunReport> runs;
  /// Largest pairwise relative spread of final Dirac energies; 0 with fewer than two.
  double dirac_energy_spread = 0.0;
  int exit_status = kConverged;
};

/// Runs every config concurrently. Config errors become failed runs.
SuiteReport run_suite(const std::vector<std::filesystem::path>& configs, const std::filesystem::path& out_dir,
                      const Overrides& overrides, unsigned max_parallel = 0);

/// Sorted *.cfg files in a directory.
std::vector<std::filesystem::path> suite_configs(const std::filesystem::path& dir);

void write_suite_summary(std::ostream& os, const SuiteReport& report);

/// Writes text to path through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Quick property checks; prints one line per check and returns true when all pass.
bool verify_properties(std::ostream& os);

}  // namespace boundstate::harness
