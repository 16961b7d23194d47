#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <stochmech/stochmech.hpp>

namespace stochmech::runner {

/// Parsed experiment configuration. The file format is one `key = value` per
/// line with dotted keys, `#` comments and comma-separated lists.
struct ExperimentConfig {
  std::string experiment;
  GridSpec grid;
  GaussianPacketSpec packet;
  SimulationParams mc;
  std::vector<PerturbationSpec> perturbations;
  std::filesystem::path output_dir = "out";
  std::size_t max_parallelism = 0;  ///< 0 leaves the thread count alone

  std::vector<std::size_t> convergence_n{64, 128, 256, 512};
  std::size_t convergence_check_from = 256;
  std::size_t mixture_n = 64;
  double mixture_drift = 3.0;
  std::vector<double> marginal_times{0.0, 0.25, 0.5, 0.75, 1.0};
  double marginal_l1_max = 0.03;
  std::size_t bb_pairs = 10;
  std::string theorem_base = "schrodinger";  ///< or "mismatched"

  /// FNV-1a of the canonical (sorted, normalized) key/value list.
  std::uint64_t hash = 0;
};

const std::vector<std::string_view>& experiment_names();

/// Throws Error(ConfigError) naming the offending key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Invariant checks only, no computation.
void validate(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<CheckResult> checks;
  std::filesystem::path output_dir;
  bool passed() const;
};

/// Runs the configured experiment and writes summary.json, manifest.json and
/// CSV dumps into output_dir (OUTPUT_DIR in the environment overrides it).
RunResult run_experiment(const ExperimentConfig& config);

/// Exit codes: 0 all checks pass, 2 a check failed, 1 error.
int run_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int validate_command(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

}  // namespace stochmech::runner
