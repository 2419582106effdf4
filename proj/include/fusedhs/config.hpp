#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fusedhs/models.hpp"

namespace fusedhs {

inline constexpr const char* kVersion = "1.0.0";

/// Environment variable consulted for the seed when neither the command
/// line nor a config file sets one.
inline constexpr const char* kSeedEnvVar = "FUSEDHS_SEED";

/// Everything one CLI invocation needs.
struct RunConfig {
  std::string command;
  ModelKind model = ModelKind::FusedHorseshoe;
  SamplerConfig sampler;
  std::vector<double> grid;  // bhh tuning grid; empty selects the default
  double level = 0.95;
  bool waic = false;
  bool write_draws = false;
  std::filesystem::path input;
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;

  // simulate
  int case_id = 1;
  double sigma = 0.5;
  int beta_variant = 1;
  std::size_t n = 50;
  std::size_t p = 50;
  std::size_t reps = 20;
  std::vector<ModelKind> methods{ModelKind::BayesianFusedLasso, ModelKind::FusedHorseshoe};

  /// Throws ConfigError when required fields for `command` are missing.
  void validate() const;
};

/// Parses a tuning grid. Accepted forms:
///   "lo:hi:Klog"  K log-spaced values
///   "lo:hi:Klin"  K evenly spaced values
///   "a,b,c"       explicit list
std::vector<double> parse_grid(const std::string& text);

std::vector<ModelKind> parse_methods(const std::string& text);

/// Reads flat `key=value` lines. Blank lines and lines starting with '#'
/// are skipped; keys are the long CLI flag names without dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

/// Plain-text record of a run: version, command, every resolved setting,
/// and wall time.
std::string render_manifest(const RunConfig& cfg, double wall_seconds,
                            const std::vector<std::string>& outputs);

}  // namespace fusedhs
