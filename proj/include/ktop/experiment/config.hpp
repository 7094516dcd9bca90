#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ktop::experiment {

/// Malformed or out-of-range configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Centres (theta1, phi1, theta2, phi2) of the two coherent states, radians.
struct InitialCondition {
  double theta1 = 0.89;
  double phi1 = 0.63;
  double theta2 = 0.89;
  double phi2 = 0.63;
};

/// Every experiment parameter. Defaults reproduce the j = 80, k = 7 setup
/// with the (0.89, 0.63, 0.89, 0.63) product coherent state.
struct ExperimentConfig {
  double j = 80.0;
  double k1 = 7.0;
  double k2 = 7.0;
  std::vector<double> epsilons{1e-4};
  InitialCondition initial;

  int steps = 200;
  std::optional<int> t_start;
  std::optional<int> t_end;

  int husimi_theta = 181;
  int husimi_phi = 361;
  int t_snapshot = 15;

  int window = 100;
  std::vector<int> t_refs{40, 50, 60, 70};

  std::vector<double> k_grid;  // 3, 3.5, ..., 10
  std::vector<InitialCondition> initial_conditions;  // empty: pick from the chaotic sea
  int num_initial = 4;
  int ic_candidates = 64;
  double chaotic_threshold = 0.1;
  int lyapunov_steps = 1000;

  int samples = 32;
  std::uint64_t seed = 1;

  std::filesystem::path out_dir = ".";
  int workers = 1;

  ExperimentConfig();
};

/// Applies one `key=value` setting. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Applies a `key=value` line as given to --set.
void apply_assignment(ExperimentConfig& config, std::string_view assignment);

/// Parses a config file body: one key=value per line, '#' starts a comment.
void apply_config_text(ExperimentConfig& config, std::string_view text);

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Checks every physics field against the library preconditions.
void validate(const ExperimentConfig& config);

/// Canonical key=value echo, in a fixed order, for manifests.
std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& config);

}  // namespace ktop::experiment
