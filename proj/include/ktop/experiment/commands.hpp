#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ktop/classical.hpp"
#include "ktop/correlation.hpp"
#include "ktop/experiment/config.hpp"
#include "ktop/experiment/output.hpp"

namespace ktop::experiment {

/// Exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInvariantViolation = 3;

/// Runs fn(0..count-1) on up to `workers` threads; results keep index order.
/// The first exception (by index) is rethrown after all workers finish.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int workers, const std::function<T(std::size_t)>& fn);

struct RateScanRow {
  double k = 0.0;
  int init_id = 0;
  double gamma_raw = 0.0;
  double gamma_scaled = 0.0;
  double quality = 0.0;
  double lambda_classical = 0.0;
  int t_start = 0;
  int t_end = 0;
};

/// Initial conditions for a rate scan: the explicit list, or the first
/// `num_initial` golden-spiral points in the chaotic sea of every k in the
/// grid (classical lambda > chaotic_threshold).
std::vector<InitialCondition> rate_scan_initial_conditions(const ExperimentConfig& config);

/// Gamma for every (k, initial condition): evolve at epsilons[0] for `steps`
/// periods with k1 = k2 = k and fit the stationary window. Rows whose window
/// cannot be found carry NaN rates.
std::vector<RateScanRow> rate_scan(const ExperimentConfig& config,
                                   const std::vector<InitialCondition>& initial_conditions);

CommandOutput cmd_evolve(const ExperimentConfig& config);
CommandOutput cmd_correlate(const ExperimentConfig& config);
CommandOutput cmd_husimi(const ExperimentConfig& config);
CommandOutput cmd_rate_scan(const ExperimentConfig& config);
CommandOutput cmd_pt_compare(const ExperimentConfig& config);
CommandOutput cmd_classical_scan(const ExperimentConfig& config);

const std::vector<std::string>& command_names();

/// Validates, runs the named command, and writes its files and manifest.
/// Returns one of the exit codes above; diagnostics go to stderr.
int run_command(std::string_view name, const ExperimentConfig& config);

}  // namespace ktop::experiment

#include "ktop/experiment/parallel_impl.hpp"
