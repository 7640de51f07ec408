#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ergocli {

/// Bad flags, unknown keys, type mismatches, precondition violations.
/// Reported with the offending key and a nonzero exit status.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved run description. Flags override config-file values, which
/// override per-command defaults; the resolved form is echoed to
/// <outdir>/resolved_config before execution and reproduces the run when
/// fed back via --config.
struct ExperimentConfig {
  std::string command;
  std::string preset = "example1";

  // scheme parameters
  std::vector<double> thetas;
  double lambda = 0.0;  // resolved; defaults to 2*theta-1 (0 at theta=1/2)
  bool lambda_given = false;
  double tau = 0.1;
  int n_modes = 10;
  double epsilon = 0.5;
  double eps_margin = 1.0;
  double K2 = -1.0;
  double q_exponent = 2.0;

  // run parameters
  long n = 0;
  long paths = 0;
  long mc_paths = 0;
  std::uint64_t seed = 0;
  long burn_in = 0;
  double box_lo = -10.0, box_hi = 10.0;
  double probe_lo = -1.0, probe_hi = 1.0;
  int grid = 201;
  long samples = 10000;
  double tolerance = 1e-10;
  double rho = 0.2, beta = 0.1;
  std::vector<double> x0;
  std::string density_mode = "terminal";
  bool unsafe = false;

  // acceptance thresholds for summary verdicts
  double ks_same_theta_max = 0.05;
  double ks_cross_theta_max = 0.10;
  double rel_agreement_max = 0.02;

  // optional preset constant overrides (NaN = keep preset value)
  double L1_override, L2_override, L3_override;

  std::string outdir = "out";
  int threads = 0;  // 0 = hardware concurrency

  /// The resolved key/value view written to resolved_config.
  nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& known_commands();

/// Parses argv-style arguments (without the program name), merging
/// defaults <- config file <- flags. Throws UsageError on unknown keys,
/// type mismatches, or precondition violations.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Executes the command, writing CSVs, resolved_config, and summary.csv
/// into outdir. Returns 0 iff every summary verdict passed.
int run(const ExperimentConfig& config);

}  // namespace ergocli
