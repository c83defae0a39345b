#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rvd/verify.hpp"

namespace rvd {

/// Documented process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitSimulationFailure = 2,
  kExitVerificationFailure = 3,
};

/// Command-line overrides applied on top of the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> sample_period;
  std::optional<double> integrator_step;
  bool verbatim_stiffness{false};
  bool plots{false};
  int workers{0};
};

/// Run one scenario; writes trajectory.csv, metrics.json, manifest.json
/// (and the SVG plots when requested) into out_dir.
int cmd_run(const std::string& config_path, const std::string& out_dir,
            const CliOverrides& overrides);

/// Monte Carlo ensemble; writes montecarlo_runs.csv, montecarlo_summary.json,
/// manifest.json. The ensemble seed is explicit (flag or sim.seed).
int cmd_montecarlo(const std::string& config_path, const std::string& perturb_path, int n_runs,
                   const std::string& out_dir, const CliOverrides& overrides);

/// Invariant suites with a pass/fail table; exit 0 iff everything passes.
int cmd_verify(VerifyLevel level);

}  // namespace rvd
