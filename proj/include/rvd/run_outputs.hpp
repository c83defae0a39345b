#pragma once

#include <string>

#include "rvd/scenario_config.hpp"
#include "rvd/sim_harness.hpp"

namespace rvd {

inline constexpr const char* kToolVersion = "rvdock 1.0.0";

/// Fixed trajectory CSV header; the column set is a compatibility contract.
inline constexpr const char* kTrajectoryCsvHeader =
    "t,px,py,pz,rx,ry,rz,q1,q2,q3,wx,wy,wz,f1,f2,f3,f4,f5,f6,maxReEig,detX,kappa";

/// Write one run as CSV (17 significant digits, one row per integrator step).
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record);

/// Write the metric summary of one run.
void write_metrics_json(const std::string& path, const RunMetrics& metrics,
                        const TrajectoryRecord& record);

/// Run manifest: resolved-config digest, tool version, seed, outputs, timing.
void write_manifest_json(const std::string& path, const ScenarioConfig& cfg,
                         const std::string& command, const std::vector<std::string>& outputs,
                         double wall_seconds, const std::string& extra_digest = "");

/// Monte Carlo outputs: one metrics row per run plus the ensemble summary.
void write_montecarlo_runs_csv(const std::string& path, const MonteCarloResult& result);
void write_montecarlo_summary_json(const std::string& path, const MonteCarloResult& result);

/// Render the three response plots (position, attitude, forces) from an
/// already-written trajectory CSV. The CSV is the only data source.
void write_svg_plots_from_csv(const std::string& csv_path, const std::string& out_dir);

}  // namespace rvd
