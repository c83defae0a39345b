#include "rvd/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "rvd/errors.hpp"
#include "rvd/run_outputs.hpp"
#include "rvd/scenario_config.hpp"
#include "rvd/sim_harness.hpp"

namespace rvd {

namespace {

namespace fs = std::filesystem;

void apply_overrides(ScenarioConfig& cfg, const CliOverrides& o) {
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (o.sample_period) {
    cfg.controller.sample_period = *o.sample_period;
  }
  if (o.integrator_step) {
    cfg.integrator_step = *o.integrator_step;
  }
  if (o.verbatim_stiffness) {
    cfg.model.paper_verbatim_stiffness = true;
  }
  cfg.validate();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  }
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const CliOverrides& overrides) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(config_path);
    apply_overrides(cfg, overrides);
    ensure_dir(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const TrajectoryRecord rec = run_closed_loop(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    std::vector<std::string> outputs = {"trajectory.csv", "metrics.json", "manifest.json"};
    write_trajectory_csv(out_dir + "/trajectory.csv", rec);
    if (!rec.samples.empty()) {
      write_metrics_json(out_dir + "/metrics.json", compute_metrics(rec, cfg.settle), rec);
    }
    if (overrides.plots && !rec.failed) {
      write_svg_plots_from_csv(out_dir + "/trajectory.csv", out_dir);
      outputs.insert(outputs.end(), {"position.svg", "attitude.svg", "forces.svg"});
    }
    write_manifest_json(out_dir + "/manifest.json", cfg, "run", outputs, wall);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitSimulationFailure;
  }

  if (rec.failed) {
    std::cerr << "simulation failed: " << rec.failure_reason
              << " (partial outputs retained in " << out_dir << ")\n";
    return kExitSimulationFailure;
  }
  std::cout << "run complete: " << rec.samples.size() << " samples, wall " << wall
            << " s, outputs in " << out_dir << "\n";
  return kExitOk;
}

int cmd_montecarlo(const std::string& config_path, const std::string& perturb_path, int n_runs,
                   const std::string& out_dir, const CliOverrides& overrides) {
  ScenarioConfig cfg;
  MonteCarloConfig mc_cfg;
  try {
    if (n_runs < 1) {
      throw ConfigError("--runs must be at least 1");
    }
    cfg = load_scenario(config_path);
    apply_overrides(cfg, overrides);
    mc_cfg = load_perturbation(perturb_path);
    mc_cfg.options.workers = overrides.workers;
    ensure_dir(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const MonteCarloResult result =
      monte_carlo(cfg, mc_cfg.spec, n_runs, cfg.seed, mc_cfg.options);

  try {
    write_montecarlo_runs_csv(out_dir + "/montecarlo_runs.csv", result);
    write_montecarlo_summary_json(out_dir + "/montecarlo_summary.json", result);
    char extra[256];
    std::snprintf(extra, sizeof(extra),
                  "montecarlo runs=%d inertia=%.17g lever=%.17g disturbance=%.17g\n", n_runs,
                  mc_cfg.spec.inertia_entry_bound, mc_cfg.spec.lever_arm_bound,
                  mc_cfg.spec.disturbance_fraction);
    write_manifest_json(out_dir + "/manifest.json", cfg, "montecarlo",
                        {"montecarlo_runs.csv", "montecarlo_summary.json", "manifest.json"},
                        result.wall_seconds, extra);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitSimulationFailure;
  }

  const long failed =
      std::count_if(result.runs.begin(), result.runs.end(), [](const auto& r) {
        return r.failed;
      });
  std::cout << "montecarlo complete: " << result.converged_count << "/" << n_runs
            << " converged, " << failed << " failed, wall " << result.wall_seconds
            << " s, outputs in " << out_dir << "\n";
  if (failed == n_runs) {
    std::cerr << "all runs failed\n";
    return kExitSimulationFailure;
  }
  return kExitOk;
}

int cmd_verify(VerifyLevel level) {
  const auto checks = run_verification(level);
  std::size_t passed = 0;
  for (const auto& c : checks) {
    std::printf("[%s] %s/%s: %s\n", c.pass ? "PASS" : "FAIL", c.group.c_str(), c.name.c_str(),
                c.detail.c_str());
    passed += c.pass ? 1 : 0;
  }
  std::printf("%zu/%zu invariant groups passed\n", passed, checks.size());
  return passed == checks.size() ? kExitOk : kExitVerificationFailure;
}

}  // namespace rvd
