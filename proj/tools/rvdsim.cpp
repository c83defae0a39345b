// rvdsim: batch front end for the rendezvous/docking simulation stack.
//
//   rvdsim run        --config scenario.cfg --out results/
//   rvdsim montecarlo --config scenario.cfg --perturb bounds.cfg --runs 100 \
//                     --seed 7 --out results/
//   rvdsim verify     --level full

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include <rvd/cli.hpp>
#include <rvd/run_outputs.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Spacecraft rendezvous and soft-docking simulation"};
  app.set_version_flag("--version", std::string(rvd::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, perturb_path, out_dir;
  std::string level = "quick";
  int n_runs = 100;
  rvd::CliOverrides overrides;
  std::uint64_t seed_value = 0;

  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed_value, "override sim.seed");
    cmd->add_option("--sample-period", overrides.sample_period,
                    "override controller sample period [s]");
    cmd->add_option("--step", overrides.integrator_step, "override integrator step [s]");
    cmd->add_flag("--verbatim-stiffness", overrides.verbatim_stiffness,
                  "use the printed stiffness diagonal (gamma_dot, unsquared)");
  };

  CLI::App* run = app.add_subcommand("run", "simulate one closed-loop scenario");
  add_shared(run);
  run->add_flag("--plots", overrides.plots, "emit position/attitude/forces SVG plots");

  CLI::App* mc = app.add_subcommand("montecarlo", "perturbed ensemble study");
  add_shared(mc);
  mc->add_option("--perturb", perturb_path, "perturbation bounds file")
      ->required()
      ->check(CLI::ExistingFile);
  mc->add_option("--runs", n_runs, "number of runs")->check(CLI::PositiveNumber);
  mc->add_option("--workers", overrides.workers, "parallel workers (0 = auto)");

  CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? rvd::kExitOk : rvd::kExitConfigError;
  }

  for (CLI::App* cmd : {run, mc}) {
    if (cmd->parsed() && cmd->count("--seed") > 0) {
      overrides.seed = seed_value;
    }
  }

  if (run->parsed()) {
    return rvd::cmd_run(config_path, out_dir, overrides);
  }
  if (mc->parsed()) {
    return rvd::cmd_montecarlo(config_path, perturb_path, n_runs, out_dir, overrides);
  }
  return rvd::cmd_verify(level == "full" ? rvd::VerifyLevel::kFull
                                         : rvd::VerifyLevel::kQuick);
}
