#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rvd/errors.hpp"
#include "rvd/mpc_controller.hpp"
#include "rvd/orbit_model.hpp"
#include "rvd/relative_dynamics.hpp"
#include "rvd/rng.hpp"

namespace rvd {

/// Target attitude truth: initial inertial attitude plus a constant body
/// rate, propagated in closed form.
struct TargetMotion {
  Quaternion q_i_tb0{Quaternion::identity()};
  Vec3 w_tb{Vec3::Zero()};

  TargetAttitudeState at(double t) const;
};

/// Settling bands per state group, used by compute_metrics.
struct SettleBands {
  double position{0.05};  ///< [m]
  double velocity{0.05};  ///< [m/s]
  double attitude{0.01};  ///< reduced-quaternion components
  double rate{0.01};      ///< [rad/s]
};

/// Everything one closed-loop run needs.
struct ScenarioConfig {
  OrbitElements orbit;
  RelativeState initial_state;
  TargetMotion target_motion;
  SpacecraftParams params;  ///< nominal parameters (controller view)
  ControllerConfig controller;
  ModelOptions model;
  double duration{80.0};          ///< [s]
  double integrator_step{0.01};   ///< [s]
  double disturbance_fraction{0.0};  ///< actuation disturbance bound, fraction of |f_a|
  std::uint64_t seed{1};
  SettleBands settle;

  /// Truth-model parameters when they differ from the controller's nominal
  /// view (Monte Carlo perturbations). Empty = truth equals nominal.
  std::optional<SpacecraftParams> truth_params;

  /// Record a random-admissible-selection kappa baseline every N controller
  /// steps (0 = off); used by the disturbance-rejection comparison.
  int kappa_baseline_stride{0};

  void validate() const;
};

/// One integrator-grid row of a trajectory.
struct TrajectorySample {
  double t{0.0};
  Vec12 x{Vec12::Zero()};
  Vec6 f_a{Vec6::Zero()};      ///< commanded thrust held over the interval
  double max_re_eig{0.0};      ///< pointwise max Re eig(A+BK) at the governing sample
  double det_X{0.0};
  double kappa{0.0};
  bool gain_reused{false};
};

/// Full record of one run plus run-level aggregates.
struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  bool failed{false};
  std::string failure_reason;
  double sup_closed_norm{0.0};      ///< sup_t ||A+BK||_2
  double max_re_eig_overall{-std::numeric_limits<double>::infinity()};
  std::vector<double> kappa_robpole;  ///< one entry per synthesized gain
  std::vector<double> kappa_random;   ///< sparse random-selection baseline
};

/// Per-component trajectory quality measures.
struct ComponentMetrics {
  double overshoot_ratio{0.0};  ///< max excursion past zero / |x(0)|
  int zero_crossings{0};
  double settling_time{0.0};  ///< +inf when the component never settles
};

struct RunMetrics {
  std::array<ComponentMetrics, 12> components;
  double max_abs_thrust{0.0};
  Vec6 per_thruster_max{Vec6::Zero()};
  double final_p_norm{0.0};
  double final_q_norm{0.0};
  double final_time{0.0};
};

/// Classical RK4 step on the stacked state; after the update the
/// reduced-quaternion part is pulled back inside the unit ball (tolerance
/// 1e-9, beyond which SingularAttitudeError propagates).
template <typename DerivFn>
Vec12 rk4_step(DerivFn&& f, const Vec12& x, double t, double h);

/// Run the closed loop: controller on the nominal model, truth integration on
/// the (possibly perturbed) truth model, zero-order hold, per-sample actuation
/// disturbance. Errors terminate the run with a partial record and the failed
/// flag set.
TrajectoryRecord run_closed_loop(const ScenarioConfig& cfg);

RunMetrics compute_metrics(const TrajectoryRecord& record, const SettleBands& bands);

/// Monte Carlo perturbation bounds (uniform, symmetric).
struct PerturbationSpec {
  double inertia_entry_bound{0.0};  ///< [kg m^2] on every J_t and J_c entry
  double lever_arm_bound{0.0};      ///< [m] on L1..L3
  double disturbance_fraction{0.0};
};

struct MonteCarloOptions {
  double converge_p_norm{0.1};   ///< [m] terminal position threshold
  double converge_q_norm{0.02};  ///< terminal attitude threshold
  int workers{0};                ///< 0 = hardware concurrency
};

struct MonteCarloRunSummary {
  int index{0};
  std::uint64_t seed{0};
  bool failed{false};
  bool converged{false};
  RunMetrics metrics;
};

struct MonteCarloResult {
  std::vector<MonteCarloRunSummary> runs;
  int converged_count{0};
  std::vector<double> times;  ///< common integrator grid
  /// min / median / max of ||p(t)|| and ||qv(t)|| across the ensemble.
  std::vector<std::array<double, 3>> p_norm_envelope;
  std::vector<std::array<double, 3>> q_norm_envelope;
  std::vector<double> kappa_robpole;  ///< pooled across runs
  std::vector<double> kappa_random;
  double median_kappa_robpole{0.0};
  double median_kappa_random{0.0};
  double wall_seconds{0.0};
};

/// n_runs independent perturbed runs; the controller always uses the nominal
/// parameters. Deterministic for a given seed regardless of worker count.
MonteCarloResult monte_carlo(const ScenarioConfig& cfg, const PerturbationSpec& perturb,
                             int n_runs, std::uint64_t seed, const MonteCarloOptions& options = {});

/// Sample truth parameters for one Monte Carlo run: symmetric uniform inertia
/// perturbations (resampled until positive definite) and lever-arm offsets.
SpacecraftParams perturb_params(const SpacecraftParams& nominal, const PerturbationSpec& spec,
                                CounterRng& rng);

// --- implementation ---

template <typename DerivFn>
Vec12 rk4_step(DerivFn&& f, const Vec12& x, double t, double h) {
  const Vec12 k1 = f(x, t);
  const Vec12 k2 = f(Vec12(x + 0.5 * h * k1), t + 0.5 * h);
  const Vec12 k3 = f(Vec12(x + 0.5 * h * k2), t + 0.5 * h);
  const Vec12 k4 = f(Vec12(x + h * k3), t + h);
  Vec12 out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  const double qn = out.segment<3>(6).norm();
  if (qn >= 1.0) {
    if (qn > 1.0 + 1e-9) {
      throw SingularAttitudeError("integration left the reduced-quaternion ball: |qv| = " +
                                  std::to_string(qn));
    }
    out.segment<3>(6) *= (1.0 - 1e-12) / qn;
  }
  return out;
}

}  // namespace rvd
