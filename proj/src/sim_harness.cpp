#include "rvd/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>

#include "rvd/errors.hpp"
#include "rvd/robpole.hpp"
#include "rvd/thruster_allocation.hpp"

namespace rvd {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TargetAttitudeState TargetMotion::at(double t) const {
  TargetAttitudeState s;
  s.w_tb = w_tb;
  const double wn = w_tb.norm();
  if (wn * std::abs(t) < 1e-300) {
    s.q_i_tb = q_i_tb0;
    return s;
  }
  const double half = 0.5 * wn * t;
  const Quaternion spin(std::cos(half), Vec3(std::sin(half) * (w_tb / wn)));
  s.q_i_tb = quat_multiply(q_i_tb0, spin).normalized();
  return s;
}

void ScenarioConfig::validate() const {
  orbit.validate();
  params.validate();
  controller.validate();
  if (truth_params) {
    truth_params->validate();
  }
  if (!(duration > 0.0)) {
    throw ConfigError("sim.duration must be positive");
  }
  if (!(integrator_step > 0.0)) {
    throw ConfigError("sim.integrator_step must be positive");
  }
  if (integrator_step > controller.sample_period + 1e-12) {
    throw ConfigError("sim.integrator_step must not exceed the controller sample period");
  }
  const double sub = controller.sample_period / integrator_step;
  if (std::abs(sub - std::round(sub)) > 1e-9) {
    throw ConfigError("controller sample period must be an integer multiple of the step");
  }
  const double nctrl = duration / controller.sample_period;
  if (std::abs(nctrl - std::round(nctrl)) > 1e-9) {
    throw ConfigError("sim.duration must be an integer multiple of the sample period");
  }
  if (!(disturbance_fraction >= 0.0)) {
    throw ConfigError("sim.disturbance_fraction must be non-negative");
  }
  if (initial_state.qv.qv.norm() >= 1.0) {
    throw ConfigError("initial attitude lies outside the reduced-quaternion ball");
  }
}

TrajectoryRecord run_closed_loop(const ScenarioConfig& cfg) {
  cfg.validate();

  TrajectoryRecord rec;
  try {
    const AllocationConfig alloc_nominal =
        build_allocation(cfg.params.L1, cfg.params.L2, cfg.params.L3);
    const PlantModel nominal_model(cfg.params, alloc_nominal, cfg.orbit.mu, cfg.model);

    const SpacecraftParams truth_p = cfg.truth_params.value_or(cfg.params);
    const AllocationConfig alloc_truth = build_allocation(truth_p.L1, truth_p.L2, truth_p.L3);
    const PlantModel truth_model(truth_p, alloc_truth, cfg.orbit.mu, cfg.model);

    MpcController controller(nominal_model, cfg.controller);
    CounterRng rng(cfg.seed);
    const InputDecomposition b_qr =
        cfg.kappa_baseline_stride > 0 ? decompose_input_matrix(nominal_model.input_matrix())
                                      : InputDecomposition{};

    const int substeps =
        static_cast<int>(std::round(cfg.controller.sample_period / cfg.integrator_step));
    const int n_ctrl = static_cast<int>(std::round(cfg.duration / cfg.controller.sample_period));
    const double h = cfg.integrator_step;
    const double mu_margin = -*std::max_element(cfg.controller.poles.lambdas.begin(),
                                                cfg.controller.poles.lambdas.end());

    rec.samples.reserve(static_cast<std::size_t>(n_ctrl) * substeps + 1);

    RelativeState state = cfg.initial_state;
    Vec3 prev_p = state.p;

    for (int k = 0; k < n_ctrl; ++k) {
      const double t_k = k * cfg.controller.sample_period;

      OrbitState orbit = propagate_target(cfg.orbit, t_k);
      orbit.r_c = chaser_radius(orbit.r_t, state.p);
      const TargetAttitudeState target = cfg.target_motion.at(t_k);

      RelativeState measured = state;
      if (cfg.model.finite_difference_velocity && k > 0) {
        measured.r = (state.p - prev_p) / cfg.controller.sample_period;
      }
      prev_p = state.p;

      const ControlCommand cmd = controller.step(measured, orbit, target);

      StabilityReport stab;
      if (!cfg.controller.feedforward_only) {
        stab = pointwise_stability_check(controller.closed_loop(), mu_margin);
        rec.sup_closed_norm = std::max(rec.sup_closed_norm, stab.norm);
        rec.max_re_eig_overall = std::max(rec.max_re_eig_overall, stab.max_real_eig);
        if (!cmd.gain_reused) {
          rec.kappa_robpole.push_back(cmd.gain.kappa);
        }
        if (cfg.kappa_baseline_stride > 0 && k % cfg.kappa_baseline_stride == 0) {
          const PlantMatrices pm = nominal_model.assemble(measured, orbit, target);
          const Eigen::MatrixXd Xr =
              random_admissible_selection(pm.A, b_qr, cfg.controller.poles, rng);
          rec.kappa_random.push_back(condition_number(Xr));
        }
      }

      Vec6 f_applied = cmd.f_a;
      if (cfg.disturbance_fraction > 0.0) {
        const Eigen::VectorXd dir = rng.unit_vector(6);
        const double mag = rng.uniform(0.0, cfg.disturbance_fraction * cmd.f_a.norm());
        f_applied += mag * Vec6(dir);
      }

      auto push_sample = [&](double t, const RelativeState& s) {
        TrajectorySample row;
        row.t = t;
        row.x = s.to_vector();
        row.f_a = cmd.f_a;
        row.max_re_eig = stab.max_real_eig;
        row.det_X = cmd.gain.det_X;
        row.kappa = cmd.gain.kappa;
        row.gain_reused = cmd.gain_reused;
        rec.samples.push_back(row);
      };

      if (k == 0) {
        push_sample(0.0, state);
      }

      auto deriv = [&](const Vec12& xv, double tau) -> Vec12 {
        const RelativeState st = RelativeState::from_vector(xv);
        OrbitState ob = propagate_target(cfg.orbit, tau);
        ob.r_c = chaser_radius(ob.r_t, st.p);
        return truth_model.truth_derivative(st, f_applied, Vec3::Zero(), Vec3::Zero(), ob,
                                            cfg.target_motion.at(tau));
      };

      for (int s = 0; s < substeps; ++s) {
        const double t_s = t_k + s * h;
        const Vec12 next = rk4_step(deriv, state.to_vector(), t_s, h);
        state = RelativeState::from_vector(next);
        push_sample(t_s + h, state);
      }
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure_reason = e.what();
  }
  return rec;
}

RunMetrics compute_metrics(const TrajectoryRecord& record, const SettleBands& bands) {
  if (record.samples.empty()) {
    throw ConfigError("cannot compute metrics of an empty record");
  }
  RunMetrics m;
  const auto& samples = record.samples;
  const std::size_t n = samples.size();

  std::array<double, 12> band{};
  for (int i = 0; i < 3; ++i) band[static_cast<std::size_t>(i)] = bands.position;
  for (int i = 3; i < 6; ++i) band[static_cast<std::size_t>(i)] = bands.velocity;
  for (int i = 6; i < 9; ++i) band[static_cast<std::size_t>(i)] = bands.attitude;
  for (int i = 9; i < 12; ++i) band[static_cast<std::size_t>(i)] = bands.rate;

  for (int c = 0; c < 12; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    const double x0 = samples[0].x(c);
    const double s0 = (x0 > 0.0) ? 1.0 : (x0 < 0.0 ? -1.0 : 0.0);
    const double deadband = std::max(1e-12, 1e-6 * std::abs(x0));

    double worst_excursion = 0.0;
    int crossings = 0;
    int last_sign = 0;
    std::size_t last_violation = 0;
    bool violated = false;

    for (std::size_t i = 0; i < n; ++i) {
      const double x = samples[i].x(c);
      if (s0 != 0.0) {
        worst_excursion = std::max(worst_excursion, -s0 * x);
      }
      if (std::abs(x) > deadband) {
        const int sg = x > 0.0 ? 1 : -1;
        if (last_sign != 0 && sg != last_sign) {
          ++crossings;
        }
        last_sign = sg;
      }
      if (std::abs(x) > band[ci]) {
        last_violation = i;
        violated = true;
      }
    }

    ComponentMetrics cm;
    cm.overshoot_ratio = (s0 == 0.0) ? 0.0 : std::max(0.0, worst_excursion) / std::abs(x0);
    cm.zero_crossings = crossings;
    if (!violated) {
      cm.settling_time = samples[0].t;
    } else if (last_violation + 1 < n) {
      cm.settling_time = samples[last_violation + 1].t;
    } else {
      cm.settling_time = std::numeric_limits<double>::infinity();
    }
    m.components[ci] = cm;
  }

  for (const auto& s : samples) {
    for (int j = 0; j < 6; ++j) {
      m.per_thruster_max(j) = std::max(m.per_thruster_max(j), std::abs(s.f_a(j)));
    }
  }
  m.max_abs_thrust = m.per_thruster_max.maxCoeff();
  m.final_p_norm = samples.back().x.segment<3>(0).norm();
  m.final_q_norm = samples.back().x.segment<3>(6).norm();
  m.final_time = samples.back().t;
  return m;
}

SpacecraftParams perturb_params(const SpacecraftParams& nominal, const PerturbationSpec& spec,
                                CounterRng& rng) {
  SpacecraftParams p = nominal;

  auto perturb_inertia = [&](const Mat3& J) -> Mat3 {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Mat3 d;
      // Upper triangle including the diagonal, mirrored to stay symmetric.
      const double b = spec.inertia_entry_bound;
      d(0, 0) = rng.uniform(-b, b);
      d(0, 1) = rng.uniform(-b, b);
      d(0, 2) = rng.uniform(-b, b);
      d(1, 1) = rng.uniform(-b, b);
      d(1, 2) = rng.uniform(-b, b);
      d(2, 2) = rng.uniform(-b, b);
      d(1, 0) = d(0, 1);
      d(2, 0) = d(0, 2);
      d(2, 1) = d(1, 2);
      const Mat3 J_pert = J + d;
      Eigen::SelfAdjointEigenSolver<Mat3> es(J_pert);
      if (es.eigenvalues().minCoeff() > 0.0) {
        return J_pert;
      }
    }
    throw NumericalError("could not sample a positive definite perturbed inertia");
  };

  p.J_t = perturb_inertia(nominal.J_t);
  p.J_c = perturb_inertia(nominal.J_c);
  p.L1 = nominal.L1 + rng.uniform(-spec.lever_arm_bound, spec.lever_arm_bound);
  p.L2 = nominal.L2 + rng.uniform(-spec.lever_arm_bound, spec.lever_arm_bound);
  p.L3 = nominal.L3 + rng.uniform(-spec.lever_arm_bound, spec.lever_arm_bound);
  return p;
}

MonteCarloResult monte_carlo(const ScenarioConfig& cfg, const PerturbationSpec& perturb,
                             int n_runs, std::uint64_t seed, const MonteCarloOptions& options) {
  if (n_runs < 1) {
    throw ConfigError("monte_carlo requires n_runs >= 1");
  }
  const auto t_start = std::chrono::steady_clock::now();

  MonteCarloResult result;
  result.runs.resize(static_cast<std::size_t>(n_runs));
  std::vector<std::vector<double>> p_series(static_cast<std::size_t>(n_runs));
  std::vector<std::vector<double>> q_series(static_cast<std::size_t>(n_runs));
  std::vector<std::vector<double>> k_rob(static_cast<std::size_t>(n_runs));
  std::vector<std::vector<double>> k_rand(static_cast<std::size_t>(n_runs));
  std::vector<double> times;

  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_runs) {
        return;
      }
      const std::size_t ui = static_cast<std::size_t>(i);
      CounterRng run_rng = CounterRng(seed).substream(static_cast<std::uint64_t>(i));

      ScenarioConfig rcfg = cfg;
      rcfg.truth_params = perturb_params(cfg.params, perturb, run_rng);
      rcfg.disturbance_fraction = perturb.disturbance_fraction;
      rcfg.seed = run_rng.next_u64();

      const TrajectoryRecord rec = run_closed_loop(rcfg);

      MonteCarloRunSummary& summary = result.runs[ui];
      summary.index = i;
      summary.seed = rcfg.seed;
      summary.failed = rec.failed;
      if (!rec.samples.empty()) {
        summary.metrics = compute_metrics(rec, cfg.settle);
        summary.converged = !rec.failed &&
                            summary.metrics.final_p_norm < options.converge_p_norm &&
                            summary.metrics.final_q_norm < options.converge_q_norm;
        if (!rec.failed) {
          p_series[ui].reserve(rec.samples.size());
          q_series[ui].reserve(rec.samples.size());
          for (const auto& s : rec.samples) {
            p_series[ui].push_back(s.x.segment<3>(0).norm());
            q_series[ui].push_back(s.x.segment<3>(6).norm());
          }
        }
      }
      k_rob[ui] = rec.kappa_robpole;
      k_rand[ui] = rec.kappa_random;
    }
  };

  int workers = options.workers > 0
                    ? options.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n_runs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  // Aggregation is a deterministic reduction in run order.
  std::size_t grid = 0;
  for (const auto& s : p_series) {
    grid = std::max(grid, s.size());
  }
  const double h = cfg.integrator_step;
  result.times.resize(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    result.times[i] = static_cast<double>(i) * h;
  }
  result.p_norm_envelope.resize(grid);
  result.q_norm_envelope.resize(grid);
  std::vector<double> column;
  for (std::size_t i = 0; i < grid; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      const auto& series = pass == 0 ? p_series : q_series;
      column.clear();
      for (const auto& s : series) {
        if (i < s.size()) {
          column.push_back(s[i]);
        }
      }
      std::array<double, 3> env{0.0, 0.0, 0.0};
      if (!column.empty()) {
        env[0] = *std::min_element(column.begin(), column.end());
        env[1] = median_of(column);
        env[2] = *std::max_element(column.begin(), column.end());
      }
      (pass == 0 ? result.p_norm_envelope : result.q_norm_envelope)[i] = env;
    }
  }

  for (int i = 0; i < n_runs; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    result.converged_count += result.runs[ui].converged ? 1 : 0;
    result.kappa_robpole.insert(result.kappa_robpole.end(), k_rob[ui].begin(), k_rob[ui].end());
    result.kappa_random.insert(result.kappa_random.end(), k_rand[ui].begin(), k_rand[ui].end());
  }
  result.median_kappa_robpole = median_of(result.kappa_robpole);
  result.median_kappa_random = median_of(result.kappa_random);

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace rvd
