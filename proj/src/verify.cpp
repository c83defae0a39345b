#include "rvd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rvd/attitude_math.hpp"
#include "rvd/orbit_model.hpp"
#include "rvd/relative_dynamics.hpp"
#include "rvd/robpole.hpp"
#include "rvd/rng.hpp"
#include "rvd/sim_harness.hpp"
#include "rvd/thruster_allocation.hpp"

namespace rvd {

namespace {

std::string detail(double worst, const char* what, int cases) {
  std::ostringstream os;
  os << what << " = " << worst << " over " << cases << " cases";
  return os.str();
}

Quaternion random_unit_quat(CounterRng& rng) {
  Quaternion q(rng.normal(), Vec3(rng.normal(), rng.normal(), rng.normal()));
  return q.normalized();
}

Vec3 random_vec3(CounterRng& rng, double scale) {
  return Vec3(rng.uniform(-scale, scale), rng.uniform(-scale, scale),
              rng.uniform(-scale, scale));
}

SpacecraftParams reference_params() {
  SpacecraftParams p;
  p.m_c = 10.0;
  p.J_c = 10.0 * Mat3::Identity();
  p.J_t << 10.0, 2.5, 3.5,
           2.5, 10.0, 4.5,
           3.5, 4.5, 10.0;
  p.L1 = p.L2 = p.L3 = 2.0;
  return p;
}

OrbitElements reference_orbit() {
  OrbitElements el;
  el.semi_major_axis = 6621000.0;
  el.eccentricity = 0.0;
  el.mu = 3.986004418e14;
  return el;
}

PoleSet reference_poles() {
  return PoleSet({-0.10, -0.15, -0.20, -0.25, -0.30, -0.35,
                  -0.40, -0.45, -0.50, -0.55, -0.60, -0.65});
}

ScenarioConfig short_reference_scenario(double duration) {
  ScenarioConfig cfg;
  cfg.orbit = reference_orbit();
  cfg.params = reference_params();
  cfg.initial_state.p = Vec3(10, -10, 10);
  cfg.initial_state.r = Vec3(5, -4, 4);
  cfg.initial_state.qv =
      ReducedQuaternion::from_quaternion(Quaternion(0.3772, -0.4329, 0.6645, 0.4783));
  cfg.controller.poles = reference_poles();
  cfg.duration = duration;
  return cfg;
}

void check_attitude(std::vector<VerifyCheck>& out, int n_cases) {
  CounterRng rng(11);

  double worst_norm = 0.0;
  for (int i = 0; i < n_cases; ++i) {
    const Quaternion r = quat_multiply(random_unit_quat(rng), random_unit_quat(rng));
    worst_norm = std::max(worst_norm, std::abs(r.norm() - 1.0));
  }
  out.push_back({"attitude", "quaternion_norms", worst_norm < 1e-9,
                 detail(worst_norm, "max |norm-1|", n_cases)});

  double worst_kin = 0.0;
  for (int i = 0; i < n_cases; ++i) {
    Quaternion q = random_unit_quat(rng);
    if (q.q0 < 0) {
      q.q0 = -q.q0;
      q.qv = -q.qv;
    }
    if (q.q0 < 1e-3) {
      continue;
    }
    const Vec3 w = random_vec3(rng, 2.0);
    const Vec3 qd = 0.5 * kinematics_matrix(ReducedQuaternion(q.qv)) * w;
    const double q0d = -q.qv.dot(qd) / q.q0;
    worst_kin = std::max(worst_kin, std::abs(q.q0 * q0d + q.qv.dot(qd)));
  }
  out.push_back({"attitude", "kinematics_consistency", worst_kin < 1e-10,
                 detail(worst_kin, "max norm drift", n_cases)});

  double worst_rot = 0.0;
  for (int i = 0; i < n_cases; ++i) {
    const Mat3 R = rotation_from_quat(random_unit_quat(rng));
    worst_rot = std::max(worst_rot, (R.transpose() * R - Mat3::Identity()).norm());
    worst_rot = std::max(worst_rot, std::abs(R.determinant() - 1.0));
  }
  out.push_back({"attitude", "rotation_group", worst_rot < 1e-10,
                 detail(worst_rot, "max orthogonality defect", n_cases)});

  double worst_rel = 0.0;
  for (int i = 0; i < n_cases; ++i) {
    const Quaternion a = random_unit_quat(rng);
    const Quaternion b = random_unit_quat(rng);
    const Quaternion direct = relative_quaternion(a, b);
    const Quaternion oracle = quat_multiply(quat_inverse(a), b);
    const double err = std::abs(direct.q0 - oracle.q0) + (direct.qv - oracle.qv).norm();
    worst_rel = std::max(worst_rel, err);
  }
  out.push_back({"attitude", "relative_quaternion_oracle", worst_rel < 1e-12,
                 detail(worst_rel, "max oracle gap", n_cases)});
}

void check_orbit(std::vector<VerifyCheck>& out, int n_cases) {
  CounterRng rng(12);

  double worst = 0.0;
  for (int i = 0; i < n_cases; ++i) {
    const double M = rng.uniform(-6 * M_PI, 6 * M_PI);
    const double e = rng.uniform(0.0, 0.95);
    const double E = solve_kepler(M, e);
    worst = std::max(worst, std::abs(E - e * std::sin(E) - M));
  }
  out.push_back(
      {"orbit", "kepler_residual", worst < 1e-12, detail(worst, "max residual", n_cases)});

  OrbitElements el = reference_orbit();
  el.eccentricity = 0.1;
  el.semi_major_axis = 7000000.0;
  const double h_ref = std::sqrt(el.mu * el.semi_major_axis * (1 - 0.01));
  double worst_h = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const OrbitState s = propagate_target(el, el.period() * i / 20.0);
    worst_h = std::max(worst_h, std::abs(s.r_t * s.r_t * s.gamma_dot - h_ref) / h_ref);
  }
  out.push_back({"orbit", "angular_momentum_conservation", worst_h < 1e-6,
                 detail(worst_h, "max relative drift", 21)});

  const OrbitElements circ = reference_orbit();
  double worst_gdd = 0.0, worst_rate = 0.0;
  const double rate0 = propagate_target(circ, 0.0).gamma_dot;
  for (int i = 1; i <= 20; ++i) {
    const OrbitState s = propagate_target(circ, 300.0 * i);
    worst_gdd = std::max(worst_gdd, std::abs(s.gamma_ddot));
    worst_rate = std::max(worst_rate, std::abs(s.gamma_dot - rate0));
  }
  out.push_back({"orbit", "circular_specialization", worst_gdd < 1e-15 && worst_rate == 0.0,
                 detail(worst_gdd, "max |gamma_ddot|", 20)});
}

void check_allocation(std::vector<VerifyCheck>& out, int n_cases) {
  CounterRng rng(13);
  const AllocationConfig alloc = build_allocation(2.0, 2.0, 2.0);

  const double id_gap = (alloc.G * alloc.G_pinv - Mat6::Identity()).norm();
  out.push_back(
      {"allocation", "pinv_identity", id_gap < 1e-12, detail(id_gap, "||G G+ - I||", 1)});

  double worst = 0.0;
  for (int i = 0; i < n_cases; ++i) {
    const Vec3 n_t = random_vec3(rng, 10.0);
    const Vec3 n_r = random_vec3(rng, 5.0);
    Vec6 n;
    n << n_t, n_r;
    worst = std::max(worst, (alloc.G * feedforward(n_t, n_r, alloc) - n).norm());
  }
  out.push_back({"allocation", "feedforward_exactness", worst < 1e-10,
                 detail(worst, "max ||G u1 - n||", n_cases)});

  const SpacecraftParams params = reference_params();
  const PlantModel model(params, alloc, reference_orbit().mu);
  double worst_tie = 0.0;
  for (int i = 0; i < std::max(10, n_cases / 10); ++i) {
    OrbitState orbit;
    orbit.r_t = 6621000.0;
    orbit.r_c = orbit.r_t + rng.uniform(-1000.0, 1000.0);
    orbit.gamma_dot = 1.17e-3;
    TargetAttitudeState target;
    target.w_tb = random_vec3(rng, 0.1);
    RelativeState st;
    st.qv = ReducedQuaternion(random_vec3(rng, 0.3));
    st.w = random_vec3(rng, 0.1);

    const PlantMatrices pm = model.assemble(st, orbit, target);
    const Vec3 n_t = gravity_offset(orbit.r_c, orbit.r_t, params.m_c, model.mu());
    const Vec3 n_r =
        attitude_offset(st.qv.to_quaternion(), target, params.J_c, params.J_t);
    const Vec6 u1 = feedforward(n_t, n_r, alloc);
    worst_tie = std::max(worst_tie, (pm.B * u1 - pm.n_d).norm());
  }
  out.push_back({"allocation", "offset_cancellation_tie", worst_tie < 1e-10,
                 detail(worst_tie, "max ||B u1 - n_d||", std::max(10, n_cases / 10))});
}

void check_robpole(std::vector<VerifyCheck>& out, int n_systems) {
  CounterRng rng(14);

  double worst_res = 0.0, worst_eig = 0.0;
  bool monotone = true;
  int optimality_wins = 0;
  for (int trial = 0; trial < n_systems; ++trial) {
    // Single-input draws stay at low order: their eigenvector conditioning
    // grows exponentially with n and leaves the certifiable regime of a
    // double-precision eigensolver around n = 6.
    int n = 3 + static_cast<int>(rng.next_u64() % 10);
    const int m = 1 + static_cast<int>(rng.next_u64() % static_cast<unsigned>(std::min(6, n)));
    if (m == 1) {
      n = 3 + static_cast<int>(rng.next_u64() % 2);
    }
    Eigen::MatrixXd A(n, n), B(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        A(i, j) = rng.uniform(-1, 1);
      }
      for (int j = 0; j < m; ++j) {
        B(i, j) = rng.uniform(-1, 1);
      }
    }
    std::vector<double> lambdas;
    for (int i = 0; i < n; ++i) {
      lambdas.push_back(-(0.1 + 0.2 * i) + rng.uniform(-0.05, 0.05));
    }
    const PoleSet poles(lambdas);
    const InputDecomposition d = decompose_input_matrix(B);
    const GainResult g = assign_poles(A, d, poles);
    worst_res = std::max(worst_res, g.residual);

    Eigen::EigenSolver<Eigen::MatrixXd> es(A + B * g.K, false);
    std::vector<std::complex<double>> eigs(es.eigenvalues().data(),
                                           es.eigenvalues().data() + n);
    std::sort(eigs.begin(), eigs.end(),
              [](const auto& a, const auto& b) { return a.real() < b.real(); });
    std::vector<double> want = lambdas;
    std::sort(want.begin(), want.end());
    for (int i = 0; i < n; ++i) {
      worst_eig = std::max(worst_eig,
                           std::abs(eigs[static_cast<std::size_t>(i)] -
                                    std::complex<double>(want[static_cast<std::size_t>(i)], 0)));
    }

    for (std::size_t s = 1; s < g.det_history.size(); ++s) {
      monotone &= g.det_history[s] >= g.det_history[s - 1] * (1.0 - 1e-12);
    }

    double best_random = 0.0;
    for (int i = 0; i < 20; ++i) {
      best_random = std::max(
          best_random, std::abs(random_admissible_selection(A, d, poles, rng).determinant()));
    }
    optimality_wins += std::abs(g.det_X) >= best_random - 1e-12 ? 1 : 0;
  }
  out.push_back({"robpole", "eigenstructure_residual", worst_res < 1e-8,
                 detail(worst_res, "max relative residual", n_systems)});
  out.push_back({"robpole", "eigenvalue_placement", worst_eig < 1e-6,
                 detail(worst_eig, "max eigenvalue error", n_systems)});
  out.push_back({"robpole", "det_monotonicity", monotone,
                 detail(monotone ? 1.0 : 0.0, "all sweeps non-decreasing", n_systems)});
  out.push_back({"robpole", "optimality_vs_random",
                 optimality_wins * 100 >= n_systems * 95,
                 detail(static_cast<double>(optimality_wins), "wins", n_systems)});
}

void check_sim(std::vector<VerifyCheck>& out) {
  // Integrator order on a linear problem with a known exponential solution.
  CounterRng rng(15);
  Mat12 A;
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      A(i, j) = rng.uniform(-0.4, 0.4);
    }
  }
  A -= 1.5 * Mat12::Identity();
  Vec12 x0;
  for (int i = 0; i < 12; ++i) {
    x0(i) = rng.uniform(-0.2, 0.2);
  }
  auto f = [&](const Vec12& v, double) { return Vec12(A * v); };
  auto integrate = [&](double h) {
    Vec12 x = x0;
    const int steps = static_cast<int>(std::round(1.0 / h));
    for (int s = 0; s < steps; ++s) {
      x = rk4_step(f, x, s * h, h);
    }
    return x;
  };
  // Reference: tiny-step RK4 stands in for the exact exponential.
  const Vec12 exact = [&] {
    Vec12 x = x0;
    const double h = 1e-4;
    for (int s = 0; s < 10000; ++s) {
      x = rk4_step(f, x, s * h, h);
    }
    return x;
  }();
  const double err_h = (integrate(0.01) - exact).norm();
  const double err_h2 = (integrate(0.005) - exact).norm();
  const double order = std::log2(err_h / err_h2);
  out.push_back({"sim", "rk4_order", order >= 3.9, detail(order, "empirical order", 2)});

  // Short closed-loop run: quaternion ball, pointwise spectra, determinism.
  const ScenarioConfig cfg = short_reference_scenario(5.0);
  const TrajectoryRecord a = run_closed_loop(cfg);
  const TrajectoryRecord b = run_closed_loop(cfg);
  bool quat_ok = !a.failed;
  for (const auto& s : a.samples) {
    quat_ok &= s.x.segment<3>(6).norm() < 1.0;
  }
  out.push_back({"sim", "quaternion_ball", quat_ok,
                 detail(1.0, "all samples inside the unit ball",
                        static_cast<int>(a.samples.size()))});
  out.push_back({"sim", "pointwise_spectrum", !a.failed && a.max_re_eig_overall <= -0.1 + 1e-6,
                 detail(a.max_re_eig_overall, "max Re eig", static_cast<int>(a.samples.size()))});

  bool identical = a.samples.size() == b.samples.size();
  for (std::size_t i = 0; identical && i < a.samples.size(); ++i) {
    identical &= (a.samples[i].x - b.samples[i].x).norm() == 0.0 &&
                 (a.samples[i].f_a - b.samples[i].f_a).norm() == 0.0;
  }
  out.push_back({"sim", "determinism", identical,
                 detail(identical ? 1.0 : 0.0, "bitwise identical reruns", 2)});
}

}  // namespace

std::vector<VerifyCheck> run_verification(VerifyLevel level) {
  const int n_cases = level == VerifyLevel::kFull ? 1000 : 100;
  const int n_systems = level == VerifyLevel::kFull ? 120 : 25;

  std::vector<VerifyCheck> out;
  check_attitude(out, n_cases);
  check_orbit(out, n_cases);
  check_allocation(out, n_cases);
  check_robpole(out, n_systems);
  check_sim(out);
  return out;
}

}  // namespace rvd
