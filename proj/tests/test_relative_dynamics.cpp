#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <rvd/errors.hpp>
#include <rvd/relative_dynamics.hpp>
#include <rvd/rng.hpp>

#include "support/section4.hpp"

using namespace rvd;
using rvd::testing::section4_orbit;
using rvd::testing::section4_params;

namespace {

constexpr double kMu = 3.986004418e14;

Vec3 random_vec3(CounterRng& rng, double scale = 1.0) {
  return Vec3(rng.uniform(-scale, scale), rng.uniform(-scale, scale),
              rng.uniform(-scale, scale));
}

Quaternion random_unit_quat(CounterRng& rng) {
  Quaternion q(rng.normal(), Vec3(rng.normal(), rng.normal(), rng.normal()));
  return q.normalized();
}

Mat3 random_inertia(CounterRng& rng) {
  Mat3 m;
  m << rng.uniform(8, 12), rng.uniform(-2, 2), rng.uniform(-2, 2),
       0, rng.uniform(8, 12), rng.uniform(-2, 2),
       0, 0, rng.uniform(8, 12);
  m(1, 0) = m(0, 1);
  m(2, 0) = m(0, 2);
  m(2, 1) = m(1, 2);
  return m + 5.0 * Mat3::Identity();  // keep it well inside SPD
}

OrbitState circular_docked_orbit() {
  const OrbitElements el = section4_orbit();
  OrbitState s;
  s.r_t = el.semi_major_axis;
  s.r_c = el.semi_major_axis;
  s.gamma = 0.0;
  s.gamma_dot = el.mean_motion();
  s.gamma_ddot = 0.0;
  return s;
}

void check_block_sparsity(const PlantMatrices& pm) {
  CHECK(pm.A.block<3, 3>(0, 0).norm() == 0.0);
  CHECK(pm.A.block<3, 6>(0, 6).norm() == 0.0);
  CHECK((pm.A.block<3, 3>(0, 3) - Mat3::Identity()).norm() == 0.0);
  CHECK(pm.A.block<3, 6>(3, 6).norm() == 0.0);
  CHECK(pm.A.block<3, 9>(6, 0).norm() == 0.0);
  CHECK(pm.A.block<3, 9>(9, 0).norm() == 0.0);
  CHECK(pm.B.topRows<3>().norm() == 0.0);
  CHECK(pm.B.middleRows<3>(6).norm() == 0.0);
  CHECK(pm.n_d.segment<3>(0).norm() == 0.0);
  CHECK(pm.n_d.segment<3>(6).norm() == 0.0);
}

}  // namespace

TEST_CASE("translational Coriolis matrix") {
  CHECK(coriolis_translation(0.0, 10.0).norm() == 0.0);

  const double rate = section4_orbit().mean_motion();
  const Mat3 C = coriolis_translation(rate, 10.0);
  CHECK(C(0, 1) == doctest::Approx(-0.0234376).epsilon(1e-4));
  CHECK(C(0, 1) == -2.0 * 10.0 * rate);
  CHECK(C(1, 0) == 2.0 * 10.0 * rate);

  CounterRng rng(401);
  for (int i = 0; i < 50; ++i) {
    const Mat3 Cr = coriolis_translation(rng.uniform(-1, 1), rng.uniform(0.1, 100));
    CHECK((Cr + Cr.transpose()).norm() == 0.0);
  }
}

TEST_CASE("translational stiffness matrix") {
  const double r_c = 6621000.0;
  const double m_c = 10.0;

  SUBCASE("static limit") {
    const Mat3 D = stiffness_translation(0.0, 0.0, r_c, m_c, kMu);
    const double mu_rc3 = kMu / (r_c * r_c * r_c);
    CHECK((D - m_c * mu_rc3 * Mat3::Identity()).norm() == 0.0);
  }

  SUBCASE("circular orbit zeroes the in-plane diagonal") {
    const double rate = std::sqrt(kMu / (r_c * r_c * r_c));
    const Mat3 D = stiffness_translation(rate, 0.0, r_c, m_c, kMu);
    CHECK(std::abs(D(0, 0)) < 1e-18);
    CHECK(std::abs(D(1, 1)) < 1e-18);
    CHECK(D(2, 2) == doctest::Approx(m_c * kMu / (r_c * r_c * r_c)).epsilon(1e-15));
  }

  SUBCASE("off-diagonal carries the anomaly acceleration") {
    const Mat3 D = stiffness_translation(0.0, 1e-6, r_c, m_c, kMu);
    CHECK(D(0, 1) == doctest::Approx(-1e-5).epsilon(1e-12));
    CHECK(D(1, 0) == doctest::Approx(1e-5).epsilon(1e-12));
  }

  SUBCASE("verbatim flag reproduces the printed diagonal") {
    const double rate = 1.2e-3;
    const Mat3 D = stiffness_translation(rate, 0.0, r_c, m_c, kMu, true);
    const double mu_rc3 = kMu / (r_c * r_c * r_c);
    CHECK(D(0, 0) == doctest::Approx(m_c * (mu_rc3 - rate)).epsilon(1e-15));
  }

  CHECK_THROWS_AS(stiffness_translation(0, 0, 0.0, m_c, kMu), GeometryError);
}

TEST_CASE("gravity offset") {
  CHECK(gravity_offset(6621000.0, 6621000.0, 10.0, kMu).norm() == 0.0);

  const Vec3 n = gravity_offset(6621010.0, 6621000.0, 10.0, kMu);
  CHECK(n.y() == 0.0);
  CHECK(n.z() == 0.0);
  const double direct = 10.0 * kMu * (6621000.0 / std::pow(6621010.0, 3) -
                                      1.0 / (6621000.0 * 6621000.0));
  CHECK(n.x() == doctest::Approx(direct).epsilon(1e-9));
  CHECK(n.x() < 0.0);  // chaser above the target feels weaker gravity

  CHECK_THROWS_AS(gravity_offset(-1.0, 6621000.0, 10.0, kMu), GeometryError);
}

TEST_CASE("translation row reproduces the two-body finite-difference oracle") {
  // A co-rotating chaser at rest offset radially by x: the model's radial
  // acceleration must equal gdot^2 x - (mu/r_c^2 - mu/r_t^2).
  const OrbitState orbit0 = circular_docked_orbit();
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);

  for (double x : {1.0, 10.0, 100.0, -50.0}) {
    RelativeState st;
    st.p = Vec3(x, 0, 0);
    OrbitState orbit = orbit0;
    orbit.r_c = chaser_radius(orbit.r_t, st.p);
    const Vec12 xdot =
        model.truth_derivative(st, Vec6::Zero(), Vec3::Zero(), Vec3::Zero(), orbit, {});
    const double expected = orbit.gamma_dot * orbit.gamma_dot * x -
                            (kMu / (orbit.r_c * orbit.r_c) - kMu / (orbit.r_t * orbit.r_t));
    CHECK(xdot(3) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("attitude Coriolis matrix") {
  const SpacecraftParams params = section4_params();
  CounterRng rng(402);

  SUBCASE("vanishes at rest") {
    TargetAttitudeState target;
    CHECK(attitude_coriolis(Vec3::Zero(), Quaternion::identity(), target, params.J_c).norm() ==
          0.0);
  }

  SUBCASE("fixed target reduces to the gyroscopic term") {
    TargetAttitudeState target;
    for (int i = 0; i < 20; ++i) {
      const Vec3 w = random_vec3(rng, 0.5);
      const Mat3 C = attitude_coriolis(w, random_unit_quat(rng), target, params.J_c);
      CHECK((C + skew(params.J_c * w)).norm() < 1e-15);
    }
  }

  SUBCASE("matches the cross-product expansion") {
    for (int i = 0; i < 200; ++i) {
      const Mat3 J = random_inertia(rng);
      TargetAttitudeState target;
      target.w_tb = random_vec3(rng, 0.3);
      const Quaternion q = random_unit_quat(rng);
      const Vec3 w = random_vec3(rng, 0.3);
      const Mat3 C = attitude_coriolis(w, q, target, J);

      const Mat3 R = rotation_from_quat(q);
      const Vec3 rwt = R * target.w_tb;
      const Vec3 v = random_vec3(rng, 2.0);
      const Vec3 oracle = J * rwt.cross(v) + rwt.cross(J * v) - (J * (w + rwt)).cross(v);
      CHECK((C * v - oracle).norm() < 1e-12);
    }
  }

  SUBCASE("spherical inertia collapses C_r w to j (R w_t) x w") {
    const double j = 7.0;
    const Mat3 J = j * Mat3::Identity();
    for (int i = 0; i < 50; ++i) {
      TargetAttitudeState target;
      target.w_tb = random_vec3(rng, 0.3);
      const Quaternion q = random_unit_quat(rng);
      const Vec3 w = random_vec3(rng, 0.3);
      const Vec3 rwt = rotation_from_quat(q) * target.w_tb;
      const Vec3 got = attitude_coriolis(w, q, target, J) * w;
      CHECK((got - j * rwt.cross(w)).norm() < 1e-13);
    }
  }
}

TEST_CASE("attitude offset") {
  const SpacecraftParams params = section4_params();
  CounterRng rng(403);

  SUBCASE("zero for a non-rotating target") {
    TargetAttitudeState target;
    CHECK(attitude_offset(random_unit_quat(rng), target, params.J_c, params.J_t).norm() ==
          0.0);
  }

  SUBCASE("principal-axis spin drops the second term") {
    const Mat3 J_t = Vec3(4.0, 7.0, 9.0).asDiagonal();
    TargetAttitudeState target;
    target.w_tb = Vec3(0.2, 0.0, 0.0);
    const Quaternion q = random_unit_quat(rng);
    const Vec3 n_r = attitude_offset(q, target, params.J_c, J_t);
    const Vec3 rwt = rotation_from_quat(q) * target.w_tb;
    CHECK((n_r - skew(rwt) * (params.J_c * rwt)).norm() < 1e-15);
  }

  SUBCASE("matches the term-by-term expansion") {
    for (int i = 0; i < 200; ++i) {
      const Mat3 J_c = random_inertia(rng);
      const Mat3 J_t = random_inertia(rng);
      TargetAttitudeState target;
      target.w_tb = random_vec3(rng, 0.4);
      const Quaternion q = random_unit_quat(rng);

      const Mat3 R = rotation_from_quat(q);
      const Vec3 wt = target.w_tb;
      const Vec3 rwt = R * wt;
      const Vec3 oracle = rwt.cross(J_c * rwt) - J_c * (R * (J_t.inverse() * wt.cross(J_t * wt)));

      CHECK((attitude_offset(q, target, J_c, J_t) - oracle).norm() < 1e-12);
    }
  }
}

TEST_CASE("plant assembly at the docked equilibrium") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);
  const OrbitState orbit = circular_docked_orbit();

  const PlantMatrices pm = model.assemble(RelativeState{}, orbit, {});
  check_block_sparsity(pm);
  CHECK(pm.n_d.norm() == 0.0);
  CHECK((pm.A.block<3, 3>(6, 9) - 0.5 * Mat3::Identity()).norm() == 0.0);
  CHECK(pm.A.block<3, 3>(9, 9).norm() == 0.0);
  CHECK((pm.A.block<3, 3>(3, 3) -
         (-coriolis_translation(orbit.gamma_dot, params.m_c) / params.m_c))
            .norm() == 0.0);
  CHECK(std::abs(pm.A(3, 0)) < 1e-19);
  CHECK(std::abs(pm.A(4, 1)) < 1e-19);

  // Section-4 parameters: the rate rows of B are T_a / 10.
  CHECK((pm.B.block<3, 6>(9, 0) - 0.1 * alloc.T_a).norm() < 1e-15);
}

TEST_CASE("plant block sparsity holds for random states") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);
  CounterRng rng(404);

  for (int i = 0; i < 100; ++i) {
    RelativeState st;
    st.p = random_vec3(rng, 100.0);
    st.r = random_vec3(rng, 5.0);
    st.qv = ReducedQuaternion::from_quaternion(random_unit_quat(rng));
    st.w = random_vec3(rng, 0.3);
    OrbitState orbit = circular_docked_orbit();
    orbit.r_c = chaser_radius(orbit.r_t, st.p);
    TargetAttitudeState target;
    target.w_tb = random_vec3(rng, 0.2);
    target.q_i_tb = random_unit_quat(rng);
    check_block_sparsity(model.assemble(st, orbit, target));
  }
}

TEST_CASE("truth derivative cancels exactly under feedforward") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);

  // Zero state but an off-equilibrium orbit snapshot and a spinning target:
  // the offset n is nonzero and a feedforward command must null the derivative.
  OrbitState orbit = circular_docked_orbit();
  orbit.r_c = orbit.r_t + 250.0;
  TargetAttitudeState target;
  target.w_tb = Vec3(0.05, -0.02, 0.01);

  const Vec3 n_t = gravity_offset(orbit.r_c, orbit.r_t, params.m_c, kMu);
  const Vec3 n_r = attitude_offset(Quaternion::identity(), target, params.J_c, params.J_t);
  CHECK(n_t.norm() > 0.0);
  CHECK(n_r.norm() > 0.0);

  const Vec6 u1 = feedforward(n_t, n_r, alloc);
  const Vec12 xdot =
      model.truth_derivative(RelativeState{}, u1, Vec3::Zero(), Vec3::Zero(), orbit, target);
  CHECK(xdot.norm() < 1e-10);
}

TEST_CASE("docked circular state is a fixed point") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);
  const Vec12 xdot = model.truth_derivative(RelativeState{}, Vec6::Zero(), Vec3::Zero(),
                                            Vec3::Zero(), circular_docked_orbit(), {});
  CHECK(xdot.norm() < 1e-12);
}

TEST_CASE("truth derivative is linear in the thruster command") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);
  CounterRng rng(405);

  RelativeState st;
  st.p = Vec3(10, -10, 10);
  st.r = Vec3(5, -4, 4);
  st.qv = ReducedQuaternion(Vec3(-0.4329, 0.6645, 0.4783));
  st.w = Vec3(0.01, -0.02, 0.005);
  OrbitState orbit = circular_docked_orbit();
  orbit.r_c = chaser_radius(orbit.r_t, st.p);
  TargetAttitudeState target;
  target.w_tb = Vec3(0.03, 0.01, -0.02);

  for (int i = 0; i < 50; ++i) {
    Vec6 f1, f2;
    for (int j = 0; j < 6; ++j) {
      f1(j) = rng.uniform(-20, 20);
      f2(j) = rng.uniform(-20, 20);
    }
    const Vec12 d12 = model.truth_derivative(st, Vec6(f1 + f2), Vec3::Zero(), Vec3::Zero(),
                                             orbit, target);
    const Vec12 d1 =
        model.truth_derivative(st, f1, Vec3::Zero(), Vec3::Zero(), orbit, target);
    CHECK((d12 - d1 - model.input_matrix() * f2).norm() < 1e-12);
  }
}

TEST_CASE("quaternion rows of the derivative follow the kinematics matrix") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);
  CounterRng rng(406);

  for (int i = 0; i < 100; ++i) {
    RelativeState st;
    st.p = random_vec3(rng, 50.0);
    st.r = random_vec3(rng, 3.0);
    Quaternion q = random_unit_quat(rng);
    st.qv = ReducedQuaternion::from_quaternion(q);
    if (st.qv.qv.norm() > 0.99) {
      continue;
    }
    st.w = random_vec3(rng, 0.2);
    OrbitState orbit = circular_docked_orbit();
    orbit.r_c = chaser_radius(orbit.r_t, st.p);
    const Vec12 xdot =
        model.truth_derivative(st, Vec6::Zero(), Vec3::Zero(), Vec3::Zero(), orbit, {});
    const Vec3 expected = 0.5 * kinematics_matrix(st.qv) * st.w;
    CHECK((xdot.segment<3>(6) - expected).norm() < 1e-15);
  }
}

TEST_CASE("external disturbance enters through the mass and inertia") {
  const SpacecraftParams params = section4_params();
  const AllocationConfig alloc = build_allocation(params.L1, params.L2, params.L3);
  const PlantModel model(params, alloc, kMu);

  const Vec3 f_d(1.0, -2.0, 3.0);
  const Vec3 t_d(0.5, 0.25, -0.125);
  const Vec12 base = model.truth_derivative(RelativeState{}, Vec6::Zero(), Vec3::Zero(),
                                            Vec3::Zero(), circular_docked_orbit(), {});
  const Vec12 bumped = model.truth_derivative(RelativeState{}, Vec6::Zero(), f_d, t_d,
                                              circular_docked_orbit(), {});
  CHECK((bumped.segment<3>(3) - base.segment<3>(3) - f_d / params.m_c).norm() < 1e-15);
  CHECK((bumped.segment<3>(9) - base.segment<3>(9) - params.J_c.inverse() * t_d).norm() <
        1e-15);
}

TEST_CASE("parameter validation") {
  SpacecraftParams p = section4_params();
  p.m_c = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = section4_params();
  p.J_c(0, 1) = 5.0;  // asymmetric
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = section4_params();
  p.J_t = -Mat3::Identity();
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = section4_params();
  p.L2 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("state vector round trip") {
  CounterRng rng(407);
  Vec12 x;
  for (int i = 0; i < 12; ++i) {
    x(i) = rng.uniform(-1, 1);
  }
  x.segment<3>(6) *= 0.5;
  CHECK((RelativeState::from_vector(x).to_vector() - x).norm() == 0.0);
}
