#include "rvd/relative_dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "rvd/errors.hpp"

namespace rvd {

namespace {

void require_spd(const Mat3& J, const char* name) {
  const double scale = J.cwiseAbs().maxCoeff();
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, 1.0)) {
    throw ConfigError(std::string(name) + " inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(J);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError(std::string(name) + " inertia must be positive definite");
  }
}

}  // namespace

void SpacecraftParams::validate() const {
  if (!(m_c > 0.0)) {
    throw ConfigError("chaser mass must be positive");
  }
  if (!(L1 > 0.0 && L2 > 0.0 && L3 > 0.0)) {
    throw ConfigError("thruster lever arms must be positive");
  }
  require_spd(J_c, "chaser");
  require_spd(J_t, "target");
}

Vec12 RelativeState::to_vector() const {
  Vec12 x;
  x << p, r, qv.qv, w;
  return x;
}

RelativeState RelativeState::from_vector(const Vec12& x) {
  RelativeState s;
  s.p = x.segment<3>(0);
  s.r = x.segment<3>(3);
  s.qv = ReducedQuaternion(Vec3(x.segment<3>(6)));
  s.w = x.segment<3>(9);
  return s;
}

Mat3 coriolis_translation(double gamma_dot, double m_c) {
  Mat3 c = Mat3::Zero();
  const double s = 2.0 * m_c * gamma_dot;
  c(0, 1) = -s;
  c(1, 0) = s;
  return c;
}

Mat3 stiffness_translation(double gamma_dot, double gamma_ddot, double r_c, double m_c,
                           double mu, bool paper_verbatim) {
  if (!(r_c > 0.0)) {
    throw GeometryError("stiffness_translation requires r_c > 0");
  }
  const double mu_rc3 = mu / (r_c * r_c * r_c);
  const double diag = mu_rc3 - (paper_verbatim ? gamma_dot : gamma_dot * gamma_dot);
  Mat3 d;
  d << diag, -gamma_ddot, 0.0,
       gamma_ddot, diag, 0.0,
       0.0, 0.0, mu_rc3;
  return m_c * d;
}

Vec3 gravity_offset(double r_c, double r_t, double m_c, double mu) {
  if (!(r_c > 0.0 && r_t > 0.0)) {
    throw GeometryError("gravity_offset requires positive radii");
  }
  const double rc3 = r_c * r_c * r_c;
  const double rt3 = r_t * r_t * r_t;
  return Vec3(m_c * mu * (rt3 - rc3) / (rc3 * r_t * r_t), 0.0, 0.0);
}

Mat3 attitude_coriolis(const Vec3& w, const Quaternion& q, const TargetAttitudeState& target,
                       const Mat3& J_c) {
  const Mat3 R = rotation_from_quat(q);
  const Vec3 rwt = R * target.w_tb;
  const Mat3 s_rwt = skew(rwt);
  return J_c * s_rwt + s_rwt * J_c - skew(J_c * (w + rwt));
}

Vec3 attitude_offset(const Quaternion& q, const TargetAttitudeState& target, const Mat3& J_c,
                     const Mat3& J_t) {
  Eigen::FullPivLU<Mat3> lu(J_t);
  if (!lu.isInvertible()) {
    throw ConfigError("target inertia is singular");
  }
  const Mat3 R = rotation_from_quat(q);
  const Vec3& wt = target.w_tb;
  const Vec3 rwt = R * wt;
  return skew(rwt) * (J_c * rwt) - J_c * (R * lu.solve(skew(wt) * (J_t * wt)));
}

PlantModel::PlantModel(const SpacecraftParams& params, const AllocationConfig& alloc, double mu,
                       const ModelOptions& options)
    : params_(params), alloc_(alloc), mu_(mu), options_(options) {
  params_.validate();
  if (!(mu_ > 0.0)) {
    throw ConfigError("gravitational constant must be positive");
  }
  J_c_inv_ = params_.J_c.inverse();
  B_.setZero();
  B_.block<3, 6>(3, 0) = alloc_.F_a / params_.m_c;
  B_.block<3, 6>(9, 0) = J_c_inv_ * alloc_.T_a;
}

PlantMatrices PlantModel::assemble(const RelativeState& state, const OrbitState& orbit,
                                   const TargetAttitudeState& target) const {
  PlantMatrices pm;
  pm.B = B_;

  const Mat3 C_t = coriolis_translation(orbit.gamma_dot, params_.m_c);
  const Mat3 D_t =
      stiffness_translation(orbit.gamma_dot, orbit.gamma_ddot, orbit.r_c, params_.m_c,
                            /*mu=*/mu_, options_.paper_verbatim_stiffness);
  const Quaternion q_full = state.qv.to_quaternion();
  const Mat3 C_r = attitude_coriolis(state.w, q_full, target, params_.J_c);
  const Mat3 T = kinematics_matrix(state.qv);

  pm.A.setZero();
  pm.A.block<3, 3>(0, 3) = Mat3::Identity();
  pm.A.block<3, 3>(3, 0) = -D_t / params_.m_c;
  pm.A.block<3, 3>(3, 3) = -C_t / params_.m_c;
  pm.A.block<3, 3>(6, 9) = 0.5 * T;
  pm.A.block<3, 3>(9, 9) = -J_c_inv_ * C_r;

  const Vec3 n_t = gravity_offset(orbit.r_c, orbit.r_t, params_.m_c, mu_);
  const Vec3 n_r = attitude_offset(q_full, target, params_.J_c, params_.J_t);
  pm.n_d.setZero();
  pm.n_d.segment<3>(3) = n_t / params_.m_c;
  pm.n_d.segment<3>(9) = J_c_inv_ * n_r;
  return pm;
}

Vec12 PlantModel::truth_derivative(const RelativeState& state, const Vec6& f_a, const Vec3& f_d,
                                   const Vec3& t_d, const OrbitState& orbit,
                                   const TargetAttitudeState& target) const {
  const PlantMatrices pm = assemble(state, orbit, target);
  Vec12 xdot = pm.A * state.to_vector() - pm.n_d + pm.B * f_a;
  xdot.segment<3>(3) += f_d / params_.m_c;
  xdot.segment<3>(9) += J_c_inv_ * t_d;
  return xdot;
}

}  // namespace rvd
