#pragma once

#include "rvd/attitude_math.hpp"
#include "rvd/orbit_model.hpp"
#include "rvd/thruster_allocation.hpp"
#include "rvd/types.hpp"

namespace rvd {

/// Mass and geometry of the docking pair.
struct SpacecraftParams {
  double m_c{0.0};            ///< chaser mass [kg]
  Mat3 J_c{Mat3::Zero()};     ///< chaser inertia [kg m^2]
  Mat3 J_t{Mat3::Zero()};     ///< target inertia [kg m^2]
  double L1{0.0}, L2{0.0}, L3{0.0};  ///< thruster lever arms [m]

  /// Throws ConfigError unless m_c > 0, L_i > 0 and both inertias are
  /// symmetric positive definite.
  void validate() const;
};

/// Stacked relative state [p; r; qv; w] (12 states).
struct RelativeState {
  Vec3 p{Vec3::Zero()};        ///< relative position, target LVLH frame [m]
  Vec3 r{Vec3::Zero()};        ///< relative velocity [m/s]
  ReducedQuaternion qv;        ///< relative attitude
  Vec3 w{Vec3::Zero()};        ///< relative angular rate, chaser frame [rad/s]

  Vec12 to_vector() const;
  static RelativeState from_vector(const Vec12& x);
};

/// Target attitude truth: inertial attitude and body rate.
struct TargetAttitudeState {
  Quaternion q_i_tb{Quaternion::identity()};
  Vec3 w_tb{Vec3::Zero()};  ///< [rad/s], target body frame
};

/// The LTV plant evaluated at one instant: xdot = A x - n_d + B f_a.
struct PlantMatrices {
  Mat12 A;
  Mat12x6 B;
  Vec12 n_d;
};

/// Model variants kept behind flags (see the stiffness diagonal below).
struct ModelOptions {
  /// Reproduce the printed stiffness diagonal mu/r_c^3 - gamma_dot instead of
  /// the dimensionally consistent mu/r_c^3 - gamma_dot^2.
  bool paper_verbatim_stiffness{false};
  /// Controller measures velocity as delta-p / delta-t instead of reading truth.
  bool finite_difference_velocity{false};
};

/// Translational Coriolis matrix C_t = 2 m_c gamma_dot [[0,-1,0],[1,0,0],[0,0,0]].
Mat3 coriolis_translation(double gamma_dot, double m_c);

/// Translational stiffness matrix D_t. Diagonal entries (1,1),(2,2) are
/// m_c (mu/r_c^3 - gamma_dot^2), entry (3,3) is m_c mu/r_c^3, off-diagonals
/// -/+ m_c gamma_ddot. With paper_verbatim the diagonal uses gamma_dot
/// unsquared. Throws GeometryError for r_c <= 0.
Mat3 stiffness_translation(double gamma_dot, double gamma_ddot, double r_c, double m_c,
                           double mu, bool paper_verbatim = false);

/// Gravity offset n_t = m_c mu [r_t/r_c^3 - 1/r_t^2, 0, 0]^T, evaluated in the
/// cancellation-free form m_c mu (r_t^3 - r_c^3)/(r_c^3 r_t^2) so that the
/// docked geometry r_c = r_t gives an exact zero.
Vec3 gravity_offset(double r_c, double r_t, double m_c, double mu);

/// Relative attitude Coriolis matrix
/// C_r = J_c S(R w_t) + S(R w_t) J_c - S(J_c (w + R w_t)).
Mat3 attitude_coriolis(const Vec3& w, const Quaternion& q, const TargetAttitudeState& target,
                       const Mat3& J_c);

/// Attitude offset n_r = S(R w_t) J_c R w_t - J_c R J_t^{-1} S(w_t) J_t w_t.
/// Throws ConfigError for singular J_t.
Vec3 attitude_offset(const Quaternion& q, const TargetAttitudeState& target, const Mat3& J_c,
                     const Mat3& J_t);

/// Immutable per-run model: validates the parameters once, caches B and
/// J_c^{-1}, and evaluates the plant matrices / truth derivative on demand.
class PlantModel {
 public:
  PlantModel(const SpacecraftParams& params, const AllocationConfig& alloc, double mu,
             const ModelOptions& options = {});

  const SpacecraftParams& params() const { return params_; }
  double mu() const { return mu_; }
  const AllocationConfig& allocation() const { return alloc_; }
  const ModelOptions& options() const { return options_; }
  /// Constant input matrix B = [0; F_a/m_c; 0; J_c^{-1} T_a].
  const Mat12x6& input_matrix() const { return B_; }

  /// Assemble (A(t), B, n_d(t)) at the given state / orbit / target attitude.
  PlantMatrices assemble(const RelativeState& state, const OrbitState& orbit,
                         const TargetAttitudeState& target) const;

  /// Exact nonlinear state derivative
  /// xdot = A x - n_d + B f_a + [0; f_d/m_c; 0; J_c^{-1} t_d].
  Vec12 truth_derivative(const RelativeState& state, const Vec6& f_a, const Vec3& f_d,
                         const Vec3& t_d, const OrbitState& orbit,
                         const TargetAttitudeState& target) const;

 private:
  SpacecraftParams params_;
  AllocationConfig alloc_;
  double mu_;
  ModelOptions options_;
  Mat3 J_c_inv_;
  Mat12x6 B_;
};

}  // namespace rvd
