#pragma once

#include "rvd/types.hpp"

namespace rvd {

/// Unit quaternion, scalar-first storage [q0, q1, q2, q3].
struct Quaternion {
  double q0{1.0};
  Vec3 qv{Vec3::Zero()};

  Quaternion() = default;
  Quaternion(double w, double x, double y, double z) : q0(w), qv(x, y, z) {}
  Quaternion(double w, const Vec3& v) : q0(w), qv(v) {}

  static Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

  double norm() const { return std::sqrt(q0 * q0 + qv.squaredNorm()); }

  /// Rescale to unit norm. Throws NumericalError on a (near-)zero quaternion.
  Quaternion normalized() const;
};

/// Attitude as the 3-vector part of a unit quaternion with q0 = sqrt(1 - |qv|^2) >= 0.
/// Valid only inside the closed unit ball; q0 = 0 is the representation's singularity.
struct ReducedQuaternion {
  Vec3 qv{Vec3::Zero()};

  ReducedQuaternion() = default;
  explicit ReducedQuaternion(const Vec3& v) : qv(v) {}

  /// Build from a full unit quaternion. A negative scalar part selects the
  /// shadow quaternion (all four components negated) so the result stays in
  /// the representable half. |qv| may exceed 1 by at most `tol` (round-off),
  /// in which case it is rescaled onto the unit sphere; beyond tol throws.
  static ReducedQuaternion from_quaternion(const Quaternion& q, double tol = 1e-9);

  /// Scalar part sqrt(max(0, 1 - |qv|^2)); |qv| <= 1 + 1e-9 tolerated, else throws.
  double q0() const;

  /// Expand to the full quaternion [q0, qv].
  Quaternion to_quaternion() const { return {q0(), qv}; }
};

/// Cross-product matrix: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Hamilton product a b (a's rotation composed with b on the right).
Quaternion quat_multiply(const Quaternion& a, const Quaternion& b);

/// Conjugate [q0, -qv]; equals the inverse for unit quaternions.
Quaternion quat_inverse(const Quaternion& a);

/// Relative quaternion between chaser and target body frames,
/// q = q_{i,cb}^{-1} q_{i,tb}, evaluated as the 4x4 matrix-vector product
/// M(q_{i,tb}) [q_cb0, -q_cb1, -q_cb2, -q_cb3]^T.
Quaternion relative_quaternion(const Quaternion& q_i_cb, const Quaternion& q_i_tb);

/// Rotation matrix R = (q0^2 - qv.qv) I + 2 qv qv^T - 2 q0 S(qv).
/// For the relative quaternion this is R_tb^cb (target-body to chaser-body).
Mat3 rotation_from_quat(const Quaternion& q);

/// Reduced-quaternion kinematics matrix T(q) with qdot = (1/2) T(q) w.
/// Diagonal entries are q0 = sqrt(1 - |qv|^2); throws SingularAttitudeError
/// when |qv| >= 1.
Mat3 kinematics_matrix(const ReducedQuaternion& q);

/// Relative angular velocity w = w_cb - R * w_tb (chaser frame).
Vec3 relative_angular_velocity(const Vec3& w_cb, const Vec3& w_tb, const Mat3& R);

}  // namespace rvd
