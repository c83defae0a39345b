#include "rvd/attitude_math.hpp"

#include <cmath>

#include "rvd/errors.hpp"

namespace rvd {

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (n < 1e-300) {
    throw NumericalError("cannot normalize zero quaternion");
  }
  return {q0 / n, Vec3(qv / n)};
}

ReducedQuaternion ReducedQuaternion::from_quaternion(const Quaternion& q, double tol) {
  Quaternion u = q;
  if (u.q0 < 0.0) {
    u.q0 = -u.q0;
    u.qv = -u.qv;
  }
  const double vn = u.qv.norm();
  if (vn > 1.0 + tol) {
    throw SingularAttitudeError("quaternion vector part outside unit ball: |qv| = " +
                                std::to_string(vn));
  }
  if (vn > 1.0) {
    return ReducedQuaternion(Vec3(u.qv / vn));
  }
  return ReducedQuaternion(u.qv);
}

double ReducedQuaternion::q0() const {
  const double s = qv.squaredNorm();
  if (s > 1.0 + 1e-9) {
    throw SingularAttitudeError("reduced quaternion outside unit ball: |qv|^2 = " +
                                std::to_string(s));
  }
  return std::sqrt(std::max(0.0, 1.0 - s));
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

Quaternion quat_multiply(const Quaternion& a, const Quaternion& b) {
  return {a.q0 * b.q0 - a.qv.dot(b.qv),
          Vec3(a.q0 * b.qv + b.q0 * a.qv + a.qv.cross(b.qv))};
}

Quaternion quat_inverse(const Quaternion& a) { return {a.q0, Vec3(-a.qv)}; }

Quaternion relative_quaternion(const Quaternion& q_i_cb, const Quaternion& q_i_tb) {
  const double t0 = q_i_tb.q0;
  const Vec3& t = q_i_tb.qv;
  Mat4 m;
  m << t0, -t.x(), -t.y(), -t.z(),
       t.x(), t0, t.z(), -t.y(),
       t.y(), -t.z(), t0, t.x(),
       t.z(), t.y(), -t.x(), t0;
  const Vec4 cb_inv(q_i_cb.q0, -q_i_cb.qv.x(), -q_i_cb.qv.y(), -q_i_cb.qv.z());
  const Vec4 r = m * cb_inv;
  return {r(0), r(1), r(2), r(3)};
}

Mat3 rotation_from_quat(const Quaternion& q) {
  const Vec3& v = q.qv;
  return (q.q0 * q.q0 - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() -
         2.0 * q.q0 * skew(v);
}

Mat3 kinematics_matrix(const ReducedQuaternion& q) {
  const double s = q.qv.squaredNorm();
  if (s >= 1.0) {
    throw SingularAttitudeError("kinematics matrix singular: |qv| >= 1");
  }
  const double q0 = std::sqrt(1.0 - s);
  const double q1 = q.qv.x(), q2 = q.qv.y(), q3 = q.qv.z();
  Mat3 t;
  t << q0, -q3, q2,
       q3, q0, -q1,
      -q2, q1, q0;
  return t;
}

Vec3 relative_angular_velocity(const Vec3& w_cb, const Vec3& w_tb, const Mat3& R) {
  return w_cb - R * w_tb;
}

}  // namespace rvd
