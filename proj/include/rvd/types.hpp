#pragma once

#include <Eigen/Dense>

namespace rvd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat12x6 = Eigen::Matrix<double, 12, 6>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat3x6 = Eigen::Matrix<double, 3, 6>;

/// Mean Earth radius [m], used only to sanity-check orbit altitudes.
inline constexpr double kEarthRadius = 6371000.0;

}  // namespace rvd
