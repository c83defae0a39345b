#pragma once

#include "rvd/types.hpp"

namespace rvd {

/// Thruster configuration: force map F_a, torque map T_a, stacked G = [F_a; T_a]
/// and its pseudo-inverse. Immutable after construction.
struct AllocationConfig {
  Mat3x6 F_a;
  Mat3x6 T_a;
  Mat6 G;
  Mat6 G_pinv;
};

/// Build the six-thruster configuration for lever arms L1, L2, L3 [m].
/// Verifies that G has full row rank; throws ConfigError otherwise.
AllocationConfig build_allocation(double L1, double L2, double L3);

/// Feedforward thruster command u1 with G u1 = [n_t; n_r].
Vec6 feedforward(const Vec3& n_t, const Vec3& n_r, const AllocationConfig& alloc);

}  // namespace rvd
