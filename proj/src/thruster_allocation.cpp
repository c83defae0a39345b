#include "rvd/thruster_allocation.hpp"

#include <Eigen/SVD>

#include "rvd/errors.hpp"

namespace rvd {

AllocationConfig build_allocation(double L1, double L2, double L3) {
  if (!(L1 > 0.0 && L2 > 0.0 && L3 > 0.0)) {
    throw ConfigError("thruster lever arms must be positive");
  }
  AllocationConfig a;
  a.F_a << 0, 0, 1, -1, 0, 0,
           0, 0, 0, 0, 1, -1,
           1, -1, 0, 0, 0, 0;
  const double l1 = 0.5 * L1, l2 = 0.5 * L2, l3 = 0.5 * L3;
  a.T_a << l2, l2, 0, 0, l3, l3,
          -l1, -l1, l3, l3, 0, 0,
           0, 0, -l2, -l2, l1, l1;
  a.G.topRows<3>() = a.F_a;
  a.G.bottomRows<3>() = a.T_a;

  // Rank-revealing pseudo-inverse; for the square full-rank configuration this
  // coincides with the inverse.
  Eigen::JacobiSVD<Mat6> svd(a.G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  int rank = 0;
  Vec6 inv_sv = Vec6::Zero();
  for (int i = 0; i < 6; ++i) {
    if (sv(i) > tol) {
      inv_sv(i) = 1.0 / sv(i);
      ++rank;
    }
  }
  if (rank < 6) {
    throw ConfigError("thruster configuration matrix G is rank deficient (rank = " +
                      std::to_string(rank) + ")");
  }
  a.G_pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return a;
}

Vec6 feedforward(const Vec3& n_t, const Vec3& n_r, const AllocationConfig& alloc) {
  Vec6 n;
  n << n_t, n_r;
  return alloc.G_pinv * n;
}

}  // namespace rvd
