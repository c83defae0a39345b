#pragma once

#include "rvd/types.hpp"

namespace rvd {

/// Two-body elements of the target orbit (circular or elliptic).
struct OrbitElements {
  double semi_major_axis{0.0};  ///< [m]
  double eccentricity{0.0};     ///< in [0, 1)
  double true_anomaly_0{0.0};   ///< true anomaly at t = 0 [rad]
  double mu{3.986004418e14};    ///< geocentric gravitational constant [m^3/s^2]

  /// Throws ConfigError if the elements are out of domain.
  void validate() const;

  double mean_motion() const;  ///< sqrt(mu / a^3) [rad/s]
  double period() const;       ///< 2*pi / mean_motion [s]
};

/// Target orbit snapshot consumed by the dynamics assembler.
struct OrbitState {
  double r_t{0.0};         ///< target radius [m]
  double gamma{0.0};       ///< true anomaly [rad], unwrapped
  double gamma_dot{0.0};   ///< [rad/s]
  double gamma_ddot{0.0};  ///< [rad/s^2]; identically 0 for circular orbits
  double r_c{0.0};         ///< chaser radius [m]
};

/// Solve Kepler's equation E - e sin E = M for E by damped Newton iteration
/// starting from E0 = M. Residual below 1e-12; throws NumericalError if the
/// iteration fails to converge within 50 steps.
double solve_kepler(double mean_anomaly, double eccentricity);

/// Evaluate the target's two-body motion at time t (r_c left at 0; fill it
/// from the truth relative position via chaser_radius).
OrbitState propagate_target(const OrbitElements& elements, double t);

/// Chaser radius |[r_t + x, y, z]| for relative position p = [x, y, z] in the
/// target LVLH frame.
double chaser_radius(double r_t, const Vec3& p);

}  // namespace rvd
