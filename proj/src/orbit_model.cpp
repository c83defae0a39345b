#include "rvd/orbit_model.hpp"

#include <cmath>

#include "rvd/errors.hpp"

namespace rvd {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

void OrbitElements::validate() const {
  if (!(semi_major_axis > kEarthRadius)) {
    throw ConfigError("orbit.semi_major_axis must exceed the Earth radius");
  }
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
    throw ConfigError("orbit.eccentricity must lie in [0, 1)");
  }
  if (!(mu > 0.0)) {
    throw ConfigError("orbit.mu must be positive");
  }
}

double OrbitElements::mean_motion() const {
  return std::sqrt(mu / (semi_major_axis * semi_major_axis * semi_major_axis));
}

double OrbitElements::period() const { return kTwoPi / mean_motion(); }

double solve_kepler(double mean_anomaly, double eccentricity) {
  const double e = eccentricity;
  if (!(e >= 0.0 && e < 1.0)) {
    throw ConfigError("solve_kepler requires 0 <= e < 1");
  }
  double E = mean_anomaly;
  double f = E - e * std::sin(E) - mean_anomaly;
  for (int it = 0; it < 50; ++it) {
    if (std::abs(f) < 1e-14) {
      return E;
    }
    const double fp = 1.0 - e * std::cos(E);  // >= 1 - e > 0
    double step = f / fp;
    // Damping: shrink the step until the residual decreases.
    double En = E - step;
    double fn = En - e * std::sin(En) - mean_anomaly;
    int halvings = 0;
    while (std::abs(fn) > std::abs(f) && halvings < 30) {
      step *= 0.5;
      En = E - step;
      fn = En - e * std::sin(En) - mean_anomaly;
      ++halvings;
    }
    E = En;
    f = fn;
  }
  if (std::abs(f) < 1e-12) {
    return E;
  }
  throw NumericalError("Kepler iteration failed to converge");
}

OrbitState propagate_target(const OrbitElements& el, double t) {
  el.validate();
  const double a = el.semi_major_axis;
  const double e = el.eccentricity;
  const double n = el.mean_motion();

  // Epoch true anomaly -> eccentric -> mean anomaly.
  const double g0 = el.true_anomaly_0;
  const double E0 = 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(0.5 * g0),
                                     std::sqrt(1.0 + e) * std::cos(0.5 * g0));
  const double M0 = E0 - e * std::sin(E0);

  const double M = M0 + n * t;
  // Reduce to one revolution for the solve, track whole revolutions for the
  // unwrapped anomaly.
  const double revs = std::floor(M / kTwoPi);
  const double Mr = M - kTwoPi * revs;
  const double Er = solve_kepler(Mr, e);

  OrbitState s;
  s.r_t = a * (1.0 - e * std::cos(Er));
  double gr = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * Er),
                               std::sqrt(1.0 - e) * std::cos(0.5 * Er));
  if (gr < 0.0) {
    gr += kTwoPi;
  }
  s.gamma = gr + kTwoPi * revs;

  const double h = std::sqrt(el.mu * a * (1.0 - e * e));  // angular momentum
  s.gamma_dot = h / (s.r_t * s.r_t);
  const double rt_dot = (el.mu / h) * e * std::sin(s.gamma);
  s.gamma_ddot = -2.0 * rt_dot * s.gamma_dot / s.r_t;
  return s;
}

double chaser_radius(double r_t, const Vec3& p) {
  if (!(r_t > 0.0)) {
    throw GeometryError("chaser_radius requires r_t > 0");
  }
  return Vec3(r_t + p.x(), p.y(), p.z()).norm();
}

}  // namespace rvd
