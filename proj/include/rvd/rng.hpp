#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace rvd {

/// Counter-mode SplitMix64. The k-th output is a pure mixing function of
/// seed + k * gamma, so streams are reproducible across platforms and can be
/// split without correlation. std:: distributions are avoided on purpose:
/// their rounding is implementation-defined and would break byte-identical
/// reruns.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (counter_++) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller; draws two uniforms per pair.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    cached_ = r * std::sin(th);
    have_cached_ = true;
    return r * std::cos(th);
  }

  /// Uniformly distributed direction on the unit sphere in R^n.
  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd v(n);
    do {
      for (int i = 0; i < n; ++i) {
        v(i) = normal();
      }
    } while (v.norm() < 1e-12);
    return v / v.norm();
  }

  /// Independent child stream; deterministic function of (seed, index) only.
  CounterRng substream(std::uint64_t index) const {
    std::uint64_t z = seed_ ^ (0x632BE59BD9B4E019ull * (index + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return CounterRng(z ^ (z >> 31));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_{0};
  bool have_cached_{false};
  double cached_{0.0};
};

}  // namespace rvd
