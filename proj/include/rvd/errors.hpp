#pragma once

#include <stdexcept>
#include <string>

namespace rvd {

/// Bad user-supplied configuration or parameter (invalid inertia, pole set, ...).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Geometry left the model's domain (nonpositive radius, chaser at Earth's center).
class GeometryError : public std::domain_error {
 public:
  explicit GeometryError(const std::string& msg) : std::domain_error(msg) {}
};

/// Reduced-quaternion vector part reached or left the unit ball (q0 = 0 singularity).
class SingularAttitudeError : public std::domain_error {
 public:
  explicit SingularAttitudeError(const std::string& msg) : std::domain_error(msg) {}
};

/// Pole assignment could not be completed (uncontrollable mode, degenerate or
/// ill-conditioned eigenvector selection).
class PoleAssignmentError : public std::runtime_error {
 public:
  explicit PoleAssignmentError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative numeric routine failed to converge.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rvd
