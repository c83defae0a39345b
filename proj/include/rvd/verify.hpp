#pragma once

#include <string>
#include <vector>

namespace rvd {

enum class VerifyLevel { kQuick, kFull };

struct VerifyCheck {
  std::string group;
  std::string name;
  bool pass{false};
  std::string detail;
};

/// Run the cross-module invariant suites (quaternion consistency, orbit
/// conservation, feedforward exactness, pole-assignment residuals, integrator
/// order, determinism). kFull uses the 1000-case random suites.
std::vector<VerifyCheck> run_verification(VerifyLevel level);

}  // namespace rvd
