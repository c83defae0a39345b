#pragma once

#include <optional>

#include "rvd/relative_dynamics.hpp"
#include "rvd/robpole.hpp"

namespace rvd {

/// Controller settings; model flags live in ModelOptions on the plant.
struct ControllerConfig {
  PoleSet poles;
  double sample_period{0.1};  ///< [s], zero-order hold between samples
  bool pole_hold{false};      ///< reuse K between samples instead of re-synthesizing
  bool feedforward_only{false};  ///< emit u1 only (offset cancellation studies)

  void validate() const;
};

/// One emitted thruster command with its synthesis diagnostics.
struct ControlCommand {
  Vec6 f_a{Vec6::Zero()};  ///< thruster command, f_a = u1 + u2
  Vec6 u1{Vec6::Zero()};   ///< feedforward part, G^+ [n_t; n_r]
  Vec6 u2{Vec6::Zero()};   ///< feedback part, K x
  GainResult gain;         ///< snapshot of the pole assignment
  bool gain_reused{false};  ///< true when a previous K was held (pole_hold or fallback)
};

/// Pointwise eigenvalue check of a closed-loop matrix.
struct StabilityReport {
  double max_real_eig{0.0};  ///< max Re(lambda) over eig(A_closed)
  double norm{0.0};          ///< ||A_closed||_2
  bool pass{false};          ///< max_real_eig <= -mu_margin
};

StabilityReport pointwise_stability_check(const Mat12& A_closed, double mu_margin);

/// Per-sample controller: read the measurements, assemble the plant, cancel
/// the offset, synthesize K by robust pole assignment, and emit
/// f_a = u1 + K x. One instance drives one simulation run.
class MpcController {
 public:
  MpcController(const PlantModel& model, const ControllerConfig& config);

  const ControllerConfig& config() const { return config_; }

  /// One Algorithm-1 iteration. On synthesis failure after the first step the
  /// previous gain is held and the command flagged; a first-step failure
  /// propagates.
  ControlCommand step(const RelativeState& state, const OrbitState& orbit,
                      const TargetAttitudeState& target);

  /// Closed-loop matrix A + B K for the most recent step.
  const Mat12& closed_loop() const { return A_closed_; }

 private:
  const PlantModel& model_;
  ControllerConfig config_;
  InputDecomposition b_qr_;  // Step 1, done once: B is constant
  std::optional<GainResult> last_gain_;
  Mat12 A_closed_{Mat12::Zero()};
};

}  // namespace rvd
