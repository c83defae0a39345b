#include "rvd/mpc_controller.hpp"

#include <Eigen/Eigenvalues>

#include "rvd/errors.hpp"

namespace rvd {

void ControllerConfig::validate() const {
  poles.validate();
  if (!(sample_period > 0.0)) {
    throw ConfigError("controller sample period must be positive");
  }
}

StabilityReport pointwise_stability_check(const Mat12& A_closed, double mu_margin) {
  StabilityReport r;
  Eigen::EigenSolver<Mat12> es(A_closed, /*computeEigenvectors=*/false);
  r.max_real_eig = es.eigenvalues().real().maxCoeff();
  r.norm = A_closed.jacobiSvd().singularValues()(0);
  r.pass = r.max_real_eig <= -mu_margin;
  return r;
}

MpcController::MpcController(const PlantModel& model, const ControllerConfig& config)
    : model_(model), config_(config) {
  config_.validate();
  if (config_.poles.size() != 12) {
    throw ConfigError("the docking plant requires exactly 12 poles");
  }
  b_qr_ = decompose_input_matrix(model_.input_matrix());
}

ControlCommand MpcController::step(const RelativeState& state, const OrbitState& orbit,
                                   const TargetAttitudeState& target) {
  ControlCommand cmd;

  const Vec3 n_t = gravity_offset(orbit.r_c, orbit.r_t, model_.params().m_c, model_.mu());
  const Quaternion q_full = state.qv.to_quaternion();
  const Vec3 n_r = attitude_offset(q_full, target, model_.params().J_c, model_.params().J_t);
  cmd.u1 = feedforward(n_t, n_r, model_.allocation());

  if (config_.feedforward_only) {
    cmd.f_a = cmd.u1;
    return cmd;
  }

  const PlantMatrices plant = model_.assemble(state, orbit, target);

  if (config_.pole_hold && last_gain_) {
    cmd.gain = *last_gain_;
    cmd.gain_reused = true;
  } else {
    try {
      cmd.gain = assign_poles(plant.A, b_qr_, config_.poles);
      last_gain_ = cmd.gain;
    } catch (const PoleAssignmentError&) {
      if (!last_gain_) {
        throw;  // nothing to fall back on at the first step
      }
      cmd.gain = *last_gain_;
      cmd.gain_reused = true;
    }
  }

  cmd.u2 = cmd.gain.K * state.to_vector();
  cmd.f_a = cmd.u1 + cmd.u2;
  A_closed_ = plant.A + plant.B * cmd.gain.K;
  return cmd;
}

}  // namespace rvd
