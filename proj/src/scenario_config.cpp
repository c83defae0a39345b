#include "rvd/scenario_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rvd/errors.hpp"

namespace rvd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) {
    return "";
  }
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (kv.entries_.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
    kv.entries_[key] = Entry{value, line_no, false};
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const { return entries_.count(key) > 0; }

const KeyValueFile::Entry& KeyValueFile::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  }
  it->second.read = true;
  return it->second;
}

void KeyValueFile::fail(const std::string& key, const std::string& why) const {
  const auto it = entries_.find(key);
  const std::string loc =
      it == entries_.end() ? origin_ : origin_ + ":" + std::to_string(it->second.line);
  throw ConfigError(loc + ": key '" + key + "' " + why);
}

double KeyValueFile::scalar(const std::string& key) const {
  const Entry& e = require(key);
  std::istringstream in(e.raw);
  double v = 0.0;
  std::string extra;
  if (!(in >> v) || (in >> extra)) {
    fail(key, "expected a single number, got '" + e.raw + "'");
  }
  return v;
}

double KeyValueFile::scalar_or(const std::string& key, double fallback) const {
  return has(key) ? scalar(key) : fallback;
}

bool KeyValueFile::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) {
    return fallback;
  }
  const double v = scalar(key);
  if (v != 0.0 && v != 1.0) {
    fail(key, "expected a 0/1 flag");
  }
  return v != 0.0;
}

std::uint64_t KeyValueFile::uint_or(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) {
    return fallback;
  }
  const Entry& e = require(key);
  std::istringstream in(e.raw);
  std::uint64_t v = 0;
  std::string extra;
  if (!(in >> v) || (in >> extra)) {
    fail(key, "expected an unsigned integer, got '" + e.raw + "'");
  }
  return v;
}

std::vector<double> KeyValueFile::vector(const std::string& key, int expected_size) const {
  const Entry& e = require(key);
  std::istringstream in(e.raw);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) {
    out.push_back(v);
  }
  if (!in.eof()) {
    fail(key, "contains a non-numeric token: '" + e.raw + "'");
  }
  if (expected_size >= 0 && static_cast<int>(out.size()) != expected_size) {
    fail(key, "expected " + std::to_string(expected_size) + " numbers, got " +
                  std::to_string(out.size()));
  }
  return out;
}

std::vector<double> KeyValueFile::vector_or(const std::string& key,
                                            const std::vector<double>& fallback,
                                            int expected_size) const {
  return has(key) ? vector(key, expected_size) : fallback;
}

std::vector<std::string> KeyValueFile::unread_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_) {
    if (!entry.read) {
      out.push_back(key);
    }
  }
  return out;
}

namespace {

Vec3 to_vec3(const std::vector<double>& v) { return Vec3(v[0], v[1], v[2]); }

Mat3 to_mat3(const std::vector<double>& v) {
  Mat3 m;
  m << v[0], v[1], v[2],
       v[3], v[4], v[5],
       v[6], v[7], v[8];
  return m;
}

void reject_unread(const KeyValueFile& kv) {
  const auto unread = kv.unread_keys();
  if (!unread.empty()) {
    std::string msg = kv.origin() + ": unknown key(s):";
    for (const auto& k : unread) {
      msg += " '" + k + "'";
    }
    throw ConfigError(msg);
  }
}

}  // namespace

ScenarioConfig scenario_from_keyvalues(const KeyValueFile& kv) {
  ScenarioConfig cfg;

  cfg.orbit.semi_major_axis = kv.scalar("orbit.semi_major_axis_m");
  cfg.orbit.eccentricity = kv.scalar_or("orbit.eccentricity", 0.0);
  cfg.orbit.true_anomaly_0 = kv.scalar_or("orbit.true_anomaly0_rad", 0.0);
  cfg.orbit.mu = kv.scalar_or("orbit.mu_m3s2", 3.986004418e14);

  cfg.params.m_c = kv.scalar("chaser.mass_kg");
  cfg.params.J_c = to_mat3(kv.vector("chaser.inertia_kgm2", 9));
  cfg.params.J_t = to_mat3(kv.vector("target.inertia_kgm2", 9));
  const auto arms = kv.vector("thruster.lever_arms_m", 3);
  cfg.params.L1 = arms[0];
  cfg.params.L2 = arms[1];
  cfg.params.L3 = arms[2];

  const auto q_t = kv.vector_or("target.q_i_tb_wxyz", {1, 0, 0, 0}, 4);
  cfg.target_motion.q_i_tb0 = Quaternion(q_t[0], q_t[1], q_t[2], q_t[3]).normalized();
  cfg.target_motion.w_tb = to_vec3(kv.vector_or("target.w_tb_rads", {0, 0, 0}, 3));

  cfg.initial_state.p = to_vec3(kv.vector("initial.p_m", 3));
  cfg.initial_state.r = to_vec3(kv.vector("initial.pdot_ms", 3));
  const auto q0 = kv.vector("initial.q_wxyz", 4);
  cfg.initial_state.qv =
      ReducedQuaternion::from_quaternion(Quaternion(q0[0], q0[1], q0[2], q0[3]));
  cfg.initial_state.w = to_vec3(kv.vector("initial.w_rads", 3));

  cfg.controller.poles = PoleSet(kv.vector("controller.poles", -1));
  cfg.controller.sample_period = kv.scalar_or("controller.sample_period_s", 0.1);
  cfg.controller.pole_hold = kv.flag_or("controller.pole_hold", false);
  cfg.controller.feedforward_only = kv.flag_or("controller.feedforward_only", false);

  cfg.model.paper_verbatim_stiffness = kv.flag_or("model.paper_verbatim_stiffness", false);
  cfg.model.finite_difference_velocity =
      kv.flag_or("model.finite_difference_velocity", false);

  cfg.duration = kv.scalar_or("sim.duration_s", 80.0);
  cfg.integrator_step = kv.scalar_or("sim.integrator_step_s", 0.01);
  cfg.disturbance_fraction = kv.scalar_or("sim.disturbance_fraction", 0.0);
  cfg.seed = kv.uint_or("sim.seed", 1);
  cfg.kappa_baseline_stride =
      static_cast<int>(kv.scalar_or("sim.kappa_baseline_stride", 0.0));

  cfg.settle.position = kv.scalar_or("metrics.settle_band_pos_m", 0.05);
  cfg.settle.velocity = kv.scalar_or("metrics.settle_band_vel_ms", 0.05);
  cfg.settle.attitude = kv.scalar_or("metrics.settle_band_att", 0.01);
  cfg.settle.rate = kv.scalar_or("metrics.settle_band_rate_rads", 0.01);

  reject_unread(kv);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_keyvalues(KeyValueFile::parse_file(path));
}

MonteCarloConfig load_perturbation(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  MonteCarloConfig mc;
  mc.spec.inertia_entry_bound = kv.scalar_or("perturb.inertia_entry_bound_kgm2", 0.0);
  mc.spec.lever_arm_bound = kv.scalar_or("perturb.lever_arm_bound_m", 0.0);
  mc.spec.disturbance_fraction = kv.scalar_or("perturb.disturbance_fraction", 0.0);
  mc.options.converge_p_norm = kv.scalar_or("perturb.converge_p_norm_m", 0.1);
  mc.options.converge_q_norm = kv.scalar_or("perturb.converge_q_norm", 0.02);
  reject_unread(kv);
  if (mc.spec.inertia_entry_bound < 0 || mc.spec.lever_arm_bound < 0 ||
      mc.spec.disturbance_fraction < 0) {
    throw ConfigError(path + ": perturbation bounds must be non-negative");
  }
  return mc;
}

std::string canonical_text(const ScenarioConfig& cfg) {
  std::map<std::string, std::string> kv;
  auto put = [&](const std::string& key, double v) { kv[key] = format_value(v); };
  auto put_seq = [&](const std::string& key, const auto& vec, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      if (i) {
        s += " ";
      }
      s += format_value(vec(i));
    }
    kv[key] = s;
  };

  put("orbit.semi_major_axis_m", cfg.orbit.semi_major_axis);
  put("orbit.eccentricity", cfg.orbit.eccentricity);
  put("orbit.true_anomaly0_rad", cfg.orbit.true_anomaly_0);
  put("orbit.mu_m3s2", cfg.orbit.mu);
  put("chaser.mass_kg", cfg.params.m_c);
  put_seq("chaser.inertia_kgm2", Eigen::VectorXd(cfg.params.J_c.reshaped<Eigen::RowMajor>()),
          9);
  put_seq("target.inertia_kgm2", Eigen::VectorXd(cfg.params.J_t.reshaped<Eigen::RowMajor>()),
          9);
  const Vec3 arms(cfg.params.L1, cfg.params.L2, cfg.params.L3);
  put_seq("thruster.lever_arms_m", arms, 3);
  Vec4 qt;
  qt << cfg.target_motion.q_i_tb0.q0, cfg.target_motion.q_i_tb0.qv;
  put_seq("target.q_i_tb_wxyz", qt, 4);
  put_seq("target.w_tb_rads", cfg.target_motion.w_tb, 3);
  put_seq("initial.p_m", cfg.initial_state.p, 3);
  put_seq("initial.pdot_ms", cfg.initial_state.r, 3);
  Vec4 q0;
  q0 << cfg.initial_state.qv.q0(), cfg.initial_state.qv.qv;
  put_seq("initial.q_wxyz", q0, 4);
  put_seq("initial.w_rads", cfg.initial_state.w, 3);
  put_seq("controller.poles",
          Eigen::Map<const Eigen::VectorXd>(cfg.controller.poles.lambdas.data(),
                                            cfg.controller.poles.size()),
          cfg.controller.poles.size());
  put("controller.sample_period_s", cfg.controller.sample_period);
  put("controller.pole_hold", cfg.controller.pole_hold ? 1.0 : 0.0);
  put("controller.feedforward_only", cfg.controller.feedforward_only ? 1.0 : 0.0);
  put("model.paper_verbatim_stiffness", cfg.model.paper_verbatim_stiffness ? 1.0 : 0.0);
  put("model.finite_difference_velocity",
      cfg.model.finite_difference_velocity ? 1.0 : 0.0);
  put("sim.duration_s", cfg.duration);
  put("sim.integrator_step_s", cfg.integrator_step);
  put("sim.disturbance_fraction", cfg.disturbance_fraction);
  kv["sim.seed"] = std::to_string(cfg.seed);
  put("sim.kappa_baseline_stride", cfg.kappa_baseline_stride);
  put("metrics.settle_band_pos_m", cfg.settle.position);
  put("metrics.settle_band_vel_ms", cfg.settle.velocity);
  put("metrics.settle_band_att", cfg.settle.attitude);
  put("metrics.settle_band_rate_rads", cfg.settle.rate);

  std::string out;
  for (const auto& [key, value] : kv) {
    out += key + " = " + value + "\n";
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rvd
