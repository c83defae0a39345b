#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rvd/sim_harness.hpp"

namespace rvd {

/// Parsed flat key/value config file (dotted sections, '#' comments,
/// whitespace-separated numeric vectors). Keeps source line numbers so
/// validation errors can point at the offending entry.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& key) const;
  double scalar(const std::string& key) const;
  double scalar_or(const std::string& key, double fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::uint64_t uint_or(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> vector(const std::string& key, int expected_size) const;
  std::vector<double> vector_or(const std::string& key, const std::vector<double>& fallback,
                                int expected_size) const;

  /// Keys present in the file but never read; used to reject typos.
  std::vector<std::string> unread_keys() const;
  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string raw;
    int line{0};
    mutable bool read{false};
  };
  std::map<std::string, Entry> entries_;
  std::string origin_;

  const Entry& require(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;
};

/// Build the scenario from a config file; rejects unknown keys.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig scenario_from_keyvalues(const KeyValueFile& kv);

/// Monte Carlo perturbation file (perturb.* keys) plus convergence thresholds.
struct MonteCarloConfig {
  PerturbationSpec spec;
  MonteCarloOptions options;
};
MonteCarloConfig load_perturbation(const std::string& path);

/// Canonical serialization of the resolved config: sorted keys, 17 significant
/// digits. The manifest digest is computed over this text, so it changes iff
/// any resolved field changes.
std::string canonical_text(const ScenarioConfig& cfg);

/// FNV-1a 64-bit over a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace rvd
