#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sensing/montecarlo.hpp"

namespace sensing {

// Bad or missing configuration; maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Flat key=value text. '#' starts a comment; blank lines are ignored;
// unknown keys are rejected so typos fail loudly.
class KeyValueConfig {
public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  void reject_unknown_keys(const std::vector<std::string>& known) const;

private:
  std::map<std::string, std::string> values_;
};

// A fully resolved experiment configuration.
struct RunSettings {
  SensingScenario scenario;
  DetectorConfig detector;
  long trials = 10000;
  std::uint64_t seed = 1;
  TrialPlan::Estimation estimation = TrialPlan::Estimation::Ideal;
  TrialPlan::Sampling sampling = TrialPlan::Sampling::SymbolLevel;
  std::vector<double> thresholds;
  double target_pf = 0.05;
  std::string modulation = "qam4";
  std::string estimation_name = "ideal";
  std::string sampling_name = "symbol";
  // Test hook for the validate command: scales the noise variance used by
  // the simulation path only, leaving the analytic path untouched.
  double sim_sigma_n_scale = 1.0;

  static RunSettings from_config(const KeyValueConfig& config);

  TrialPlan make_plan() const;

  // Resolved key=value view, suitable for a manifest.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

// Full round-trip decimal formatting.
std::string format_double(double v);

}  // namespace sensing
