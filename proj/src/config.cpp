#include "sensing/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sensing {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + text + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

const std::vector<std::string> kKnownKeys = {
    "sir_db",        "snr_db",        "n_samples",       "trials",
    "seed",          "modulation",    "detector",        "target_pf",
    "thresholds",    "threshold_count", "threshold_min", "threshold_max",
    "estimation",    "sampling",        "sim_sigma_n_scale"};

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig config;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    config.values_[key] = value;
  }
  return config;
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

double KeyValueConfig::require_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config key '" + key + "' is required");
  return parse_double(key, it->second);
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return l;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" +
                      it->second + "'");
  }
}

void KeyValueConfig::reject_unknown_keys(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

RunSettings RunSettings::from_config(const KeyValueConfig& config) {
  config.reject_unknown_keys(kKnownKeys);

  RunSettings rs;
  try {
    ScenarioParams params;
    params.sir_db = config.require_double("sir_db");
    params.snr_db = config.require_double("snr_db");
    params.n_samples = static_cast<int>(config.get_long("n_samples", 142));

    rs.modulation = config.get_string("modulation", "qam4");
    if (rs.modulation == "qam4") {
      params.modulation_policy = ModulationPolicy::fixed(ModulationName::QAM4);
    } else if (rs.modulation == "qam16") {
      params.modulation_policy = ModulationPolicy::fixed(ModulationName::QAM16);
    } else if (rs.modulation == "qam64") {
      params.modulation_policy = ModulationPolicy::fixed(ModulationName::QAM64);
    } else if (rs.modulation == "uniform") {
      params.modulation_policy = ModulationPolicy::uniform_over_formats();
    } else {
      throw ConfigError("modulation must be qam4|qam16|qam64|uniform");
    }
    rs.scenario = build_scenario(params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const std::string detector = config.get_string("detector", "ed1");
  if (detector == "ed1") {
    rs.detector.variant = DetectorVariant::ED1;
  } else if (detector == "ed2_exact") {
    rs.detector.variant = DetectorVariant::ED2Exact;
  } else if (detector == "ed2_linear") {
    rs.detector.variant = DetectorVariant::ED2Linear;
  } else if (detector == "mpt") {
    rs.detector.variant = DetectorVariant::MPT;
  } else if (detector == "type1_ed") {
    rs.detector.variant = DetectorVariant::Type1Ed;
  } else {
    throw ConfigError("detector must be ed1|ed2_exact|ed2_linear|mpt|type1_ed");
  }

  rs.trials = config.get_long("trials", 10000);
  if (rs.trials < 100) throw ConfigError("trials must be >= 100");
  rs.seed = config.get_u64("seed", 1);
  rs.target_pf = config.get_double("target_pf", 0.05);
  rs.sim_sigma_n_scale = config.get_double("sim_sigma_n_scale", 1.0);
  if (!(rs.sim_sigma_n_scale > 0.0)) throw ConfigError("sim_sigma_n_scale must be > 0");

  rs.estimation_name = config.get_string("estimation", "ideal");
  if (rs.estimation_name == "ideal") {
    rs.estimation = TrialPlan::Estimation::Ideal;
  } else if (rs.estimation_name == "nmse") {
    rs.estimation = TrialPlan::Estimation::NmseModel;
  } else {
    throw ConfigError("estimation must be ideal|nmse");
  }

  rs.sampling_name = config.get_string("sampling", "symbol");
  if (rs.sampling_name == "symbol") {
    rs.sampling = TrialPlan::Sampling::SymbolLevel;
  } else if (rs.sampling_name == "law") {
    rs.sampling = TrialPlan::Sampling::ConditionalLaw;
  } else {
    throw ConfigError("sampling must be symbol|law");
  }

  if (config.has("thresholds")) {
    rs.thresholds = parse_double_list("thresholds", config.get_string("thresholds", ""));
  } else if (config.has("threshold_count")) {
    const long count = config.get_long("threshold_count", 0);
    const double lo = config.require_double("threshold_min");
    const double hi = config.require_double("threshold_max");
    if (count < 1) throw ConfigError("threshold_count must be >= 1");
    if (!(hi >= lo)) throw ConfigError("threshold_max must be >= threshold_min");
    for (long i = 0; i < count; ++i) {
      const double w = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      rs.thresholds.push_back(lo + w * (hi - lo));
    }
  }
  std::sort(rs.thresholds.begin(), rs.thresholds.end());

  rs.detector.threshold_param =
      rs.thresholds.empty() ? rs.target_pf : rs.thresholds.front();
  if (rs.detector.variant == DetectorVariant::ED1 && rs.thresholds.empty()) {
    rs.detector.threshold_param = 0.0;
  }
  try {
    validate(rs.detector);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rs;
}

TrialPlan RunSettings::make_plan() const {
  TrialPlan plan;
  plan.scenario = scenario;
  plan.scenario.sigma_n_sq *= sim_sigma_n_scale;
  plan.detector = detector;
  plan.trials = trials;
  plan.seed = seed;
  plan.estimation = estimation;
  plan.sampling = sampling;
  plan.pair = detector.variant == DetectorVariant::Type1Ed
                  ? TrialPlan::HypothesisPair::Type1
                  : TrialPlan::HypothesisPair::Type2;
  return plan;
}

std::vector<std::pair<std::string, std::string>> RunSettings::describe() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("detector", to_string(detector.variant));
  kv.emplace_back("sigma1_sq", format_double(scenario.sigma1_sq));
  kv.emplace_back("sigma2_sq", format_double(scenario.sigma2_sq));
  kv.emplace_back("sigma_n_sq", format_double(scenario.sigma_n_sq));
  kv.emplace_back("symbol_energy", format_double(scenario.symbol_energy));
  kv.emplace_back("n_samples", std::to_string(scenario.n_samples));
  kv.emplace_back("modulation", modulation);
  kv.emplace_back("trials", std::to_string(trials));
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("estimation", estimation_name);
  kv.emplace_back("sampling", sampling_name);
  kv.emplace_back("target_pf", format_double(target_pf));
  if (sim_sigma_n_scale != 1.0) {
    kv.emplace_back("sim_sigma_n_scale", format_double(sim_sigma_n_scale));
  }
  std::string ts;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i) ts += ',';
    ts += format_double(thresholds[i]);
  }
  kv.emplace_back("thresholds", ts);
  return kv;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace sensing
