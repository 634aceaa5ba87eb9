#include "sensing/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "sensing/analysis.hpp"
#include "sensing/config.hpp"
#include "sensing/montecarlo.hpp"
#include "sensing/version.hpp"

namespace sensing::cli {

namespace {

std::string field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_manifest(std::ostream& out, const std::string& command,
                    const RunSettings& settings, double duration_seconds) {
  out << "# " << kToolName << " " << command << " v" << kToolVersion << "\n";
  for (const auto& [key, value] : settings.describe()) {
    out << "# " << key << "=" << value << "\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", duration_seconds);
  out << "# duration_seconds=" << buf << "\n";
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int report_error(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << "\n";
  return code;
}

}  // namespace

int cmd_roc(const std::string& config_path, const std::string& output_path) {
  try {
    const RunSettings settings = RunSettings::from_config(KeyValueConfig::parse_file(config_path));
    if (settings.thresholds.empty()) {
      throw ConfigError("roc requires a thresholds list (or threshold_count with a range)");
    }
    Stopwatch watch;
    TrialPlan plan = settings.make_plan();
    RocCurve curve;
    try {
      curve = roc_sweep(plan, settings.thresholds, true);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    std::ofstream out(output_path);
    if (!out) throw ConfigError("cannot open output file: " + output_path);
    write_manifest(out, "roc", settings, watch.seconds());
    out << "threshold,pf_analytic,pd_analytic,pf_mc,pf_ci_low,pf_ci_high,"
           "pd_mc,pd_ci_low,pd_ci_high\n";
    for (const RocPoint& p : curve.points) {
      out << format_double(p.threshold_param) << ',' << field(p.pf_analytic) << ','
          << field(p.pd_analytic) << ',' << format_double(p.pf_mc.p_hat) << ','
          << format_double(p.pf_mc.ci_low) << ',' << format_double(p.pf_mc.ci_high)
          << ',' << format_double(p.pd_mc.p_hat) << ','
          << format_double(p.pd_mc.ci_low) << ',' << format_double(p.pd_mc.ci_high)
          << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_error(e, kExitConfigError);
  } catch (const NumericalError& e) {
    return report_error(e, kExitNumericalError);
  } catch (const std::exception& e) {
    return report_error(e, kExitNumericalError);
  }
}

int cmd_validate(const std::string& config_path, const std::string& output_path) {
  try {
    const RunSettings settings = RunSettings::from_config(KeyValueConfig::parse_file(config_path));
    if (settings.detector.variant != DetectorVariant::ED1 &&
        settings.detector.variant != DetectorVariant::ED2Linear) {
      throw ConfigError("validate supports detector=ed1 or detector=ed2_linear");
    }
    if (settings.thresholds.empty()) {
      throw ConfigError("validate requires a thresholds list");
    }

    Stopwatch watch;
    // Monte-Carlo side from the plan (which honors the sim_sigma_n_scale
    // hook); analytic side always from the configured scenario.
    TrialPlan plan = settings.make_plan();
    RocCurve curve;
    try {
      curve = roc_sweep(plan, settings.thresholds, false);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    long passed = 0;
    std::ostringstream rows;
    for (const RocPoint& p : curve.points) {
      double pf_ref = 0.0, pd_ref = 0.0;
      if (settings.detector.variant == DetectorVariant::ED1) {
        pf_ref = pf_ed1_closed(p.threshold_param, settings.scenario).value;
        pd_ref = pd_ed1(p.threshold_param, settings.scenario).value;
      } else {
        pf_ref = pf_ed2_linear(p.threshold_param, settings.scenario).value;
        pd_ref = pd_ed2_linear(p.threshold_param, settings.scenario).value;
      }
      const bool pf_ok = pf_ref >= p.pf_mc.ci_low && pf_ref <= p.pf_mc.ci_high;
      const bool pd_ok = pd_ref >= p.pd_mc.ci_low && pd_ref <= p.pd_mc.ci_high;
      const bool row_ok = pf_ok && pd_ok;
      if (row_ok) ++passed;
      rows << format_double(p.threshold_param) << ',' << format_double(pf_ref) << ','
           << format_double(pd_ref) << ',' << format_double(p.pf_mc.p_hat) << ','
           << format_double(p.pf_mc.ci_low) << ',' << format_double(p.pf_mc.ci_high)
           << ',' << format_double(p.pd_mc.p_hat) << ','
           << format_double(p.pd_mc.ci_low) << ',' << format_double(p.pd_mc.ci_high)
           << ',' << (row_ok ? "pass" : "fail") << '\n';
    }

    std::ofstream out(output_path);
    if (!out) throw ConfigError("cannot open output file: " + output_path);
    write_manifest(out, "validate", settings, watch.seconds());
    out << "threshold,pf_analytic,pd_analytic,pf_mc,pf_ci_low,pf_ci_high,"
           "pd_mc,pd_ci_low,pd_ci_high,pass\n";
    out << rows.str();

    const double frac =
        static_cast<double>(passed) / static_cast<double>(curve.points.size());
    std::cout << "validate: " << passed << "/" << curve.points.size()
              << " rows within the Wilson interval\n";
    return frac >= 0.9 ? kExitOk : kExitValidationFailed;
  } catch (const ConfigError& e) {
    return report_error(e, kExitConfigError);
  } catch (const NumericalError& e) {
    return report_error(e, kExitNumericalError);
  } catch (const std::exception& e) {
    return report_error(e, kExitNumericalError);
  }
}

int cmd_calibrate(const std::string& variant, double target_pf,
                  const std::string& config_path, std::ostream& out) {
  try {
    if (!(target_pf > 0.0 && target_pf < 1.0)) {
      throw ConfigError("target_pf must be in (0,1)");
    }
    const RunSettings settings = RunSettings::from_config(KeyValueConfig::parse_file(config_path));

    DetectorVariant v;
    std::string param_name;
    if (variant == "ed1") {
      v = DetectorVariant::ED1;
      param_name = "t1";
    } else if (variant == "ed2_linear") {
      v = DetectorVariant::ED2Linear;
      param_name = "t2";
    } else if (variant == "ed2_exact") {
      v = DetectorVariant::ED2Exact;
      param_name = "delta";
    } else if (variant == "type1_ed") {
      v = DetectorVariant::Type1Ed;
      param_name = "delta";
    } else {
      throw ConfigError("calibrate supports ed1|ed2_exact|ed2_linear|type1_ed");
    }

    const double param = calibrate_threshold(v, target_pf, settings.scenario);
    double achieved = target_pf;
    if (v == DetectorVariant::ED1) {
      achieved = pf_ed1_closed(param, settings.scenario).value;
    } else if (v == DetectorVariant::ED2Linear) {
      achieved = pf_ed2_linear(param, settings.scenario).value;
    }

    out << "variant=" << variant << "\n";
    out << "target_pf=" << format_double(target_pf) << "\n";
    out << param_name << "=" << format_double(param) << "\n";
    out << "achieved_pf=" << format_double(achieved) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_error(e, kExitConfigError);
  } catch (const CalibrationError& e) {
    return report_error(e, kExitUnreachableTarget);
  } catch (const std::invalid_argument& e) {
    return report_error(e, kExitConfigError);
  } catch (const NumericalError& e) {
    return report_error(e, kExitNumericalError);
  } catch (const std::exception& e) {
    return report_error(e, kExitNumericalError);
  }
}

int cmd_specfun(const std::string& name, std::span<const std::string> args,
                std::ostream& out) {
  try {
    const auto arg = [&](std::size_t i) -> double {
      if (i >= args.size()) throw ConfigError("specfun " + name + ": missing argument");
      try {
        std::size_t pos = 0;
        const double v = std::stod(args[i], &pos);
        if (pos != args[i].size()) throw std::invalid_argument("trailing characters");
        return v;
      } catch (const std::exception&) {
        throw ConfigError("specfun: cannot parse argument '" + args[i] + "'");
      }
    };
    const auto order = [&](std::size_t i) -> int {
      const double v = arg(i);
      const int n = static_cast<int>(v);
      if (static_cast<double>(n) != v || n < 1) {
        throw ConfigError("specfun: order must be a positive integer");
      }
      return n;
    };

    double value = 0.0;
    if (name == "marcum_q") {
      if (args.size() != 3) throw ConfigError("usage: specfun marcum_q N a b");
      value = marcum_q(order(0), arg(1), arg(2));
    } else if (name == "chi2_sf") {
      if (args.size() != 2) throw ConfigError("usage: specfun chi2_sf N t");
      value = central_chi2_sf(order(0), arg(1));
    } else if (name == "inv_marcum_q") {
      if (args.size() != 3) throw ConfigError("usage: specfun inv_marcum_q N lambda delta");
      value = inv_marcum_q_threshold(order(0), arg(1), arg(2));
    } else {
      throw ConfigError("specfun supports marcum_q|chi2_sf|inv_marcum_q");
    }
    out << format_double(value) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_error(e, kExitConfigError);
  } catch (const std::invalid_argument& e) {
    return report_error(e, kExitConfigError);
  } catch (const NumericalError& e) {
    return report_error(e, kExitNumericalError);
  } catch (const std::exception& e) {
    return report_error(e, kExitNumericalError);
  }
}

}  // namespace sensing::cli
