#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace sensing::cli {

// Exit codes shared by all subcommands:
//   0 success, 1 validation-failure result, 2 config error,
//   3 numerical error, 4 unreachable calibration target.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitUnreachableTarget = 4;

// Sweeps the configured detector and writes the ROC as CSV with a manifest
// header.
int cmd_roc(const std::string& config_path, const std::string& output_path);

// Analytic-vs-Monte-Carlo comparison table for ed1/ed2_linear; exits 0 when
// at least 90% of rows agree within the Wilson interval.
int cmd_validate(const std::string& config_path, const std::string& output_path);

// Prints the threshold parameter reaching the target false alarm.
int cmd_calibrate(const std::string& variant, double target_pf,
                  const std::string& config_path, std::ostream& out);

// Spot evaluation of the special functions (marcum_q, chi2_sf, inv_marcum_q).
int cmd_specfun(const std::string& name, std::span<const std::string> args,
                std::ostream& out);

}  // namespace sensing::cli
