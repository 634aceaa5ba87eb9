#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "sensing/commands.hpp"
#include "sensing/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"In-band spectrum sensing: detectors, analytics and Monte-Carlo ROC runs"};
  app.set_version_flag("--version", std::string(sensing::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, output_path;
  auto* roc = app.add_subcommand("roc", "Sweep a detector and write the ROC as CSV");
  roc->add_option("config", config_path, "key=value config file")->required();
  roc->add_option("output", output_path, "output CSV path")->required();

  auto* validate = app.add_subcommand(
      "validate", "Compare analytic and Monte-Carlo rates (ed1, ed2_linear)");
  validate->add_option("config", config_path, "key=value config file")->required();
  validate->add_option("output", output_path, "output CSV path")->required();

  std::string variant;
  double target_pf = 0.05;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Threshold parameter for a target average false alarm");
  calibrate->add_option("variant", variant, "ed1|ed2_exact|ed2_linear|type1_ed")
      ->required();
  calibrate->add_option("target_pf", target_pf, "target false-alarm probability")
      ->required();
  calibrate->add_option("config", config_path, "key=value config file")->required();

  std::string fn_name;
  std::vector<std::string> fn_args;
  auto* specfun = app.add_subcommand("specfun", "Spot-evaluate a special function");
  specfun->add_option("name", fn_name, "marcum_q|chi2_sf|inv_marcum_q")->required();
  specfun->add_option("args", fn_args, "function arguments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return sensing::cli::kExitConfigError;
  }

  if (roc->parsed()) return sensing::cli::cmd_roc(config_path, output_path);
  if (validate->parsed()) return sensing::cli::cmd_validate(config_path, output_path);
  if (calibrate->parsed()) {
    return sensing::cli::cmd_calibrate(variant, target_pf, config_path, std::cout);
  }
  if (specfun->parsed()) return sensing::cli::cmd_specfun(fn_name, fn_args, std::cout);
  return sensing::cli::kExitConfigError;
}
