#include "balaw/errors.hpp"
#include "balaw/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

enum ExitCode { kSuccess = 0, kSuiteFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

void print_results(const balaw::RunReport& report) {
  for (const balaw::CalibrationResult& c : report.calibrations)
    std::printf("calibration %-16s %s  C0=%g kappa1=%g kappa2=%g (rounds %d)\n", c.preset.c_str(),
                c.certified ? "certified" : "NOT certified", c.constants.C0, c.constants.kappa1, c.constants.kappa2,
                c.rounds);
  for (const balaw::SuiteResult& r : report.results) {
    std::printf("%-4s %-24s %-16s", r.passed ? "PASS" : "FAIL", r.suite.c_str(), r.preset.c_str());
    for (const std::string& n : r.notes) std::printf("  [%s]", n.c_str());
    std::printf("\n");
  }
  std::printf("outputs in %s\n", report.directory.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for balance laws with non-local sources"};
  app.require_subcommand(1);
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run every suite listed in a config file");
  run->add_option("config", config_path, "Config file")->required();
  app.add_subcommand("list-suites", "Print the available suites");
  CLI::App* calibrate = app.add_subcommand("calibrate", "Search functional constants for the configured presets");
  calibrate->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kSuccess : kConfigError;
  }

  try {
    if (app.got_subcommand("list-suites")) {
      for (const std::string& name : balaw::suite_names()) std::printf("%s\n", name.c_str());
      return kSuccess;
    }
    const balaw::ExperimentConfig cfg = balaw::load_experiment(config_path);
    if (app.got_subcommand("calibrate")) {
      bool ok = true;
      for (const balaw::CalibrationResult& c : balaw::run_calibration(cfg)) {
        std::printf("%-16s %s  C0=%g kappa1=%g kappa2=%g  K_upsilon=%.3g K_phi=%.3g (rounds %d)\n",
                    c.preset.c_str(), c.certified ? "certified" : "NOT certified", c.constants.C0,
                    c.constants.kappa1, c.constants.kappa2, c.ladder.k_upsilon, c.ladder.k_phi, c.rounds);
        ok = ok && c.certified;
      }
      return ok ? kSuccess : kSuiteFailure;
    }
    const balaw::RunReport report = balaw::run_experiment(cfg);
    print_results(report);
    return report.passed() ? kSuccess : kSuiteFailure;
  } catch (const balaw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const balaw::UnknownSuite& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const balaw::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
