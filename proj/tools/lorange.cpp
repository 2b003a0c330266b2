#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "lorange/errors.hpp"
#include "lorange/kernels.hpp"
#include "lorange/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::map<std::string, std::string> parse_overrides(
    const std::vector<std::string>& sets) {
  std::map<std::string, std::string> overrides;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw lorange::ConfigError("--set expects section.key=value, got '" + s +
                                 "'");
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor LoRaWAN RSSI ranging toolkit: synthetic campaigns, "
               "multi-wall path loss calibration, adaptive RSSI filtering and "
               "distance evaluation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::vector<std::string> set_flags;
  app.add_option("-c,--config", config_path,
                 "key=value config file with [section] headers");
  app.add_option("--set", set_flags,
                 "override a config key (section.key=value); wins over the "
                 "file");

  auto* synth = app.add_subcommand("synth", "generate a synthetic campaign");
  auto* fit = app.add_subcommand(
      "fit", "calibrate the configured model variants on the training split");
  auto* eval = app.add_subcommand(
      "eval", "range the test split per variant and write the report");
  auto* bench = app.add_subcommand(
      "bench", "timed passes of filter + path loss formation + inversion");
  auto* replay = app.add_subcommand(
      "replay", "fit + eval on an externally supplied dataset directory");
  std::string replay_dir;
  replay->add_option("--data-dir", replay_dir,
                     "directory holding uplinks*.csv and geometry.csv")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config =
        lorange::load_config(config_path, parse_overrides(set_flags));
    if (synth->parsed()) {
      lorange::run_synth(config, std::cout);
    } else if (fit->parsed()) {
      lorange::run_fit(config, std::cout);
    } else if (eval->parsed()) {
      lorange::run_eval(config, std::cout);
    } else if (bench->parsed()) {
      lorange::run_bench(config, std::cout);
    } else if (replay->parsed()) {
      lorange::run_replay(config, replay_dir, std::cout);
    }
    return kExitOk;
  } catch (const lorange::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lorange::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const lorange::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
