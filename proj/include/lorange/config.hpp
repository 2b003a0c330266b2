#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lorange/fit.hpp"
#include "lorange/kalman.hpp"
#include "lorange/synth.hpp"

namespace lorange {

// Plain-text "[section]" + "key=value" configuration file.
std::map<std::string, std::string> parse_config_text(std::istream& in);

// Fully resolved run configuration. Every key has a default; where the
// underlying method defines a constant the default matches it.
struct RunConfig {
  // [paths]
  std::string data_dir = "data_out";
  std::string geometry;  // empty -> <data_dir>/geometry.csv
  std::string model_dir;  // empty -> <out_dir>
  std::string out_dir = "run_out";

  // [dataset]
  int sf_min = 7;
  int sf_max = 10;
  double train_fraction = 0.8;
  std::int64_t dedup_window_s = 3600;

  // [anomaly]
  int anomaly_n_trees = 100;
  int anomaly_subsample = 256;
  double contamination = 0.01;
  bool anomaly_apply_to_test = false;
  std::uint64_t anomaly_seed = 0;  // defaults to run.seed when not set

  // [kalman]
  FilterParams kalman;

  // [model]
  std::vector<std::string> variants = {"MWM", "MWM-EP", "MWM-EP-KF"};
  int cv_folds = 5;
  double tx_power_dbm = 14.0;

  // [synth]
  SynthConfig synth;

  // [eval]
  double cde_max_m = 50.0;
  double cde_step_m = 0.5;
  bool write_estimates = true;

  // [run]
  std::uint64_t seed = 1;

  std::string geometry_path() const;
  std::string model_dir_path() const;

  FitParams fit_params() const;

  // Canonical sorted key=value dump; identical content implies identical
  // behaviour, so its hash serves as the reproducibility fingerprint.
  std::string canonical_text() const;
  std::string fingerprint() const;  // fnv1a64 of canonical_text, hex
};

// Applies a parsed file then `overrides` (from --set flags, which win) on
// top of the defaults. Unknown keys are ConfigError.
RunConfig resolve_config(const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& overrides);

RunConfig load_config(const std::string& path,
                      const std::map<std::string, std::string>& overrides);

}  // namespace lorange
