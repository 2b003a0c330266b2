#pragma once

#include <iosfwd>
#include <optional>

#include "lorange/config.hpp"
#include "lorange/evaluate.hpp"
#include "lorange/fit.hpp"
#include "lorange/synth.hpp"

namespace lorange {

struct PreprocessStats {
  std::size_t n_input = 0;
  std::size_t n_duplicates_removed = 0;
  std::size_t n_sf_removed = 0;
  std::size_t n_anomaly_train_dropped = 0;
  std::size_t n_anomaly_test_dropped = 0;
};

struct PreparedData {
  GeometryMap geometry;
  std::vector<UplinkRecord> train;  // cleaned, time-sorted
  std::vector<UplinkRecord> test;   // time-sorted
  PreprocessStats stats;
};

// dedup -> SF retention -> chronological split -> device-wise anomaly
// filtering on the training side (and optionally the test side).
PreparedData preprocess(Campaign campaign, const RunConfig& config);

// Loads uplinks_*.csv from data_dir plus the configured geometry file.
Campaign load_dataset(const RunConfig& config);

void run_synth(const RunConfig& config, std::ostream& console);

struct FitOutcome {
  std::vector<ModelCoefficients> models;
  PreprocessStats stats;
};

// Fits every configured variant on the training split, attaches test
// metrics and writes model_<variant>.txt files into the model directory.
FitOutcome run_fit(const RunConfig& config, std::ostream& console,
                   std::optional<Campaign> preloaded = std::nullopt);

struct EvalOutcome {
  EvaluationReport report;
  double mean_latency_us_per_packet = 0.0;
  std::size_t n_test_packets = 0;
};

// Loads the fitted models, ranges every test packet per variant, writes the
// report files (and optionally per-packet estimate CSVs) into out_dir.
EvalOutcome run_eval(const RunConfig& config, std::ostream& console,
                     std::optional<Campaign> preloaded = std::nullopt);

// fit + eval on an externally supplied dataset directory.
EvalOutcome run_replay(const RunConfig& config,
                       const std::string& dataset_dir, std::ostream& console);

struct BenchResult {
  double mean_us_per_packet = 0.0;
  double std_us_per_packet = 0.0;
  std::size_t n_packets = 0;
  int n_runs = 0;
  double first_decile_us_per_packet = 0.0;
  double last_decile_us_per_packet = 0.0;
};

// 10 timed passes of filter + path loss formation + inversion over the
// test stream.
BenchResult run_bench(const RunConfig& config, std::ostream& console);

}  // namespace lorange
