#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lorange {

struct DistanceMetrics {
  double rmse_m = 0.0;
  double mae_m = 0.0;
  double median_ae_m = 0.0;
  double mean_rel_err_pct = 0.0;
};

// Standard distance-error metrics; median by lower interpolation on the
// sorted absolute errors. Truth must be positive elementwise.
DistanceMetrics distance_metrics(std::span<const double> estimates,
                                 std::span<const double> truth);

// Empirical cumulative error: fraction of |errors| <= t for each threshold
// (inclusive). Thresholds must be sorted ascending; errors must be
// non-empty.
std::vector<std::pair<double, double>> cde_curve(
    std::span<const double> abs_errors, std::span<const double> thresholds);

std::vector<double> default_cde_thresholds(double max_m = 50.0,
                                           double step_m = 0.5);

struct WilcoxonResult {
  double w = 0.0;        // signed-rank statistic (sum of positive ranks)
  double p_value = 1.0;  // exact two-sided
  int n_used = 0;
  int zeros_dropped = 0;
  bool defined = true;  // false when no non-zero deltas remain
};

// Exact Wilcoxon signed-rank test: average ranks for tied magnitudes, all
// 2^n sign assignments enumerated, two-sided p as the doubled smaller tail
// capped at 1. Throws DataError for n > 20 after zero removal.
WilcoxonResult wilcoxon_exact(std::span<const double> deltas);

struct DispersionStats {
  double std_raw = 0.0;
  double std_filt = 0.0;
  double reduction_pct = 0.0;  // (1 - std_filt/std_raw) * 100
  double skew_raw = 0.0;
  double skew_filt = 0.0;
  bool defined = true;  // false when the raw std is zero
};

DispersionStats rssi_dispersion(std::span<const double> raw,
                                std::span<const double> filtered);

struct PerDeviceStats {
  std::size_t n = 0;
  double mae_m = 0.0;
  double median_ae_m = 0.0;
  double mean_rel_err_pct = 0.0;
  double ae_q25_m = 0.0;
  double ae_q75_m = 0.0;
  std::size_t n_over_100m = 0;  // estimates beyond 100 m, reported not clamped
};

struct PairedTest {
  std::string variant_a;
  std::string variant_b;
  std::string metric;
  WilcoxonResult test;
};

struct SourceDispersion {
  double std_db = 0.0;
  double skewness = 0.0;
  bool defined = true;
};

struct EvaluationReport {
  std::vector<std::string> variant_order;
  std::map<std::string, DistanceMetrics> per_variant;
  std::map<std::pair<std::string, std::string>, PerDeviceStats> per_device;
  std::map<std::string, std::vector<std::pair<double, double>>> cde_curves;
  std::vector<PairedTest> pairwise_tests;
  std::map<std::string, SourceDispersion> rssi_stats;  // "raw", "filtered"
  std::string config_fingerprint;
  std::string config_text;  // resolved configuration echoed into summary.txt
};

// Writes metrics.csv, per_device.csv, cde_<variant>.csv, tests.csv and
// summary.txt into out_dir; content is deterministic for a fixed report.
void emit_report(const EvaluationReport& report,
                 const std::filesystem::path& out_dir);

}  // namespace lorange
