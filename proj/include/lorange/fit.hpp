#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "lorange/features.hpp"
#include "lorange/kalman.hpp"
#include "lorange/records.hpp"

namespace lorange {

struct RegressionMetrics {
  double rmse = 0.0;
  double r2 = 0.0;
  bool r2_defined = true;  // false when the truth has zero variance
  double skewness = 0.0;
};

// rmse, R^2 (SS_tot about the truth mean) and adjusted Fisher-Pearson
// skewness of truth - predictions.
RegressionMetrics regression_metrics(std::span<const double> predictions,
                                     std::span<const double> truth);

struct FitDiagnostics {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double train_rmse_db = 0.0;
  double train_r2 = 0.0;
  bool train_r2_defined = true;
  double test_rmse_db = 0.0;
  double test_r2 = 0.0;
  bool test_r2_defined = false;
  bool has_test = false;
  double residual_skewness = 0.0;
  int cv_folds = 0;
  double cv_rmse_mean_db = 0.0;
  double cv_rmse_std_db = 0.0;
  double condition_number = 0.0;
};

// Calibrated parameter set of one variant plus its fit diagnostics.
struct ModelCoefficients {
  ModelVariant variant;
  double beta0_db = 0.0;
  double n = 0.0;  // path loss exponent
  std::array<double, 2> omega_db{0.0, 0.0};     // brick, wood
  std::array<double, 5> epsilon{0.0, 0.0, 0.0, 0.0, 0.0};  // T,RH,CO2,PM,BP
  double k_gamma = 0.0;
  double sigma_psi_db = 0.0;
  double d0_m = kReferenceDistanceM;
  double tx_power_dbm = kDefaultTxPowerDbm;
  FitDiagnostics diagnostics;

  // Coefficients in design-column order for the variant.
  std::vector<double> column_coefficients() const;
};

struct FitParams {
  double tx_power_dbm = kDefaultTxPowerDbm;
  FilterParams filter;
  int cv_folds = 5;
  double condition_warn = 1e8;
};

// OLS calibration on the training records (already deduplicated, SF- and
// anomaly-filtered, in chronological order). Populates training and k-fold
// CV diagnostics; test metrics are attached separately.
ModelCoefficients fit_model(std::span<const UplinkRecord> train,
                            const GeometryMap& geometry,
                            const ModelVariant& variant,
                            const FitParams& params);

// Fills test_rmse/test_r2 from held-out records.
void attach_test_metrics(ModelCoefficients& model,
                         std::span<const UplinkRecord> test,
                         const GeometryMap& geometry, const FitParams& params);

// Plain-text serialization, 17 significant digits, bit-exact round trip.
void save_model(const ModelCoefficients& model, std::ostream& out);
ModelCoefficients load_model(std::istream& in);

}  // namespace lorange
