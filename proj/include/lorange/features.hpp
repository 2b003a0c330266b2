#pragma once

#include <span>
#include <string>
#include <vector>

#include "lorange/kalman.hpp"
#include "lorange/linalg.hpp"
#include "lorange/records.hpp"

namespace lorange {

inline constexpr double kReferenceDistanceM = 1.0;  // d0
inline constexpr double kDefaultTxPowerDbm = 14.0;

enum class RssiSource { raw, filtered };
enum class VariantTag { mwm, mwm_ep };

// The three evaluated model variants: MWM (structure only, raw RSSI),
// MWM-EP (environment and SNR augmented, raw RSSI) and MWM-EP-KF (the
// augmented model refitted on Kalman-filtered RSSI).
struct ModelVariant {
  VariantTag tag = VariantTag::mwm_ep;
  RssiSource rssi_source = RssiSource::raw;

  std::string name() const;
  static ModelVariant from_name(const std::string& name);  // ConfigError
  bool uses_covariates() const { return tag == VariantTag::mwm_ep; }
};

// L_obs = P_tx - RSSI; fixed gains are absorbed by the fitted intercept.
double observed_path_loss(double rssi_dbm,
                          double tx_power_dbm = kDefaultTxPowerDbm);

// 20*log10(f), f in MHz. Throws DataError for f <= 0.
double frequency_term_db(double f_mhz);

// Fixed regressor order ("1,log_dist,n_brick,n_wood[,temperature_c,...]").
std::vector<std::string> column_names(const ModelVariant& variant);
std::string columns_string(const ModelVariant& variant);

struct DesignMatrix {
  Matrix x;               // rows follow the input record order
  std::vector<double> y;  // frequency-corrected path loss target
  std::vector<std::string> columns;
};

// Builds the regression target y[i] = L_obs(i) - 20*log10(f_i) and the
// design matrix for the variant. With a filtered source, each device
// stream is passed through the Kalman filter first (records of one device
// must be in timestamp order). Unknown devices are fatal.
DesignMatrix build_design_matrix(std::span<const UplinkRecord> records,
                                 const GeometryMap& geometry,
                                 const ModelVariant& variant,
                                 double tx_power_dbm = kDefaultTxPowerDbm,
                                 const FilterParams& filter_params = {});

// The per-record RSSI actually used by a variant (raw, or per-device
// filtered), in input order.
std::vector<double> effective_rssi(std::span<const UplinkRecord> records,
                                   const ModelVariant& variant,
                                   const FilterParams& filter_params);

}  // namespace lorange
