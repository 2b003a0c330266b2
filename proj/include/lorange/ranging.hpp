#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lorange/fit.hpp"
#include "lorange/kalman.hpp"
#include "lorange/records.hpp"

namespace lorange {

struct RangeEstimate {
  UtcMicros timestamp = 0;
  std::string device_id;
  std::string variant;
  double eta_db = 0.0;      // excess path loss after removing modeled terms
  double distance_m = 0.0;
};

// eta = L_obs - beta0 - 20 log10(f) - omega.w - eps.e - k_gamma*snr, with
// the shadowing term set to zero (deterministic estimator).
double excess_path_loss(const UplinkRecord& record, const LinkGeometry& geo,
                        const ModelCoefficients& coeffs, double l_obs);

// d = d0 * 10^(eta / (10 n)). Throws NumericError for n <= 0.
double invert_distance(double eta_db, double n_hat,
                       double d0_m = kReferenceDistanceM);

// Per-packet estimates for one device stream (timestamp order). With
// use_filter the RSSI passes through the Kalman filter first; the
// formation and inversion work runs through the batch kernels, so the
// per-packet cost is constant.
std::vector<RangeEstimate> estimate_stream(
    std::span<const UplinkRecord> device_records, const LinkGeometry& geo,
    const ModelCoefficients& coeffs, bool use_filter,
    const FilterParams& filter_params = {});

// CSV: timestamp,device_id,variant,eta_db,distance_m,distance_true_m,abs_error_m
void write_estimates_csv(std::ostream& out,
                         std::span<const RangeEstimate> estimates,
                         const GeometryMap& geometry);

}  // namespace lorange
