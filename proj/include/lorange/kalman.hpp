#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lorange {

// Per-device scalar Kalman filter over RSSI with an innovation-driven
// measurement covariance. The latent state is a random walk; each step the
// normalized innovation alpha = nu^2 / (P- + R_prev) is clipped, the
// covariance is smoothed as R <- gamma*R + (1-gamma)*alpha*R and clamped,
// and the gain blends prediction and measurement.
struct FilterParams {
  double q = 0.003;       // process noise, dB^2
  double r0 = 0.22;       // initial measurement covariance, dB^2
  double gamma = 0.99;    // covariance smoothing factor
  double alpha_min = 0.95;
  double alpha_max = 1.05;
  double r_min = 0.12;    // dB^2
  double r_max = 0.38;    // dB^2
  double p0 = 1.0;        // initial state covariance, dB^2
  // The update order leaves open whether the gain sees the covariance
  // before or after this packet's R update; default is the fresh value.
  bool gain_uses_prev_r = false;

  void validate() const;  // throws ConfigError
};

struct FilterState {
  double x = 0.0;       // posterior estimate, dBm
  double p = 0.0;       // posterior covariance, dB^2
  double r = 0.0;       // measurement covariance, dB^2
  double k_last = 0.0;  // last gain
  double alpha_last = 0.0;
  std::uint64_t steps = 0;    // measurements consumed
  std::uint64_t dropped = 0;  // non-finite measurements passed through
  bool initialized = false;
};

FilterState init_filter(double z0, const FilterParams& params);

// Consumes one measurement and returns the posterior estimate. A non-finite
// z is passed through: the state is untouched, `dropped` is incremented and
// the previous estimate is returned.
double filter_step(FilterState& state, double z, const FilterParams& params);

// Forward-only pass over one device stream; output[i] is the posterior
// after consuming z[0..i]. Empty input gives empty output.
std::vector<double> filter_series(std::span<const double> z,
                                  const FilterParams& params);

}  // namespace lorange
