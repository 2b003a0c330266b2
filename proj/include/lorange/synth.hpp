#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "lorange/records.hpp"

namespace lorange {

// Ground-truth generating coefficients of the forward model.
struct TrueCoefficients {
  double beta0_db = 30.0;
  double n = 2.8;
  double omega_brick_db = 7.0;
  double omega_wood_db = 1.5;
  std::array<double, 5> epsilon{-0.102, -0.082, 0.0008, 0.02, -0.005};
  double k_gamma = -0.4;
};

// Daily sinusoid plus white jitter for one environmental covariate.
struct EnvChannel {
  double mean = 0.0;
  double amplitude = 0.0;
  double period_h = 24.0;
  double phase_rad = 0.0;
  double jitter_sd = 0.0;
};

struct OutlierConfig {
  double rate = 0.0;          // expected fraction of affected packets
  double magnitude_db = -15.0;  // added to RSSI for the burst duration
  int burst_length = 5;
};

// SNR is generated from the structural part of the loss so the SNR
// coefficient stays identifiable: snr = a - b*(L_struct - L_struct_min) + noise.
struct SnrModel {
  double a_db = 10.0;
  double b_per_db = 0.15;
  double noise_sd_db = 2.0;
};

struct SynthConfig {
  TrueCoefficients coefficients;
  std::vector<LinkGeometry> geometry;  // empty -> built-in sample deployment
  std::size_t n_packets_per_device = 20000;
  double shadowing_sigma_db = 4.0;
  OutlierConfig outlier{0.01, -15.0, 5};
  std::array<EnvChannel, 5> env{{
      {21.0, 3.0, 24.0, 0.0, 0.3},       // temperature, degC
      {45.0, 10.0, 24.0, 2.0944, 1.0},   // humidity, %
      {600.0, 250.0, 24.0, 4.1888, 20.0},  // CO2, ppm
      {8.0, 5.0, 24.0, 1.0472, 1.0},     // PM2.5, ug/m3
      {1010.0, 8.0, 24.0, 3.1416, 0.5},  // pressure, hPa
  }};
  SnrModel snr;
  double tx_power_dbm = 14.0;
  UtcMicros start_time = 1704067200000000ll;  // 2024-01-01T00:00:00Z
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

// The six-node office deployment shipped with the repo (same content as
// data/sample_geometry.csv).
std::vector<LinkGeometry> sample_geometry();

struct Campaign {
  std::vector<UplinkRecord> records;  // globally sorted by timestamp
  GeometryMap geometry;
};

// Forward model: L = beta0 + 10 n log10(d/d0) + 20 log10(f) + omega.w
// + eps.e + k_gamma*snr + psi, RSSI = tx - L (clamped to the valid RSSI
// range). Deterministic for a fixed seed; per-device streams are seeded
// with seed xor fnv1a64(device_id), so device order never matters.
Campaign generate_campaign(const SynthConfig& config);

// Loads uplinks_*.csv plus geometry.csv from a directory in the interchange
// schema (e.g. an exported campaign or an externally collected dataset).
Campaign replay_external(const std::filesystem::path& dataset_dir);

// Writes uplinks_<device>.csv per device plus geometry.csv.
void export_campaign(const Campaign& campaign,
                     const std::filesystem::path& out_dir);

}  // namespace lorange
