#include "lorange/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lorange/errors.hpp"
#include "lorange/features.hpp"
#include "lorange/rng.hpp"

namespace lorange {

void SynthConfig::validate() const {
  if (!(shadowing_sigma_db >= 0.0))
    throw ConfigError("synth.shadowing_sigma_db must be >= 0");
  if (!(outlier.rate >= 0.0 && outlier.rate <= 1.0))
    throw ConfigError("synth.outlier_rate must be in [0,1]");
  if (outlier.burst_length < 1)
    throw ConfigError("synth.outlier_burst_length must be >= 1");
  if (!(coefficients.n > 0.0)) throw ConfigError("synth.n must be positive");
  for (const auto& ch : env)
    if (!(ch.period_h > 0.0) || !(ch.jitter_sd >= 0.0))
      throw ConfigError("synth env channel parameters invalid");
  if (!(snr.noise_sd_db >= 0.0))
    throw ConfigError("synth.snr_noise_db must be >= 0");
}

std::vector<LinkGeometry> sample_geometry() {
  return {
      {"EN0", 11.5, 0, 0}, {"EN1", 26.0, 1, 0}, {"EN2", 7.4, 0, 2},
      {"EN3", 16.8, 1, 2}, {"EN4", 34.6, 0, 5}, {"EN5", 21.3, 2, 2},
  };
}

namespace {

constexpr double kChannelsMhz[3] = {868.1, 868.3, 868.5};

// Spreading-factor mix; SF11/12 appear so the SF7-SF10 retention step has
// something to remove.
int draw_sf(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.55) return 7;
  if (u < 0.75) return 8;
  if (u < 0.87) return 9;
  if (u < 0.95) return 10;
  if (u < 0.98) return 11;
  return 12;
}

double structural_loss(const TrueCoefficients& c, const LinkGeometry& g,
                       double f_mhz, const std::array<double, 5>& env) {
  double l = c.beta0_db + 10.0 * c.n * std::log10(g.distance_m) +
             20.0 * std::log10(f_mhz) + c.omega_brick_db * g.n_brick +
             c.omega_wood_db * g.n_wood;
  for (int i = 0; i < 5; ++i) l += c.epsilon[i] * env[i];
  return l;
}

}  // namespace

Campaign generate_campaign(const SynthConfig& config) {
  config.validate();
  const auto geometry =
      config.geometry.empty() ? sample_geometry() : config.geometry;

  Campaign campaign;
  for (const auto& g : geometry) {
    if (!campaign.geometry.emplace(g.device_id, g).second)
      throw ConfigError("synth geometry: duplicate device '" + g.device_id +
                        "'");
    if (!(g.distance_m > 0.0))
      throw ConfigError("synth geometry: non-positive distance for '" +
                        g.device_id + "'");
  }

  // Reference for the SNR map: the smallest structural loss over devices at
  // the middle channel and mean environment.
  std::array<double, 5> env_means;
  for (int i = 0; i < 5; ++i) env_means[i] = config.env[i].mean;
  double l_ref = std::numeric_limits<double>::infinity();
  for (const auto& g : geometry)
    l_ref = std::min(l_ref, structural_loss(config.coefficients, g,
                                            kChannelsMhz[1], env_means));

  campaign.records.reserve(geometry.size() * config.n_packets_per_device);
  for (const auto& g : geometry) {
    Rng rng(config.seed ^ fnv1a64(g.device_id));
    // Stagger device start times within the cadence interval; the offset is
    // keyed to the device id so the geometry listing order never matters.
    const UtcMicros t0 =
        config.start_time +
        static_cast<UtcMicros>(fnv1a64(g.device_id) % 60) * kMicrosPerSecond;
    int burst_remaining = 0;
    const double p_burst_start =
        config.outlier.rate > 0.0
            ? config.outlier.rate / static_cast<double>(config.outlier.burst_length)
            : 0.0;

    for (std::size_t k = 0; k < config.n_packets_per_device; ++k) {
      UplinkRecord r;
      r.device_id = g.device_id;
      r.timestamp = t0 + static_cast<UtcMicros>(k) * 60 * kMicrosPerSecond;
      r.counter = static_cast<std::uint32_t>(k % 65536);  // 16-bit counter
      r.frequency_mhz = kChannelsMhz[rng.uniform_int(3)];
      r.spreading_factor = draw_sf(rng);

      const double hours =
          static_cast<double>(k) * 60.0 / 3600.0;  // 60 s cadence
      std::array<double, 5> env;
      for (int i = 0; i < 5; ++i) {
        const auto& ch = config.env[i];
        env[i] = ch.mean +
                 ch.amplitude *
                     std::sin(2.0 * M_PI * hours / ch.period_h + ch.phase_rad) +
                 (ch.jitter_sd > 0.0 ? rng.normal(0.0, ch.jitter_sd) : 0.0);
      }
      // Generated covariates must satisfy the record invariants; the model
      // is evaluated on the clamped values so the chain stays exact.
      env[1] = std::clamp(env[1], 0.0, 100.0);
      env[2] = std::max(env[2], 0.0);
      env[3] = std::max(env[3], 0.0);
      r.temperature_c = env[0];
      r.humidity_pct = env[1];
      r.co2_ppm = env[2];
      r.pm25_ugm3 = env[3];
      r.pressure_hpa = env[4];

      const double l_struct =
          structural_loss(config.coefficients, g, r.frequency_mhz, env);
      double snr = config.snr.a_db - config.snr.b_per_db * (l_struct - l_ref);
      if (config.snr.noise_sd_db > 0.0)
        snr += rng.normal(0.0, config.snr.noise_sd_db);
      r.snr_db = snr;

      double loss = l_struct + config.coefficients.k_gamma * snr;
      if (config.shadowing_sigma_db > 0.0)
        loss += rng.normal(0.0, config.shadowing_sigma_db);

      double rssi = config.tx_power_dbm - loss;
      if (burst_remaining > 0) {
        rssi += config.outlier.magnitude_db;
        --burst_remaining;
      } else if (p_burst_start > 0.0 && rng.uniform() < p_burst_start) {
        rssi += config.outlier.magnitude_db;
        burst_remaining = config.outlier.burst_length - 1;
      }
      // Receivers report within a bounded range.
      r.rssi_dbm = std::clamp(rssi, -150.0, 0.0);

      campaign.records.push_back(std::move(r));
    }
  }

  std::stable_sort(campaign.records.begin(), campaign.records.end(),
                   [](const UplinkRecord& a, const UplinkRecord& b) {
                     if (a.timestamp != b.timestamp)
                       return a.timestamp < b.timestamp;
                     return a.device_id < b.device_id;
                   });
  return campaign;
}

void export_campaign(const Campaign& campaign,
                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "geometry.csv", std::ios::binary);
    if (!out) throw DataError("cannot write geometry.csv in " + out_dir.string());
    std::vector<LinkGeometry> rows;
    rows.reserve(campaign.geometry.size());
    for (const auto& [_, g] : campaign.geometry) rows.push_back(g);
    write_geometry_csv(out, rows);
  }
  for (const auto& [dev, _] : campaign.geometry) {
    std::vector<UplinkRecord> mine;
    for (const auto& r : campaign.records)
      if (r.device_id == dev) mine.push_back(r);
    std::ofstream out(out_dir / ("uplinks_" + dev + ".csv"), std::ios::binary);
    if (!out)
      throw DataError("cannot write uplinks CSV for device " + dev);
    write_uplink_csv(out, mine);
  }
}

Campaign replay_external(const std::filesystem::path& dataset_dir) {
  if (!std::filesystem::is_directory(dataset_dir))
    throw DataError("replay: not a directory: " + dataset_dir.string());

  const auto geometry_path = dataset_dir / "geometry.csv";
  if (!std::filesystem::exists(geometry_path))
    throw DataError("replay: missing geometry.csv in " + dataset_dir.string());

  Campaign campaign;
  {
    std::ifstream in(geometry_path, std::ios::binary);
    campaign.geometry = load_geometry(in);
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dataset_dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("uplinks") && name.ends_with(".csv"))
      files.push_back(entry.path());
  }
  if (files.empty())
    throw DataError("replay: no uplinks*.csv files in " + dataset_dir.string());
  std::sort(files.begin(), files.end());

  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("replay: cannot open " + path.string());
    try {
      auto parsed = parse_uplink_csv(in);
      campaign.records.insert(campaign.records.end(),
                              std::make_move_iterator(parsed.records.begin()),
                              std::make_move_iterator(parsed.records.end()));
    } catch (const DataError& e) {
      throw DataError(path.filename().string() + ": " + e.what());
    }
  }

  std::set<std::string> missing;
  for (const auto& r : campaign.records)
    if (!campaign.geometry.contains(r.device_id)) missing.insert(r.device_id);
  if (!missing.empty()) {
    std::string list;
    for (const auto& d : missing) list += (list.empty() ? "" : ", ") + d;
    throw DataError("replay: devices without geometry entries: " + list);
  }

  std::stable_sort(campaign.records.begin(), campaign.records.end(),
                   [](const UplinkRecord& a, const UplinkRecord& b) {
                     if (a.timestamp != b.timestamp)
                       return a.timestamp < b.timestamp;
                     return a.device_id < b.device_id;
                   });
  return campaign;
}

}  // namespace lorange
