#include "lorange/features.hpp"

#include <cmath>
#include <unordered_map>

#include "lorange/errors.hpp"
#include "lorange/kernels.hpp"

namespace lorange {

std::string ModelVariant::name() const {
  if (tag == VariantTag::mwm) return "MWM";
  return rssi_source == RssiSource::filtered ? "MWM-EP-KF" : "MWM-EP";
}

ModelVariant ModelVariant::from_name(const std::string& name) {
  if (name == "MWM") return {VariantTag::mwm, RssiSource::raw};
  if (name == "MWM-EP") return {VariantTag::mwm_ep, RssiSource::raw};
  if (name == "MWM-EP-KF") return {VariantTag::mwm_ep, RssiSource::filtered};
  throw ConfigError("unknown model variant '" + name +
                    "' (expected MWM, MWM-EP or MWM-EP-KF)");
}

double observed_path_loss(double rssi_dbm, double tx_power_dbm) {
  return tx_power_dbm - rssi_dbm;
}

double frequency_term_db(double f_mhz) {
  if (!(f_mhz > 0.0))
    throw DataError("frequency_term: carrier frequency must be positive");
  return 20.0 * std::log10(f_mhz);
}

std::vector<std::string> column_names(const ModelVariant& variant) {
  std::vector<std::string> cols = {"1", "log_dist", "n_brick", "n_wood"};
  if (variant.uses_covariates()) {
    cols.insert(cols.end(),
                {"temperature_c", "humidity_pct", "co2_ppm", "pm25_ugm3",
                 "pressure_hpa", "snr_db"});
  }
  return cols;
}

std::string columns_string(const ModelVariant& variant) {
  std::string out;
  for (const auto& c : column_names(variant)) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::vector<double> effective_rssi(std::span<const UplinkRecord> records,
                                   const ModelVariant& variant,
                                   const FilterParams& filter_params) {
  std::vector<double> rssi(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    rssi[i] = records[i].rssi_dbm;
  if (variant.rssi_source == RssiSource::raw) return rssi;

  // Per-device forward pass; streams must be individually time-ordered.
  std::unordered_map<std::string, std::vector<std::size_t>> by_device;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_device[records[i].device_id].push_back(i);
  for (const auto& [dev, idx] : by_device) {
    std::vector<double> z(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k > 0 && records[idx[k]].timestamp < records[idx[k - 1]].timestamp)
        throw DataError("device stream not in timestamp order: " + dev);
      z[k] = rssi[idx[k]];
    }
    const auto filtered = filter_series(z, filter_params);
    for (std::size_t k = 0; k < idx.size(); ++k) rssi[idx[k]] = filtered[k];
  }
  return rssi;
}

DesignMatrix build_design_matrix(std::span<const UplinkRecord> records,
                                 const GeometryMap& geometry,
                                 const ModelVariant& variant,
                                 double tx_power_dbm,
                                 const FilterParams& filter_params) {
  const std::size_t n = records.size();

  // Per-device distance regressor, resolved once.
  std::unordered_map<std::string, double> log_dist;
  for (const auto& r : records) {
    if (log_dist.contains(r.device_id)) continue;
    const auto it = geometry.find(r.device_id);
    if (it == geometry.end())
      throw DataError("no geometry entry for device '" + r.device_id + "'");
    if (!(it->second.distance_m > 0.0))
      throw DataError("non-positive distance for device '" + r.device_id +
                      "'");
    log_dist[r.device_id] =
        10.0 * std::log10(it->second.distance_m / kReferenceDistanceM);
  }

  DesignMatrix d;
  d.columns = column_names(variant);
  d.x = Matrix(n, d.columns.size());

  const auto rssi = effective_rssi(records, variant, filter_params);

  // Target: (tx - rssi) - 20*log10(f), batched through the kernels.
  std::vector<double> freq(n);
  for (std::size_t i = 0; i < n; ++i) freq[i] = records[i].frequency_mhz;
  std::vector<double> freq_log(n);
  kernels::log10(freq.data(), freq_log.data(), n);
  d.y.resize(n);
  kernels::sub_from(tx_power_dbm, rssi.data(), d.y.data(), n);
  kernels::axpy(-20.0, freq_log.data(), d.y.data(), n);

  double* c_one = d.x.col(0);
  double* c_dist = d.x.col(1);
  double* c_brick = d.x.col(2);
  double* c_wood = d.x.col(3);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    const auto& g = geometry.at(r.device_id);
    c_one[i] = 1.0;
    c_dist[i] = log_dist[r.device_id];
    c_brick[i] = g.n_brick;
    c_wood[i] = g.n_wood;
  }
  if (variant.uses_covariates()) {
    double* c_t = d.x.col(4);
    double* c_rh = d.x.col(5);
    double* c_co2 = d.x.col(6);
    double* c_pm = d.x.col(7);
    double* c_bp = d.x.col(8);
    double* c_snr = d.x.col(9);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = records[i];
      c_t[i] = r.temperature_c;
      c_rh[i] = r.humidity_pct;
      c_co2[i] = r.co2_ppm;
      c_pm[i] = r.pm25_ugm3;
      c_bp[i] = r.pressure_hpa;
      c_snr[i] = r.snr_db;
    }
  }
  return d;
}

}  // namespace lorange
