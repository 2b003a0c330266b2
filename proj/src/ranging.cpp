#include "lorange/ranging.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "lorange/errors.hpp"
#include "lorange/kernels.hpp"

namespace lorange {
namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, p);
}

}  // namespace

double excess_path_loss(const UplinkRecord& record, const LinkGeometry& geo,
                        const ModelCoefficients& coeffs, double l_obs) {
  double eta = l_obs - coeffs.beta0_db - frequency_term_db(record.frequency_mhz);
  eta -= coeffs.omega_db[0] * geo.n_brick + coeffs.omega_db[1] * geo.n_wood;
  if (coeffs.variant.uses_covariates()) {
    eta -= coeffs.epsilon[0] * record.temperature_c +
           coeffs.epsilon[1] * record.humidity_pct +
           coeffs.epsilon[2] * record.co2_ppm +
           coeffs.epsilon[3] * record.pm25_ugm3 +
           coeffs.epsilon[4] * record.pressure_hpa;
    eta -= coeffs.k_gamma * record.snr_db;
  }
  return eta;
}

double invert_distance(double eta_db, double n_hat, double d0_m) {
  if (!(n_hat > 0.0))
    throw NumericError("invert_distance: path loss exponent must be positive");
  return d0_m * std::pow(10.0, eta_db / (10.0 * n_hat));
}

std::vector<RangeEstimate> estimate_stream(
    std::span<const UplinkRecord> device_records, const LinkGeometry& geo,
    const ModelCoefficients& coeffs, bool use_filter,
    const FilterParams& filter_params) {
  const std::size_t n = device_records.size();
  std::vector<RangeEstimate> out;
  if (n == 0) return out;
  if (!(coeffs.n > 0.0))
    throw NumericError("estimate_stream: model has non-positive exponent");
  for (const auto& r : device_records)
    if (r.device_id != geo.device_id)
      throw DataError("estimate_stream: record device '" + r.device_id +
                      "' does not match geometry '" + geo.device_id + "'");

  std::vector<double> rssi(n);
  for (std::size_t i = 0; i < n; ++i) rssi[i] = device_records[i].rssi_dbm;
  if (use_filter) rssi = filter_series(rssi, filter_params);

  // eta = (tx - rssi) - beta0 - walls - 20 log10 f - eps.e - k_gamma*snr
  std::vector<double> eta(n);
  kernels::sub_from(coeffs.tx_power_dbm, rssi.data(), eta.data(), n);
  const double fixed = -coeffs.beta0_db -
                       coeffs.omega_db[0] * geo.n_brick -
                       coeffs.omega_db[1] * geo.n_wood;
  kernels::add_scalar(fixed, eta.data(), n);

  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = device_records[i].frequency_mhz;
  std::vector<double> freq_log(n);
  kernels::log10(col.data(), freq_log.data(), n);
  kernels::axpy(-20.0, freq_log.data(), eta.data(), n);

  if (coeffs.variant.uses_covariates()) {
    const auto apply = [&](double coef, auto field) {
      if (coef == 0.0) return;
      for (std::size_t i = 0; i < n; ++i) col[i] = device_records[i].*field;
      kernels::axpy(-coef, col.data(), eta.data(), n);
    };
    apply(coeffs.epsilon[0], &UplinkRecord::temperature_c);
    apply(coeffs.epsilon[1], &UplinkRecord::humidity_pct);
    apply(coeffs.epsilon[2], &UplinkRecord::co2_ppm);
    apply(coeffs.epsilon[3], &UplinkRecord::pm25_ugm3);
    apply(coeffs.epsilon[4], &UplinkRecord::pressure_hpa);
    apply(coeffs.k_gamma, &UplinkRecord::snr_db);
  }

  std::vector<double> dist(n);
  kernels::exp10_scale(eta.data(), 1.0 / (10.0 * coeffs.n), coeffs.d0_m,
                       dist.data(), n);

  out.resize(n);
  const std::string variant = coeffs.variant.name();
  for (std::size_t i = 0; i < n; ++i) {
    out[i].timestamp = device_records[i].timestamp;
    out[i].device_id = device_records[i].device_id;
    out[i].variant = variant;
    out[i].eta_db = eta[i];
    out[i].distance_m = dist[i];
  }
  return out;
}

void write_estimates_csv(std::ostream& out,
                         std::span<const RangeEstimate> estimates,
                         const GeometryMap& geometry) {
  out << "timestamp,device_id,variant,eta_db,distance_m,distance_true_m,"
         "abs_error_m\n";
  std::string buf;
  for (const auto& e : estimates) {
    const auto it = geometry.find(e.device_id);
    if (it == geometry.end())
      throw DataError("estimates: no geometry for device '" + e.device_id +
                      "'");
    buf.clear();
    buf += format_rfc3339(e.timestamp);
    buf += ',';
    buf += e.device_id;
    buf += ',';
    buf += e.variant;
    buf += ',';
    append_double(buf, e.eta_db);
    buf += ',';
    append_double(buf, e.distance_m);
    buf += ',';
    append_double(buf, it->second.distance_m);
    buf += ',';
    append_double(buf, std::fabs(e.distance_m - it->second.distance_m));
    buf += '\n';
    out << buf;
  }
}

}  // namespace lorange
