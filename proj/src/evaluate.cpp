#include "lorange/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lorange/errors.hpp"
#include "lorange/kernels.hpp"
#include "lorange/stats.hpp"

namespace lorange {

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return kernels::sum(values.data(), values.size()) /
         static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double m2 = 0.0, m3 = 0.0;
  kernels::centered_moments(values.data(), mean(values), n, m2, m3);
  return std::sqrt(m2 / static_cast<double>(n - 1));
}

double sample_skewness(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  double m2 = 0.0, m3 = 0.0;
  kernels::centered_moments(values.data(), mean(values), n, m2, m3);
  if (m2 <= 0.0) return 0.0;
  const double nn = static_cast<double>(n);
  const double g1 = (m3 / nn) / std::pow(m2 / nn, 1.5);
  return g1 * std::sqrt(nn * (nn - 1.0)) / (nn - 2.0);
}

double lower_quantile(std::span<const double> sorted_values, double q) {
  if (sorted_values.empty())
    throw DataError("lower_quantile: empty input");
  const std::size_t idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(sorted_values.size() - 1)));
  return sorted_values[idx];
}

DistanceMetrics distance_metrics(std::span<const double> estimates,
                                 std::span<const double> truth) {
  if (estimates.size() != truth.size())
    throw DataError("distance_metrics: length mismatch");
  if (estimates.empty()) throw DataError("distance_metrics: empty input");
  const std::size_t n = estimates.size();
  for (const double t : truth)
    if (!(t > 0.0))
      throw DataError("distance_metrics: truth must be positive");

  DistanceMetrics m;
  m.rmse_m = std::sqrt(kernels::sum_sq_diff(estimates.data(), truth.data(), n) /
                       static_cast<double>(n));
  m.mae_m = kernels::sum_abs_diff(estimates.data(), truth.data(), n) /
            static_cast<double>(n);
  std::vector<double> ae(n);
  double rel_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ae[i] = std::fabs(estimates[i] - truth[i]);
    rel_sum += ae[i] / truth[i];
  }
  std::sort(ae.begin(), ae.end());
  m.median_ae_m = lower_quantile(ae, 0.5);
  m.mean_rel_err_pct = rel_sum / static_cast<double>(n) * 100.0;
  return m;
}

std::vector<std::pair<double, double>> cde_curve(
    std::span<const double> abs_errors, std::span<const double> thresholds) {
  if (abs_errors.empty()) throw DataError("cde_curve: empty error sample");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] < thresholds[i - 1])
      throw DataError("cde_curve: thresholds must be sorted ascending");
  std::vector<double> sorted(abs_errors.begin(), abs_errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> curve;
  curve.reserve(thresholds.size());
  for (const double t : thresholds) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    curve.emplace_back(
        t, static_cast<double>(it - sorted.begin()) /
               static_cast<double>(sorted.size()));
  }
  return curve;
}

std::vector<double> default_cde_thresholds(double max_m, double step_m) {
  std::vector<double> t;
  const int steps = static_cast<int>(std::round(max_m / step_m));
  t.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) t.push_back(step_m * i);
  return t;
}

WilcoxonResult wilcoxon_exact(std::span<const double> deltas) {
  WilcoxonResult res;
  std::vector<double> nonzero;
  for (const double d : deltas)
    if (d != 0.0) nonzero.push_back(d);
  res.zeros_dropped = static_cast<int>(deltas.size() - nonzero.size());
  res.n_used = static_cast<int>(nonzero.size());
  if (nonzero.empty()) {
    res.defined = false;
    res.p_value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  if (nonzero.size() > 20)
    throw DataError("wilcoxon_exact: n > 20 is outside the exact domain");

  const std::size_t n = nonzero.size();
  // Average ranks of |delta|; doubling makes tied ranks exact integers.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(nonzero[a]) < std::fabs(nonzero[b]);
  });
  std::vector<long long> rank2(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(nonzero[order[j + 1]]) ==
                            std::fabs(nonzero[order[i]]))
      ++j;
    // ranks i+1 .. j+1 share the average; doubled sum is exact
    const long long avg2 = static_cast<long long>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = avg2;
    i = j + 1;
  }

  long long w2_obs = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (nonzero[k] > 0.0) w2_obs += rank2[k];
  res.w = static_cast<double>(w2_obs) / 2.0;

  const std::uint64_t total = 1ull << n;
  std::uint64_t count_ge = 0, count_le = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    long long w2 = 0;
    std::uint64_t m = mask;
    while (m) {
      const int bit = __builtin_ctzll(m);
      w2 += rank2[static_cast<std::size_t>(bit)];
      m &= m - 1;
    }
    if (w2 >= w2_obs) ++count_ge;
    if (w2 <= w2_obs) ++count_le;
  }
  const double tail = static_cast<double>(std::min(count_ge, count_le)) /
                      static_cast<double>(total);
  res.p_value = std::min(1.0, 2.0 * tail);
  return res;
}

DispersionStats rssi_dispersion(std::span<const double> raw,
                                std::span<const double> filtered) {
  if (raw.size() != filtered.size())
    throw DataError("rssi_dispersion: length mismatch");
  if (raw.size() < 2)
    throw DataError("rssi_dispersion: need at least 2 samples");
  DispersionStats s;
  s.std_raw = sample_std(raw);
  s.std_filt = sample_std(filtered);
  s.skew_raw = sample_skewness(raw);
  s.skew_filt = sample_skewness(filtered);
  if (s.std_raw > 0.0) {
    s.reduction_pct = (1.0 - s.std_filt / s.std_raw) * 100.0;
  } else {
    s.defined = false;
    s.reduction_pct = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, p);
}

std::string num(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot write output file: " + path.string());
  return out;
}

std::string variant_file_tag(std::string name) {
  for (char& c : name) {
    if (c == '-') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return name;
}

}  // namespace

void emit_report(const EvaluationReport& report,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    auto out = open_out(out_dir / "metrics.csv");
    out << "variant,rmse_m,mae_m,median_ae_m,mean_rel_err_pct\n";
    for (const auto& v : report.variant_order) {
      const auto& m = report.per_variant.at(v);
      out << v << ',' << num(m.rmse_m) << ',' << num(m.mae_m) << ','
          << num(m.median_ae_m) << ',' << num(m.mean_rel_err_pct) << '\n';
    }
  }

  {
    auto out = open_out(out_dir / "per_device.csv");
    out << "variant,device_id,n,mae_m,median_ae_m,mean_rel_err_pct,ae_q25_m,"
           "ae_q75_m,n_over_100m\n";
    for (const auto& [key, s] : report.per_device) {
      out << key.first << ',' << key.second << ',' << s.n << ','
          << num(s.mae_m) << ',' << num(s.median_ae_m) << ','
          << num(s.mean_rel_err_pct) << ',' << num(s.ae_q25_m) << ','
          << num(s.ae_q75_m) << ',' << s.n_over_100m << '\n';
    }
  }

  for (const auto& [variant, curve] : report.cde_curves) {
    auto out =
        open_out(out_dir / ("cde_" + variant_file_tag(variant) + ".csv"));
    out << "threshold_m,fraction\n";
    for (const auto& [t, f] : curve)
      out << num(t) << ',' << num(f) << '\n';
  }

  {
    auto out = open_out(out_dir / "tests.csv");
    out << "variant_a,variant_b,metric,n_used,zeros_dropped,w,p_value\n";
    for (const auto& t : report.pairwise_tests) {
      out << t.variant_a << ',' << t.variant_b << ',' << t.metric << ','
          << t.test.n_used << ',' << t.test.zeros_dropped << ','
          << num(t.test.w) << ','
          << (t.test.defined ? num(t.test.p_value) : "undefined") << '\n';
    }
  }

  {
    auto out = open_out(out_dir / "summary.txt");
    out << "ranging evaluation summary\n";
    out << "==========================\n";
    out << "config_fingerprint=" << report.config_fingerprint << "\n\n";
    char buf[256];
    for (const auto& v : report.variant_order) {
      const auto& m = report.per_variant.at(v);
      std::snprintf(buf, sizeof(buf),
                    "%-10s rmse=%.4f m  mae=%.4f m  median=%.4f m  "
                    "rel=%.2f%%\n",
                    v.c_str(), m.rmse_m, m.mae_m, m.median_ae_m,
                    m.mean_rel_err_pct);
      out << buf;
    }
    out << '\n';
    for (const auto& [source, s] : report.rssi_stats) {
      if (s.defined)
        std::snprintf(buf, sizeof(buf),
                      "rssi[%s] std=%.6f dB skewness=%.6f\n", source.c_str(),
                      s.std_db, s.skewness);
      else
        std::snprintf(buf, sizeof(buf), "rssi[%s] std=undefined\n",
                      source.c_str());
      out << buf;
    }
    if (report.rssi_stats.count("raw") && report.rssi_stats.count("filtered")) {
      const auto& r = report.rssi_stats.at("raw");
      const auto& f = report.rssi_stats.at("filtered");
      if (r.defined && r.std_db > 0.0) {
        std::snprintf(buf, sizeof(buf),
                      "volatility reduction: (1 - %.6f/%.6f) = %.4f%%\n",
                      f.std_db, r.std_db, (1.0 - f.std_db / r.std_db) * 100.0);
        out << buf;
      }
    }
    out << '\n';
    for (const auto& t : report.pairwise_tests) {
      std::snprintf(buf, sizeof(buf),
                    "wilcoxon %s vs %s on %s: p=%s (n=%d, zeros=%d)\n",
                    t.variant_a.c_str(), t.variant_b.c_str(),
                    t.metric.c_str(),
                    t.test.defined ? num(t.test.p_value).c_str() : "undefined",
                    t.test.n_used, t.test.zeros_dropped);
      out << buf;
    }
    out << "\nnotes:\n";
    out << "- test R^2 uses the test-set mean in SS_tot\n";
    out << "- medians/quartiles use lower interpolation on sorted values\n";
    out << "\nresolved config:\n";
    out << report.config_text;
  }
}

}  // namespace lorange
