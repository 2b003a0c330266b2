#include "lorange/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <span>

#include "lorange/dataset.hpp"
#include "lorange/errors.hpp"
#include "lorange/iforest.hpp"
#include "lorange/kernels.hpp"
#include "lorange/logging.hpp"
#include "lorange/ranging.hpp"
#include "lorange/stats.hpp"

namespace lorange {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point begin, Clock::time_point end) {
  return std::chrono::duration<double, std::micro>(end - begin).count();
}

void sort_by_time(std::vector<UplinkRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const UplinkRecord& a, const UplinkRecord& b) {
                     if (a.timestamp != b.timestamp)
                       return a.timestamp < b.timestamp;
                     return a.device_id < b.device_id;
                   });
}

std::map<std::string, std::vector<UplinkRecord>> group_by_device(
    std::span<const UplinkRecord> records) {
  std::map<std::string, std::vector<UplinkRecord>> groups;
  for (const auto& r : records) groups[r.device_id].push_back(r);
  return groups;
}

std::vector<UplinkRecord> anomaly_pass(std::span<const UplinkRecord> records,
                                       const RunConfig& config,
                                       std::size_t& dropped_count) {
  ForestParams params;
  params.n_trees = config.anomaly_n_trees;
  params.subsample = config.anomaly_subsample;
  std::vector<UplinkRecord> kept;
  kept.reserve(records.size());
  for (auto& [dev, group] : group_by_device(records)) {
    if (config.contamination <= 0.0 || group.size() < 2) {
      kept.insert(kept.end(), group.begin(), group.end());
      continue;
    }
    auto result =
        filter_device_records(group, config.contamination,
                              config.anomaly_seed, params);
    dropped_count += result.dropped.size();
    kept.insert(kept.end(), std::make_move_iterator(result.kept.begin()),
                std::make_move_iterator(result.kept.end()));
  }
  sort_by_time(kept);
  return kept;
}

std::string variant_tag(const std::string& variant) {
  std::string tag = variant;
  for (char& c : tag) {
    if (c == '-') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return tag;
}

std::string variant_file_name(const std::string& variant) {
  return "model_" + variant_tag(variant) + ".txt";
}

}  // namespace

Campaign load_dataset(const RunConfig& config) {
  const std::filesystem::path dir(config.data_dir);
  if (!std::filesystem::is_directory(dir))
    throw DataError("data directory not found: " + config.data_dir);

  Campaign campaign;
  {
    std::ifstream in(config.geometry_path(), std::ios::binary);
    if (!in)
      throw DataError("cannot open geometry file: " + config.geometry_path());
    campaign.geometry = load_geometry(in);
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("uplinks") && name.ends_with(".csv"))
      files.push_back(entry.path());
  }
  if (files.empty())
    throw DataError("no uplinks*.csv files in " + config.data_dir);
  std::sort(files.begin(), files.end());
  std::size_t total_rejected = 0;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    try {
      auto parsed = parse_uplink_csv(in);
      total_rejected += parsed.rejected.size();
      for (const auto& rej : parsed.rejected)
        log_debug(path.filename().string() + " line " +
                  std::to_string(rej.line) + ": " + rej.reason);
      campaign.records.insert(campaign.records.end(),
                              std::make_move_iterator(parsed.records.begin()),
                              std::make_move_iterator(parsed.records.end()));
    } catch (const DataError& e) {
      throw DataError(path.filename().string() + ": " + e.what());
    }
  }
  if (total_rejected > 0)
    log_warn(std::to_string(total_rejected) + " rows rejected while loading " +
             config.data_dir);
  sort_by_time(campaign.records);
  return campaign;
}

PreparedData preprocess(Campaign campaign, const RunConfig& config) {
  PreparedData out;
  out.geometry = std::move(campaign.geometry);
  out.stats.n_input = campaign.records.size();

  auto deduped = deduplicate(campaign.records,
                             config.dedup_window_s * kMicrosPerSecond);
  out.stats.n_duplicates_removed = campaign.records.size() - deduped.size();

  auto sf_kept = filter_spreading_factor(deduped, config.sf_min, config.sf_max);
  out.stats.n_sf_removed = deduped.size() - sf_kept.size();
  sort_by_time(sf_kept);

  const auto split = chronological_split(sf_kept, config.train_fraction);
  std::vector<UplinkRecord> train(split.train.begin(), split.train.end());
  std::vector<UplinkRecord> test(split.test.begin(), split.test.end());

  out.train = anomaly_pass(train, config, out.stats.n_anomaly_train_dropped);
  if (config.anomaly_apply_to_test)
    out.test = anomaly_pass(test, config, out.stats.n_anomaly_test_dropped);
  else
    out.test = std::move(test);
  return out;
}

void run_synth(const RunConfig& config, std::ostream& console) {
  SynthConfig synth = config.synth;
  if (!config.geometry.empty()) {
    std::ifstream in(config.geometry, std::ios::binary);
    if (!in) throw DataError("cannot open geometry file: " + config.geometry);
    const auto map = load_geometry(in);
    synth.geometry.clear();
    for (const auto& [_, g] : map) synth.geometry.push_back(g);
  }
  const auto campaign = generate_campaign(synth);
  export_campaign(campaign, config.data_dir);
  console << "wrote " << campaign.records.size() << " packets for "
          << campaign.geometry.size() << " devices to " << config.data_dir
          << "\n";
}

FitOutcome run_fit(const RunConfig& config, std::ostream& console,
                   std::optional<Campaign> preloaded) {
  Campaign campaign =
      preloaded.has_value() ? std::move(*preloaded) : load_dataset(config);
  PreparedData data = preprocess(std::move(campaign), config);
  if (data.train.empty())
    throw DataError("fit: training split is empty after preprocessing");

  console << "preprocess: " << data.stats.n_input << " packets in, "
          << data.stats.n_duplicates_removed << " duplicates removed, "
          << data.stats.n_sf_removed << " outside SF retention, "
          << data.stats.n_anomaly_train_dropped
          << " anomalies dropped from train\n";
  console << "split: " << data.train.size() << " train / " << data.test.size()
          << " test\n";

  const auto params = config.fit_params();
  std::filesystem::create_directories(config.model_dir_path());

  FitOutcome outcome;
  outcome.stats = data.stats;
  char buf[256];
  for (const auto& name : config.variants) {
    const auto variant = ModelVariant::from_name(name);
    auto model = fit_model(data.train, data.geometry, variant, params);
    attach_test_metrics(model, data.test, data.geometry, params);

    const auto path = std::filesystem::path(config.model_dir_path()) /
                      variant_file_name(name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    save_model(model, out);

    const auto& d = model.diagnostics;
    std::snprintf(buf, sizeof(buf),
                  "%-10s train rmse=%.4f dB r2=%.4f | test rmse=%.4f dB "
                  "r2=%.4f | cv rmse=%.4f+-%.4f dB\n",
                  name.c_str(), d.train_rmse_db, d.train_r2, d.test_rmse_db,
                  d.test_r2, d.cv_rmse_mean_db, d.cv_rmse_std_db);
    console << buf;
    outcome.models.push_back(std::move(model));
  }
  return outcome;
}

namespace {

struct VariantEvaluation {
  std::vector<double> abs_errors;  // pooled over devices
  std::map<std::string, PerDeviceStats> per_device;
  std::map<std::string, DistanceMetrics> per_device_metrics;
  double elapsed_us = 0.0;
  std::size_t n_packets = 0;
};

VariantEvaluation evaluate_variant(
    const ModelCoefficients& model,
    const std::map<std::string, std::vector<UplinkRecord>>& test_by_device,
    const GeometryMap& geometry, const RunConfig& config,
    std::vector<RangeEstimate>* estimates_out) {
  VariantEvaluation ev;
  const bool use_filter =
      model.variant.rssi_source == RssiSource::filtered;
  for (const auto& [dev, stream] : test_by_device) {
    const auto& geo = geometry.at(dev);
    const auto t0 = Clock::now();
    auto estimates =
        estimate_stream(stream, geo, model, use_filter, config.kalman);
    ev.elapsed_us += elapsed_us(t0, Clock::now());
    ev.n_packets += estimates.size();

    std::vector<double> est(estimates.size()), truth(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      est[i] = estimates[i].distance_m;
      truth[i] = geo.distance_m;
    }
    const auto m = distance_metrics(est, truth);
    PerDeviceStats s;
    s.n = est.size();
    s.mae_m = m.mae_m;
    s.median_ae_m = m.median_ae_m;
    s.mean_rel_err_pct = m.mean_rel_err_pct;
    std::vector<double> ae(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) {
      ae[i] = std::fabs(est[i] - truth[i]);
      if (est[i] > 100.0) ++s.n_over_100m;
    }
    std::sort(ae.begin(), ae.end());
    s.ae_q25_m = lower_quantile(ae, 0.25);
    s.ae_q75_m = lower_quantile(ae, 0.75);
    ev.per_device[dev] = s;
    ev.per_device_metrics[dev] = m;
    ev.abs_errors.insert(ev.abs_errors.end(), ae.begin(), ae.end());

    if (estimates_out)
      estimates_out->insert(estimates_out->end(),
                            std::make_move_iterator(estimates.begin()),
                            std::make_move_iterator(estimates.end()));
  }
  return ev;
}

}  // namespace

EvalOutcome run_eval(const RunConfig& config, std::ostream& console,
                     std::optional<Campaign> preloaded) {
  Campaign campaign =
      preloaded.has_value() ? std::move(*preloaded) : load_dataset(config);
  PreparedData data = preprocess(std::move(campaign), config);
  if (data.test.empty())
    throw DataError("eval: test split is empty after preprocessing");

  const auto test_by_device = group_by_device(data.test);

  EvalOutcome outcome;
  auto& report = outcome.report;
  report.config_text = config.canonical_text();
  report.config_fingerprint = config.fingerprint();

  // Pooled distance truth per variant needs per-packet truth vectors.
  std::map<std::string, std::vector<double>> pooled_est, pooled_truth;

  double latency_us = 0.0;
  std::size_t latency_packets = 0;
  char buf[256];
  for (const auto& name : config.variants) {
    const auto path = std::filesystem::path(config.model_dir_path()) /
                      variant_file_name(name);
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw DataError("model file not found (run fit first): " +
                      path.string());
    const auto model = load_model(in);
    if (model.variant.name() != name)
      throw DataError("model file " + path.string() +
                      " holds variant " + model.variant.name());

    std::vector<RangeEstimate> estimates;
    auto ev = evaluate_variant(model, test_by_device, data.geometry, config,
                               config.write_estimates ? &estimates : nullptr);

    if (config.write_estimates) {
      std::sort(estimates.begin(), estimates.end(),
                [](const RangeEstimate& a, const RangeEstimate& b) {
                  if (a.timestamp != b.timestamp)
                    return a.timestamp < b.timestamp;
                  return a.device_id < b.device_id;
                });
      std::filesystem::create_directories(config.out_dir);
      const auto est_path = std::filesystem::path(config.out_dir) /
                            ("estimates_" + variant_tag(name) + ".csv");
      std::ofstream out(est_path, std::ios::binary);
      if (!out)
        throw DataError("cannot write estimates file: " + est_path.string());
      write_estimates_csv(out, estimates, data.geometry);
    }

    report.variant_order.push_back(name);
    for (const auto& [dev, s] : ev.per_device)
      report.per_device[{name, dev}] = s;

    report.cde_curves[name] =
        cde_curve(ev.abs_errors,
                  default_cde_thresholds(config.cde_max_m, config.cde_step_m));

    DistanceMetrics pooled;
    {
      std::vector<double> ae = ev.abs_errors;
      std::sort(ae.begin(), ae.end());
      double sum_sq = 0.0, sum_abs = 0.0;
      for (const double e : ae) {
        sum_sq += e * e;
        sum_abs += e;
      }
      pooled.rmse_m = std::sqrt(sum_sq / static_cast<double>(ae.size()));
      pooled.mae_m = sum_abs / static_cast<double>(ae.size());
      pooled.median_ae_m = lower_quantile(ae, 0.5);
      double rel = 0.0;
      std::size_t n_rel = 0;
      for (const auto& [dev, s] : ev.per_device) {
        rel += s.mean_rel_err_pct * static_cast<double>(s.n);
        n_rel += s.n;
      }
      pooled.mean_rel_err_pct = rel / static_cast<double>(n_rel);
    }
    report.per_variant[name] = pooled;

    if (model.variant.rssi_source == RssiSource::filtered ||
        latency_packets == 0) {
      latency_us = ev.elapsed_us;
      latency_packets = ev.n_packets;
    }

    std::snprintf(buf, sizeof(buf),
                  "%-10s rmse=%.4f m mae=%.4f m median=%.4f m rel=%.2f%%\n",
                  name.c_str(), pooled.rmse_m, pooled.mae_m,
                  pooled.median_ae_m, pooled.mean_rel_err_pct);
    console << buf;
  }

  // Paired device-level tests for every variant pair and summary metric.
  const auto metric_value = [&](const std::string& variant,
                                const std::string& dev,
                                const std::string& metric) {
    const auto& s = report.per_device.at({variant, dev});
    if (metric == "mae_m") return s.mae_m;
    if (metric == "median_ae_m") return s.median_ae_m;
    return s.mean_rel_err_pct;
  };
  for (std::size_t a = 0; a < report.variant_order.size(); ++a) {
    for (std::size_t b = a + 1; b < report.variant_order.size(); ++b) {
      for (const std::string metric :
           {"mae_m", "median_ae_m", "mean_rel_err_pct"}) {
        std::vector<double> deltas;
        for (const auto& [dev, stream] : test_by_device) {
          (void)stream;
          deltas.push_back(
              metric_value(report.variant_order[a], dev, metric) -
              metric_value(report.variant_order[b], dev, metric));
        }
        PairedTest t;
        t.variant_a = report.variant_order[a];
        t.variant_b = report.variant_order[b];
        t.metric = metric;
        t.test = wilcoxon_exact(deltas);
        report.pairwise_tests.push_back(std::move(t));
      }
    }
  }

  // RSSI dispersion over the test streams: per-device mean removed, pooled.
  {
    std::vector<double> raw_pool, filt_pool;
    for (const auto& [dev, stream] : test_by_device) {
      std::vector<double> raw(stream.size());
      for (std::size_t i = 0; i < stream.size(); ++i)
        raw[i] = stream[i].rssi_dbm;
      const auto filt = filter_series(raw, config.kalman);
      const double mr = mean(raw);
      const double mf = mean(filt);
      for (const double v : raw) raw_pool.push_back(v - mr);
      for (const double v : filt) filt_pool.push_back(v - mf);
    }
    if (raw_pool.size() >= 2) {
      const auto disp = rssi_dispersion(raw_pool, filt_pool);
      report.rssi_stats["raw"] = {disp.std_raw, disp.skew_raw, true};
      report.rssi_stats["filtered"] = {disp.std_filt, disp.skew_filt,
                                       disp.defined};
    }
  }

  emit_report(report, config.out_dir);

  outcome.n_test_packets = latency_packets;
  outcome.mean_latency_us_per_packet =
      latency_packets > 0 ? latency_us / static_cast<double>(latency_packets)
                          : 0.0;
  std::snprintf(buf, sizeof(buf),
                "mean per-packet latency (filter+formation+inversion): "
                "%.4f us over %zu packets\n",
                outcome.mean_latency_us_per_packet, outcome.n_test_packets);
  console << buf;

  // Headline ordering line when both augmented variants are present.
  if (report.per_variant.count("MWM-EP-KF") &&
      report.per_variant.count("MWM-EP")) {
    const double kf = report.per_variant.at("MWM-EP-KF").mae_m;
    const double ep = report.per_variant.at("MWM-EP").mae_m;
    for (const auto& t : report.pairwise_tests) {
      if (t.variant_a == "MWM-EP" && t.variant_b == "MWM-EP-KF" &&
          t.metric == "mae_m") {
        std::snprintf(buf, sizeof(buf),
                      "MAE ordering: MWM-EP-KF %.4f m %s MWM-EP %.4f m "
                      "(wilcoxon p=%.6g)\n",
                      kf, kf < ep ? "<" : ">=", ep,
                      t.test.defined ? t.test.p_value : std::nan(""));
        console << buf;
      }
    }
  }
  return outcome;
}

EvalOutcome run_replay(const RunConfig& config, const std::string& dataset_dir,
                       std::ostream& console) {
  Campaign campaign = replay_external(dataset_dir);
  console << "replay: loaded " << campaign.records.size() << " packets, "
          << campaign.geometry.size() << " devices from " << dataset_dir
          << "\n";
  Campaign for_eval = campaign;  // fit consumes its copy
  run_fit(config, console, std::move(campaign));
  return run_eval(config, console, std::move(for_eval));
}

BenchResult run_bench(const RunConfig& config, std::ostream& console) {
  Campaign campaign = load_dataset(config);
  PreparedData data = preprocess(std::move(campaign), config);
  if (data.test.empty()) throw DataError("bench: test split is empty");

  // Prefer the filtered variant so the timed path includes the filter.
  std::string variant_name = config.variants.front();
  for (const auto& v : config.variants)
    if (ModelVariant::from_name(v).rssi_source == RssiSource::filtered)
      variant_name = v;
  const auto path = std::filesystem::path(config.model_dir_path()) /
                    variant_file_name(variant_name);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("model file not found (run fit first): " + path.string());
  const auto model = load_model(in);
  const bool use_filter = model.variant.rssi_source == RssiSource::filtered;

  const auto test_by_device = group_by_device(data.test);

  BenchResult result;
  result.n_runs = 10;
  std::vector<double> per_packet_us;
  for (int run = 0; run < result.n_runs; ++run) {
    double us = 0.0;
    std::size_t packets = 0;
    for (const auto& [dev, stream] : test_by_device) {
      const auto t0 = Clock::now();
      const auto est = estimate_stream(stream, data.geometry.at(dev), model,
                                       use_filter, config.kalman);
      us += elapsed_us(t0, Clock::now());
      packets += est.size();
    }
    per_packet_us.push_back(us / static_cast<double>(packets));
    result.n_packets = packets;
  }
  result.mean_us_per_packet = mean(per_packet_us);
  result.std_us_per_packet = sample_std(per_packet_us);

  // Stream-position trend: time the first and last deciles of each device
  // stream as standalone chunks.
  double first_us = 0.0, last_us = 0.0;
  std::size_t first_n = 0, last_n = 0;
  for (const auto& [dev, stream] : test_by_device) {
    const std::size_t n = stream.size();
    if (n < 20) continue;
    const std::size_t decile = n / 10;
    const std::span<const UplinkRecord> first_chunk(stream.data(), decile);
    const std::span<const UplinkRecord> last_chunk(
        stream.data() + (n - decile), decile);
    auto t0 = Clock::now();
    (void)estimate_stream(first_chunk, data.geometry.at(dev), model,
                          use_filter, config.kalman);
    first_us += elapsed_us(t0, Clock::now());
    first_n += decile;
    t0 = Clock::now();
    (void)estimate_stream(last_chunk, data.geometry.at(dev), model, use_filter,
                          config.kalman);
    last_us += elapsed_us(t0, Clock::now());
    last_n += decile;
  }
  if (first_n > 0 && last_n > 0) {
    result.first_decile_us_per_packet = first_us / static_cast<double>(first_n);
    result.last_decile_us_per_packet = last_us / static_cast<double>(last_n);
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "bench[%s, %s kernels]: %.4f +- %.4f us/packet over %zu "
                "packets, %d runs\n",
                variant_name.c_str(),
                std::string(kernels::backend_name(kernels::active_backend()))
                    .c_str(),
                result.mean_us_per_packet, result.std_us_per_packet,
                result.n_packets, result.n_runs);
  console << buf;
  std::snprintf(buf, sizeof(buf),
                "stream-position check: first decile %.4f us/packet, last "
                "decile %.4f us/packet\n",
                result.first_decile_us_per_packet,
                result.last_decile_us_per_packet);
  console << buf;
  return result;
}

}  // namespace lorange
