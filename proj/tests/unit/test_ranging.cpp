#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "lorange/errors.hpp"
#include "lorange/ranging.hpp"
#include "lorange/rng.hpp"
#include "lorange/synth.hpp"

using namespace lorange;

namespace {

ModelCoefficients bare_model(double beta0, double n) {
  ModelCoefficients m;
  m.variant = ModelVariant::from_name("MWM");
  m.beta0_db = beta0;
  m.n = n;
  return m;
}

UplinkRecord rec(double rssi, double f_mhz = 1.0,
                 const std::string& dev = "EN0") {
  UplinkRecord r;
  r.device_id = dev;
  r.frequency_mhz = f_mhz;
  r.rssi_dbm = rssi;
  return r;
}

}  // namespace

TEST_CASE("excess path loss cancellation and hand case") {
  const LinkGeometry geo{"EN0", 10.0, 0, 0};
  // l_obs equal to beta0 at f=1 MHz cancels to zero
  auto m = bare_model(20.0, 3.0);
  CHECK(excess_path_loss(rec(0.0), geo, m, 20.0) == doctest::Approx(0.0));
  // beta0=20, l_obs=50, f=1, no walls/env/snr: eta = 30
  CHECK(excess_path_loss(rec(0.0), geo, m, 50.0) == doctest::Approx(30.0));
}

TEST_CASE("one brick wall lowers eta by its coefficient") {
  auto m = bare_model(20.0, 3.0);
  m.omega_db = {7.02, 1.46};
  const LinkGeometry no_wall{"EN0", 10.0, 0, 0};
  const LinkGeometry one_brick{"EN0", 10.0, 1, 0};
  const double e0 = excess_path_loss(rec(-80.0), no_wall, m, 100.0);
  const double e1 = excess_path_loss(rec(-80.0), one_brick, m, 100.0);
  CHECK(e0 - e1 == doctest::Approx(7.02).epsilon(1e-12));
}

TEST_CASE("distance inversion") {
  CHECK(invert_distance(0.0, 2.8) == doctest::Approx(1.0));
  CHECK(invert_distance(30.0, 3.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(invert_distance(10.0, 0.0), NumericError);
  CHECK_THROWS_AS(invert_distance(10.0, -2.0), NumericError);

  // Scale identity: +10*n dB multiplies the estimate by 10.
  for (const double n : {1.5, 2.8, 4.0}) {
    const double base = invert_distance(12.0, n);
    CHECK(invert_distance(12.0 + 10.0 * n, n) ==
          doctest::Approx(10.0 * base).epsilon(1e-12));
  }

  // Monotonicity in eta (hence in l_obs at fixed covariates).
  double prev = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double d = invert_distance(-20.0 + i, 2.8);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("forward model round trip at 17.3 m") {
  SynthConfig config;
  config.seed = 5;
  config.n_packets_per_device = 40;
  config.shadowing_sigma_db = 0.0;
  config.outlier.rate = 0.0;
  config.geometry = {{"EN0", 17.3, 1, 2}};
  const auto campaign = generate_campaign(config);

  ModelCoefficients truth;
  truth.variant = ModelVariant::from_name("MWM-EP");
  truth.beta0_db = config.coefficients.beta0_db;
  truth.n = config.coefficients.n;
  truth.omega_db = {config.coefficients.omega_brick_db,
                    config.coefficients.omega_wood_db};
  truth.epsilon = config.coefficients.epsilon;
  truth.k_gamma = config.coefficients.k_gamma;
  truth.tx_power_dbm = config.tx_power_dbm;

  const auto estimates =
      estimate_stream(campaign.records, campaign.geometry.at("EN0"), truth,
                      /*use_filter=*/false);
  REQUIRE(estimates.size() == 40);
  for (const auto& e : estimates)
    CHECK(std::fabs(e.distance_m / 17.3 - 1.0) < 1e-9);
}

TEST_CASE("single packet equals the composed scalar path") {
  auto m = bare_model(30.0, 2.8);
  m.omega_db = {7.0, 1.5};
  const LinkGeometry geo{"EN0", 10.0, 1, 1};
  const auto r = rec(-95.0, 868.3);
  const auto stream = estimate_stream({&r, 1}, geo, m, false);
  REQUIRE(stream.size() == 1);
  const double l_obs = observed_path_loss(r.rssi_dbm, m.tx_power_dbm);
  const double eta = excess_path_loss(r, geo, m, l_obs);
  CHECK(stream[0].eta_db == doctest::Approx(eta).epsilon(1e-12));
  CHECK(stream[0].distance_m ==
        doctest::Approx(invert_distance(eta, m.n)).epsilon(1e-12));
}

TEST_CASE("constant RSSI stream gives constant distances") {
  auto m = bare_model(30.0, 2.8);
  std::vector<UplinkRecord> records;
  for (int i = 0; i < 25; ++i) {
    auto r = rec(-97.0, 868.1);
    r.timestamp = i * 60 * kMicrosPerSecond;
    records.push_back(r);
  }
  const LinkGeometry geo{"EN0", 10.0, 0, 0};
  for (const bool use_filter : {false, true}) {
    const auto est = estimate_stream(records, geo, m, use_filter);
    for (const auto& e : est)
      CHECK(e.distance_m == doctest::Approx(est[0].distance_m).epsilon(1e-12));
  }
}

TEST_CASE("filtering reduces ranging RMSE on a noisy campaign") {
  SynthConfig config;
  config.seed = 77;
  config.n_packets_per_device = 3000;
  config.shadowing_sigma_db = 4.0;
  config.outlier.rate = 0.01;
  config.geometry = {{"EN0", 15.0, 1, 1}};
  const auto campaign = generate_campaign(config);

  ModelCoefficients truth;
  truth.variant = ModelVariant::from_name("MWM-EP");
  truth.beta0_db = config.coefficients.beta0_db;
  truth.n = config.coefficients.n;
  truth.omega_db = {config.coefficients.omega_brick_db,
                    config.coefficients.omega_wood_db};
  truth.epsilon = config.coefficients.epsilon;
  truth.k_gamma = config.coefficients.k_gamma;

  double rmse[2];
  for (const bool use_filter : {false, true}) {
    const auto est = estimate_stream(campaign.records,
                                     campaign.geometry.at("EN0"), truth,
                                     use_filter);
    double ss = 0.0;
    for (const auto& e : est) {
      const double err = e.distance_m - 15.0;
      ss += err * err;
    }
    rmse[use_filter ? 1 : 0] = std::sqrt(ss / static_cast<double>(est.size()));
  }
  CHECK(rmse[1] < rmse[0]);
}

TEST_CASE("estimates CSV format") {
  auto m = bare_model(30.0, 2.8);
  std::vector<UplinkRecord> records = {rec(-95.0, 868.1)};
  records[0].timestamp = parse_rfc3339("2024-06-01T08:00:00Z").value();
  const LinkGeometry geo{"EN0", 10.0, 0, 0};
  const auto est = estimate_stream(records, geo, m, false);
  GeometryMap gm;
  gm["EN0"] = geo;
  std::ostringstream out;
  write_estimates_csv(out, est, gm);
  const std::string text = out.str();
  CHECK(text.find("timestamp,device_id,variant,eta_db,distance_m,"
                  "distance_true_m,abs_error_m") == 0);
  CHECK(text.find("2024-06-01T08:00:00.000000Z,EN0,MWM,") != std::string::npos);
}

TEST_CASE("device mismatch is fatal") {
  auto m = bare_model(30.0, 2.8);
  const LinkGeometry geo{"EN1", 10.0, 0, 0};
  std::vector<UplinkRecord> records = {rec(-95.0)};
  CHECK_THROWS_AS(estimate_stream(records, geo, m, false), DataError);
}
