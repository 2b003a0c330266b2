#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lorange/errors.hpp"
#include "lorange/records.hpp"
#include "lorange/timeutil.hpp"

using namespace lorange;

namespace {

const char* kHeader =
    "timestamp,device_id,counter,frequency_mhz,spreading_factor,rssi_dbm,"
    "snr_db,temperature_c,humidity_pct,co2_ppm,pm25_ugm3,pressure_hpa";

std::string row(const std::string& ts = "2024-03-01T10:00:00Z",
                const std::string& dev = "EN0", int counter = 1,
                const std::string& hum = "45") {
  return ts + "," + dev + "," + std::to_string(counter) +
         ",868.1,7,-97.5,8.25,21.5," + hum + ",600,8,1010.2";
}

}  // namespace

TEST_CASE("rfc3339 parse/format round trip") {
  const auto t = parse_rfc3339("2024-02-29T23:59:59.123456Z");
  REQUIRE(t.has_value());
  CHECK(format_rfc3339(*t) == "2024-02-29T23:59:59.123456Z");

  CHECK(parse_rfc3339("2024-01-01T00:00:00Z").value() == 1704067200000000ll);
  CHECK(parse_rfc3339("1970-01-01T00:00:00Z").value() == 0);
  CHECK(parse_rfc3339("1969-12-31T23:59:59Z").value() == -1000000);
  CHECK(parse_rfc3339("2024-01-01T00:00:00+00:00").has_value());
  CHECK(parse_rfc3339("2024-01-01t00:00:00.5z").value() ==
        1704067200000000ll + 500000);

  CHECK_FALSE(parse_rfc3339("2023-02-29T00:00:00Z").has_value());  // not leap
  CHECK_FALSE(parse_rfc3339("2024-13-01T00:00:00Z").has_value());
  CHECK_FALSE(parse_rfc3339("2024-01-01T24:00:00Z").has_value());
  CHECK_FALSE(parse_rfc3339("2024-01-01T00:00:00+02:00").has_value());
  CHECK_FALSE(parse_rfc3339("garbage").has_value());
  CHECK_FALSE(parse_rfc3339("2024-01-01T00:00:00").has_value());  // no offset
}

TEST_CASE("uplink csv: header plus one valid row") {
  std::istringstream in(std::string(kHeader) + "\n" + row() + "\n");
  const auto result = parse_uplink_csv(in);
  REQUIRE(result.records.size() == 1);
  CHECK(result.rejected.empty());
  const auto& r = result.records[0];
  CHECK(r.device_id == "EN0");
  CHECK(r.counter == 1);
  CHECK(r.frequency_mhz == 868.1);
  CHECK(r.spreading_factor == 7);
  CHECK(r.rssi_dbm == -97.5);
  CHECK(r.snr_db == 8.25);
  CHECK(r.humidity_pct == 45.0);
}

TEST_CASE("uplink csv: invariant violation rejects the row") {
  std::istringstream in(std::string(kHeader) + "\n" +
                        row("2024-03-01T10:00:00Z", "EN0", 1, "150") + "\n" +
                        row("2024-03-01T10:01:00Z", "EN0", 2) + "\n" +
                        row("2024-03-01T10:02:00Z", "EN0", 3) + "\n" +
                        row("2024-03-01T10:03:00Z", "EN0", 4) + "\n" +
                        row("2024-03-01T10:04:00Z", "EN0", 5) + "\n" +
                        row("2024-03-01T10:05:00Z", "EN0", 6) + "\n" +
                        row("2024-03-01T10:06:00Z", "EN0", 7) + "\n" +
                        row("2024-03-01T10:07:00Z", "EN0", 8) + "\n" +
                        row("2024-03-01T10:08:00Z", "EN0", 9) + "\n" +
                        row("2024-03-01T10:09:00Z", "EN0", 10) + "\n" +
                        row("2024-03-01T10:10:00Z", "EN0", 11) + "\n");
  const auto result = parse_uplink_csv(in);
  CHECK(result.records.size() == 10);
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].line == 2);
  CHECK(result.rejected[0].reason.find("humidity") != std::string::npos);
}

TEST_CASE("uplink csv: header only is an empty parse") {
  std::istringstream in(std::string(kHeader) + "\n");
  const auto result = parse_uplink_csv(in);
  CHECK(result.records.empty());
  CHECK(result.rejected.empty());
}

TEST_CASE("uplink csv: malformed header is fatal") {
  std::istringstream in("timestamp,device\n1,2\n");
  CHECK_THROWS_AS(parse_uplink_csv(in), DataError);
}

TEST_CASE("uplink csv: more than 10% rejected rows is fatal") {
  std::string text = std::string(kHeader) + "\n";
  for (int i = 0; i < 8; ++i)
    text += row("2024-03-01T10:0" + std::to_string(i) + ":00Z", "EN0", i) + "\n";
  text += row("2024-03-01T11:00:00Z", "EN0", 99, "999") + "\n";  // invalid
  std::istringstream in(text);  // 1 rejected of 9 rows > 10%
  CHECK_THROWS_AS(parse_uplink_csv(in), DataError);
}

TEST_CASE("uplink csv write/parse round trip") {
  std::istringstream in(std::string(kHeader) + "\n" + row() + "\n" +
                        row("2024-03-01T10:01:30.250000Z", "EN1", 2) + "\n");
  const auto result = parse_uplink_csv(in);
  std::ostringstream out;
  write_uplink_csv(out, result.records);
  std::istringstream in2(out.str());
  const auto result2 = parse_uplink_csv(in2);
  REQUIRE(result2.records.size() == result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    CHECK(result2.records[i].timestamp == result.records[i].timestamp);
    CHECK(result2.records[i].rssi_dbm == result.records[i].rssi_dbm);
    CHECK(result2.records[i].pressure_hpa == result.records[i].pressure_hpa);
  }
  // A second write is byte-identical.
  std::ostringstream out2;
  write_uplink_csv(out2, result2.records);
  CHECK(out.str() == out2.str());
}

TEST_CASE("bundled geometry file matches the deployment table") {
  std::ifstream in(std::string(LORANGE_DATA_DIR) + "/sample_geometry.csv");
  REQUIRE(in.good());
  const auto map = load_geometry(in);
  REQUIRE(map.size() == 6);
  CHECK(map.at("EN0").n_brick == 0);
  CHECK(map.at("EN0").n_wood == 0);
  CHECK(map.at("EN1").n_brick == 1);
  CHECK(map.at("EN1").n_wood == 0);
  CHECK(map.at("EN2").n_brick == 0);
  CHECK(map.at("EN2").n_wood == 2);
  CHECK(map.at("EN3").n_brick == 1);
  CHECK(map.at("EN3").n_wood == 2);
  CHECK(map.at("EN4").n_brick == 0);
  CHECK(map.at("EN4").n_wood == 5);
  CHECK(map.at("EN5").n_brick == 2);
  CHECK(map.at("EN5").n_wood == 2);
  for (const auto& [_, g] : map) CHECK(g.distance_m > 0.0);
}

TEST_CASE("geometry csv error paths") {
  {
    std::istringstream in("device_id,distance_m,n_brick,n_wood\nEN0,10,0,0\nEN0,12,1,0\n");
    CHECK_THROWS_AS(load_geometry(in), DataError);  // duplicate device
  }
  {
    std::istringstream in("device_id,distance_m,n_brick\nEN0,10,0\n");
    CHECK_THROWS_AS(load_geometry(in), DataError);  // missing column
  }
  {
    std::istringstream in("device_id,distance_m,n_brick,n_wood\nEN0,0,0,0\n");
    CHECK_THROWS_AS(load_geometry(in), DataError);  // non-positive distance
  }
}
