#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lorange/timeutil.hpp"

namespace lorange {

// One received uplink packet with its radio metrics and the co-located
// environmental readings.
struct UplinkRecord {
  UtcMicros timestamp = 0;
  std::string device_id;
  std::uint32_t counter = 0;
  double frequency_mhz = 0.0;
  int spreading_factor = 7;
  double rssi_dbm = 0.0;
  double snr_db = 0.0;
  double temperature_c = 0.0;
  double humidity_pct = 0.0;
  double co2_ppm = 0.0;
  double pm25_ugm3 = 0.0;
  double pressure_hpa = 0.0;
};

// Per-device ground truth: true gateway distance and wall counts along the
// link.
struct LinkGeometry {
  std::string device_id;
  double distance_m = 0.0;
  int n_brick = 0;
  int n_wood = 0;
};

using GeometryMap = std::map<std::string, LinkGeometry>;

inline constexpr const char* kUplinkCsvHeader =
    "timestamp,device_id,counter,frequency_mhz,spreading_factor,rssi_dbm,"
    "snr_db,temperature_c,humidity_pct,co2_ppm,pm25_ugm3,pressure_hpa";

inline constexpr const char* kGeometryCsvHeader =
    "device_id,distance_m,n_brick,n_wood";

// Returns a reason string if the record violates a field invariant.
std::optional<std::string> validate_record(const UplinkRecord& r);

struct RejectedRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::string reason;
};

struct ParseResult {
  std::vector<UplinkRecord> records;
  std::vector<RejectedRow> rejected;
};

// Streaming CSV parse. Throws DataError on a malformed header or when more
// than 10% of data rows are rejected; individually bad rows are reported in
// `rejected` with their line numbers.
ParseResult parse_uplink_csv(std::istream& in);

void write_uplink_csv(std::ostream& out, std::span<const UplinkRecord> records);

// Throws DataError on missing columns or a duplicated device_id.
GeometryMap load_geometry(std::istream& in);

void write_geometry_csv(std::ostream& out, std::span<const LinkGeometry> rows);

}  // namespace lorange
