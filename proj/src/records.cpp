#include "lorange/records.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "lorange/errors.hpp"

namespace lorange {
namespace {

std::vector<std::string_view> split_csv(std::string_view line,
                                        std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, p);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::optional<std::string> validate_record(const UplinkRecord& r) {
  if (r.device_id.empty()) return "empty device_id";
  if (r.spreading_factor < 7 || r.spreading_factor > 12)
    return "spreading_factor outside [7,12]";
  if (!(r.frequency_mhz > 0.0)) return "frequency_mhz must be positive";
  if (!(r.humidity_pct >= 0.0 && r.humidity_pct <= 100.0))
    return "humidity_pct outside [0,100]";
  if (!(r.rssi_dbm >= -150.0 && r.rssi_dbm <= 0.0))
    return "rssi_dbm outside [-150,0]";
  if (!(r.co2_ppm >= 0.0)) return "co2_ppm must be non-negative";
  if (!(r.pm25_ugm3 >= 0.0)) return "pm25_ugm3 must be non-negative";
  if (!std::isfinite(r.snr_db)) return "snr_db not finite";
  if (!std::isfinite(r.temperature_c)) return "temperature_c not finite";
  if (!std::isfinite(r.pressure_hpa)) return "pressure_hpa not finite";
  return std::nullopt;
}

ParseResult parse_uplink_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw DataError("uplink CSV: empty input, expected header row");
  if (strip_cr(line) != kUplinkCsvHeader)
    throw DataError("uplink CSV: malformed header, expected '" +
                    std::string(kUplinkCsvHeader) + "' got '" + line + "'");

  ParseResult result;
  std::vector<std::string_view> fields;
  std::size_t line_no = 1;
  std::size_t n_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    ++n_rows;
    split_csv(line, fields);
    if (fields.size() != 12) {
      result.rejected.push_back({line_no, "expected 12 fields, got " +
                                              std::to_string(fields.size())});
      continue;
    }
    UplinkRecord r;
    const auto ts = parse_rfc3339(fields[0]);
    long long counter = 0, sf = 0;
    if (!ts) {
      result.rejected.push_back({line_no, "unparsable timestamp"});
      continue;
    }
    r.timestamp = *ts;
    r.device_id = std::string(fields[1]);
    bool ok = parse_int(fields[2], counter) && counter >= 0 &&
              parse_double(fields[3], r.frequency_mhz) &&
              parse_int(fields[4], sf) && parse_double(fields[5], r.rssi_dbm) &&
              parse_double(fields[6], r.snr_db) &&
              parse_double(fields[7], r.temperature_c) &&
              parse_double(fields[8], r.humidity_pct) &&
              parse_double(fields[9], r.co2_ppm) &&
              parse_double(fields[10], r.pm25_ugm3) &&
              parse_double(fields[11], r.pressure_hpa);
    if (!ok) {
      result.rejected.push_back({line_no, "unparsable field"});
      continue;
    }
    r.counter = static_cast<std::uint32_t>(counter);
    r.spreading_factor = static_cast<int>(sf);
    if (auto reason = validate_record(r)) {
      result.rejected.push_back({line_no, *reason});
      continue;
    }
    result.records.push_back(std::move(r));
  }

  if (n_rows > 0 && result.rejected.size() * 10 > n_rows)
    throw DataError("uplink CSV: " + std::to_string(result.rejected.size()) +
                    " of " + std::to_string(n_rows) +
                    " rows rejected (>10%), refusing input");
  return result;
}

void write_uplink_csv(std::ostream& out,
                      std::span<const UplinkRecord> records) {
  std::string buf;
  out << kUplinkCsvHeader << '\n';
  for (const auto& r : records) {
    buf.clear();
    buf += format_rfc3339(r.timestamp);
    buf += ',';
    buf += r.device_id;
    buf += ',';
    buf += std::to_string(r.counter);
    buf += ',';
    append_double(buf, r.frequency_mhz);
    buf += ',';
    buf += std::to_string(r.spreading_factor);
    buf += ',';
    append_double(buf, r.rssi_dbm);
    buf += ',';
    append_double(buf, r.snr_db);
    buf += ',';
    append_double(buf, r.temperature_c);
    buf += ',';
    append_double(buf, r.humidity_pct);
    buf += ',';
    append_double(buf, r.co2_ppm);
    buf += ',';
    append_double(buf, r.pm25_ugm3);
    buf += ',';
    append_double(buf, r.pressure_hpa);
    buf += '\n';
    out << buf;
  }
}

GeometryMap load_geometry(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw DataError("geometry CSV: empty input, expected header row");
  if (strip_cr(line) != kGeometryCsvHeader)
    throw DataError("geometry CSV: malformed header, expected '" +
                    std::string(kGeometryCsvHeader) + "' got '" + line + "'");

  GeometryMap map;
  std::vector<std::string_view> fields;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    split_csv(line, fields);
    if (fields.size() != 4)
      throw DataError("geometry CSV line " + std::to_string(line_no) +
                      ": expected 4 fields (missing column?)");
    LinkGeometry g;
    g.device_id = std::string(fields[0]);
    long long nb = 0, nw = 0;
    if (!parse_double(fields[1], g.distance_m) || !parse_int(fields[2], nb) ||
        !parse_int(fields[3], nw))
      throw DataError("geometry CSV line " + std::to_string(line_no) +
                      ": unparsable field");
    g.n_brick = static_cast<int>(nb);
    g.n_wood = static_cast<int>(nw);
    if (!(g.distance_m > 0.0))
      throw DataError("geometry CSV line " + std::to_string(line_no) +
                      ": distance_m must be positive");
    if (g.n_brick < 0 || g.n_wood < 0)
      throw DataError("geometry CSV line " + std::to_string(line_no) +
                      ": wall counts must be non-negative");
    if (!map.emplace(g.device_id, g).second)
      throw DataError("geometry CSV: duplicate device_id '" + g.device_id +
                      "'");
  }
  return map;
}

void write_geometry_csv(std::ostream& out, std::span<const LinkGeometry> rows) {
  out << kGeometryCsvHeader << '\n';
  std::string buf;
  for (const auto& g : rows) {
    buf.clear();
    buf += g.device_id;
    buf += ',';
    append_double(buf, g.distance_m);
    buf += ',';
    buf += std::to_string(g.n_brick);
    buf += ',';
    buf += std::to_string(g.n_wood);
    buf += '\n';
    out << buf;
  }
}

}  // namespace lorange
