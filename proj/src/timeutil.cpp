#include "lorange/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace lorange {
namespace {

// Days from civil date, valid over the whole int64 micros range we care
// about (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yr + (m <= 2);
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
  static constexpr std::array<unsigned, 12> tab = {31, 28, 31, 30, 31, 30,
                                                   31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return tab[m - 1];
}

bool parse_uint(std::string_view s, unsigned& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::optional<UtcMicros> parse_rfc3339(std::string_view text) {
  // Minimum form: YYYY-MM-DDTHH:MM:SSZ (20 chars).
  if (text.size() < 20) return std::nullopt;
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  const char sep = text[10];
  if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
  if (text[13] != ':' || text[16] != ':') return std::nullopt;

  unsigned year, month, day, hour, minute, second;
  if (!parse_uint(text.substr(0, 4), year)) return std::nullopt;
  if (!parse_uint(text.substr(5, 2), month)) return std::nullopt;
  if (!parse_uint(text.substr(8, 2), day)) return std::nullopt;
  if (!parse_uint(text.substr(11, 2), hour)) return std::nullopt;
  if (!parse_uint(text.substr(14, 2), minute)) return std::nullopt;
  if (!parse_uint(text.substr(17, 2), second)) return std::nullopt;

  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(static_cast<int>(year), month))
    return std::nullopt;
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  if (second == 60) second = 59;  // fold leap seconds

  std::size_t pos = 19;
  std::int64_t micros = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t ndig = 0;
    std::int64_t frac = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (ndig < 6) frac = frac * 10 + (text[pos] - '0');
      ++ndig;
      ++pos;
    }
    if (ndig == 0 || ndig > 9) return std::nullopt;
    while (ndig < 6) {
      frac *= 10;
      ++ndig;
    }
    micros = frac;
  }

  const std::string_view rest = text.substr(pos);
  if (rest != "Z" && rest != "z" && rest != "+00:00" && rest != "-00:00")
    return std::nullopt;

  const std::int64_t days =
      days_from_civil(static_cast<int>(year), month, day);
  const std::int64_t secs =
      days * 86400 + hour * 3600 + minute * 60 + second;
  return secs * kMicrosPerSecond + micros;
}

std::string format_rfc3339(UtcMicros t) {
  std::int64_t secs = t / kMicrosPerSecond;
  std::int64_t micros = t % kMicrosPerSecond;
  if (micros < 0) {
    micros += kMicrosPerSecond;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t sod = secs % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                y, m, d, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60),
                static_cast<long long>(micros));
  return std::string(buf);
}

}  // namespace lorange
