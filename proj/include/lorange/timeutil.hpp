#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lorange {

// Microseconds since the Unix epoch, UTC.
using UtcMicros = std::int64_t;

inline constexpr UtcMicros kMicrosPerSecond = 1'000'000;

// Parses an RFC 3339 UTC timestamp ("2024-01-31T12:00:05.250000Z").
// Fractional seconds are optional (up to 9 digits, truncated to micros);
// the offset must be 'Z', '+00:00' or '-00:00'. Returns nullopt on any
// syntax or range violation.
std::optional<UtcMicros> parse_rfc3339(std::string_view text);

// Formats with a fixed 6-digit fraction and 'Z' suffix so that emitted
// timestamps round-trip byte-identically.
std::string format_rfc3339(UtcMicros t);

}  // namespace lorange
