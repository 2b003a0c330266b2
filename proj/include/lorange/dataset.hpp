#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lorange/records.hpp"

namespace lorange {

inline constexpr std::int64_t kDefaultDedupWindowMicros =
    3'600ll * kMicrosPerSecond;  // 1 hour

// Keeps the first record (in timestamp order) of every (device_id, counter)
// pair seen within `window_micros`; the same key reappearing outside the
// window is treated as a counter wrap, not a duplicate. Output is sorted by
// (device_id, timestamp). Idempotent.
std::vector<UplinkRecord> deduplicate(
    std::span<const UplinkRecord> records,
    std::int64_t window_micros = kDefaultDedupWindowMicros);

// Keeps records with spreading_factor in [sf_min, sf_max], order preserved.
std::vector<UplinkRecord> filter_spreading_factor(
    std::span<const UplinkRecord> records, int sf_min = 7, int sf_max = 10);

// floor(n * train_fraction); factored out so the split arithmetic is
// testable at dataset sizes that are unreasonable to materialize.
std::size_t train_size(std::size_t n, double train_fraction);

struct SplitView {
  std::span<const UplinkRecord> train;
  std::span<const UplinkRecord> test;
};

// Chronological split: first floor(N*f) records train, remainder test.
// Throws DataError if the input is not sorted by timestamp, ConfigError if
// the fraction is outside (0,1).
SplitView chronological_split(std::span<const UplinkRecord> records,
                              double train_fraction = 0.8);

struct FoldSpan {
  std::size_t val_begin = 0;
  std::size_t val_end = 0;  // half-open; training = everything else
};

// k contiguous, near-equal validation blocks; the remainder goes to the
// earliest blocks. Throws ConfigError for k < 2, DataError for k > N or an
// unsorted input.
std::vector<FoldSpan> kfold_chronological(std::span<const UplinkRecord> records,
                                          int k);

// Block boundaries on raw counts (used by the record-level overload).
std::vector<FoldSpan> kfold_spans(std::size_t n, int k);

}  // namespace lorange
