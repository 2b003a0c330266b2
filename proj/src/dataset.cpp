#include "lorange/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lorange/errors.hpp"

namespace lorange {
namespace {

bool sorted_by_timestamp(std::span<const UplinkRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].timestamp < records[i - 1].timestamp) return false;
  return true;
}

}  // namespace

std::vector<UplinkRecord> deduplicate(std::span<const UplinkRecord> records,
                                      std::int64_t window_micros) {
  std::vector<UplinkRecord> out(records.begin(), records.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const UplinkRecord& a, const UplinkRecord& b) {
                     if (a.device_id != b.device_id)
                       return a.device_id < b.device_id;
                     return a.timestamp < b.timestamp;
                   });
  // After sorting, records sharing a key are visited in time order per
  // device, so tracking the last kept timestamp per key implements
  // "first occurrence wins" with the wraparound window.
  std::map<std::pair<std::string, std::uint32_t>, UtcMicros> last_kept;
  std::vector<UplinkRecord> kept;
  kept.reserve(out.size());
  for (auto& r : out) {
    const auto key = std::make_pair(r.device_id, r.counter);
    auto it = last_kept.find(key);
    if (it != last_kept.end() && r.timestamp - it->second <= window_micros)
      continue;
    last_kept[key] = r.timestamp;
    kept.push_back(std::move(r));
  }
  return kept;
}

std::vector<UplinkRecord> filter_spreading_factor(
    std::span<const UplinkRecord> records, int sf_min, int sf_max) {
  if (sf_min > sf_max)
    throw ConfigError("filter_spreading_factor: sf_min > sf_max");
  std::vector<UplinkRecord> out;
  out.reserve(records.size());
  for (const auto& r : records)
    if (r.spreading_factor >= sf_min && r.spreading_factor <= sf_max)
      out.push_back(r);
  return out;
}

std::size_t train_size(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0,1)");
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * train_fraction));
}

SplitView chronological_split(std::span<const UplinkRecord> records,
                              double train_fraction) {
  if (!sorted_by_timestamp(records))
    throw DataError("chronological_split: input not sorted by timestamp");
  const std::size_t k = train_size(records.size(), train_fraction);
  return {records.subspan(0, k), records.subspan(k)};
}

std::vector<FoldSpan> kfold_spans(std::size_t n, int k) {
  if (k < 2) throw ConfigError("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw DataError("kfold: k exceeds the number of records");
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::vector<FoldSpan> folds;
  folds.reserve(static_cast<std::size_t>(k));
  std::size_t begin = 0;
  for (int j = 0; j < k; ++j) {
    const std::size_t len = base + (static_cast<std::size_t>(j) < extra ? 1 : 0);
    folds.push_back({begin, begin + len});
    begin += len;
  }
  return folds;
}

std::vector<FoldSpan> kfold_chronological(
    std::span<const UplinkRecord> records, int k) {
  if (!sorted_by_timestamp(records))
    throw DataError("kfold: input not sorted by timestamp");
  return kfold_spans(records.size(), k);
}

}  // namespace lorange
