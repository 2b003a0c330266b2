#include <algorithm>

#include "doctest.h"
#include "lorange/dataset.hpp"
#include "lorange/errors.hpp"

using namespace lorange;

namespace {

UplinkRecord rec(const std::string& dev, std::uint32_t counter,
                 std::int64_t t_sec, int sf = 7) {
  UplinkRecord r;
  r.device_id = dev;
  r.counter = counter;
  r.timestamp = t_sec * kMicrosPerSecond;
  r.spreading_factor = sf;
  r.frequency_mhz = 868.1;
  r.rssi_dbm = -100.0;
  return r;
}

}  // namespace

TEST_CASE("deduplicate keeps the earlier of a duplicate pair") {
  std::vector<UplinkRecord> in = {rec("EN0", 42, 100), rec("EN0", 42, 50)};
  const auto out = deduplicate(in);
  REQUIRE(out.size() == 1);
  CHECK(out[0].timestamp == 50 * kMicrosPerSecond);
}

TEST_CASE("deduplicate keeps distinct counters") {
  std::vector<UplinkRecord> in = {rec("EN0", 1, 0), rec("EN0", 2, 60),
                                  rec("EN0", 3, 120)};
  CHECK(deduplicate(in).size() == 3);
}

TEST_CASE("deduplicate on interleaved 6-row fixture removes exactly 2") {
  // Hand-counted: EN0 has counters {1,2,2}, EN1 has {7,7,8}; one duplicate
  // per device leaves 4 records.
  std::vector<UplinkRecord> in = {
      rec("EN0", 1, 0),  rec("EN1", 7, 10),  rec("EN0", 2, 60),
      rec("EN1", 7, 70), rec("EN0", 2, 120), rec("EN1", 8, 130),
  };
  const auto out = deduplicate(in);
  CHECK(out.size() == 4);
  // Output sorted by (device, timestamp).
  for (std::size_t i = 1; i < out.size(); ++i) {
    const bool ordered =
        out[i - 1].device_id < out[i].device_id ||
        (out[i - 1].device_id == out[i].device_id &&
         out[i - 1].timestamp <= out[i].timestamp);
    CHECK(ordered);
  }
}

TEST_CASE("deduplicate treats the same counter outside the window as a wrap") {
  std::vector<UplinkRecord> in = {rec("EN0", 5, 0), rec("EN0", 5, 3601)};
  CHECK(deduplicate(in).size() == 2);   // beyond the 1h default window
  std::vector<UplinkRecord> in2 = {rec("EN0", 5, 0), rec("EN0", 5, 3599)};
  CHECK(deduplicate(in2).size() == 1);  // inside the window
}

TEST_CASE("deduplicate is idempotent") {
  std::vector<UplinkRecord> in = {
      rec("EN0", 1, 0),  rec("EN1", 7, 10), rec("EN0", 1, 30),
      rec("EN0", 2, 60), rec("EN1", 7, 70),
  };
  const auto once = deduplicate(in);
  const auto twice = deduplicate(once);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].device_id == twice[i].device_id);
    CHECK(once[i].timestamp == twice[i].timestamp);
  }
}

TEST_CASE("spreading factor retention") {
  std::vector<UplinkRecord> in = {rec("EN0", 1, 0, 7), rec("EN0", 2, 60, 10),
                                  rec("EN0", 3, 120, 11)};
  const auto out = filter_spreading_factor(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].spreading_factor == 7);
  CHECK(out[1].spreading_factor == 10);

  std::vector<UplinkRecord> all7 = {rec("EN0", 1, 0, 7), rec("EN0", 2, 60, 7)};
  CHECK(filter_spreading_factor(all7).size() == 2);

  std::vector<UplinkRecord> all12 = {rec("EN0", 1, 0, 12),
                                     rec("EN0", 2, 60, 12)};
  CHECK(filter_spreading_factor(all12).empty());
}

TEST_CASE("chronological split sizes") {
  std::vector<UplinkRecord> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(rec("EN0", i, i * 60));
  const auto sp = chronological_split(ten, 0.8);
  CHECK(sp.train.size() == 8);
  CHECK(sp.test.size() == 2);

  std::vector<UplinkRecord> five(ten.begin(), ten.begin() + 5);
  const auto sp5 = chronological_split(five, 0.8);
  CHECK(sp5.train.size() == 4);  // floor rule
  CHECK(sp5.test.size() == 1);

  // The campaign-scale arithmetic, checked without materializing records.
  CHECK(train_size(2079535, 0.8) == 1663628);
  CHECK(2079535 - train_size(2079535, 0.8) == 415907);
}

TEST_CASE("chronological split never violates time ordering") {
  std::vector<UplinkRecord> recs;
  for (int i = 0; i < 23; ++i) recs.push_back(rec("EN0", i, i * 7 + 3));
  const auto sp = chronological_split(recs, 0.37);
  REQUIRE(!sp.train.empty());
  REQUIRE(!sp.test.empty());
  CHECK(sp.train.back().timestamp <= sp.test.front().timestamp);
  CHECK(sp.train.size() + sp.test.size() == recs.size());
}

TEST_CASE("chronological split rejects unsorted input") {
  std::vector<UplinkRecord> bad = {rec("EN0", 1, 100), rec("EN0", 2, 50)};
  CHECK_THROWS_AS(chronological_split(bad, 0.8), DataError);
}

TEST_CASE("kfold block sizes and partition property") {
  std::vector<UplinkRecord> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(rec("EN0", i, i * 60));
  const auto folds10 = kfold_chronological(ten, 5);
  REQUIRE(folds10.size() == 5);
  for (const auto& f : folds10) CHECK(f.val_end - f.val_begin == 2);

  const auto folds11 = kfold_spans(11, 5);
  std::vector<std::size_t> sizes;
  for (const auto& f : folds11) sizes.push_back(f.val_end - f.val_begin);
  CHECK(sizes == std::vector<std::size_t>{3, 2, 2, 2, 2});

  // Union of validation blocks covers every record exactly once.
  std::size_t covered = 0;
  std::size_t prev_end = 0;
  for (const auto& f : folds11) {
    CHECK(f.val_begin == prev_end);
    covered += f.val_end - f.val_begin;
    prev_end = f.val_end;
  }
  CHECK(covered == 11);

  CHECK_THROWS_AS(kfold_spans(3, 5), DataError);   // k > N
  CHECK_THROWS_AS(kfold_spans(10, 1), ConfigError);  // k < 2
}
