#include "lorange/iforest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lorange/errors.hpp"
#include "lorange/rng.hpp"

namespace lorange {

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  double h = 0.0;  // H(n-1), exact sum (psi is small)
  for (std::size_t i = 1; i < n; ++i) h += 1.0 / static_cast<double>(i);
  return 2.0 * h -
         2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
}

double score_from_mean_path(double mean_path, std::size_t psi) {
  const double c = average_path_length(psi);
  if (c <= 0.0) return 0.5;
  return std::exp2(-mean_path / c);
}

namespace {

struct Builder {
  const double* data;
  std::size_t n_features;
  std::size_t depth_limit;
  Rng* rng;
  std::vector<double> mins, maxs;
};

}  // namespace

IsolationForest IsolationForest::build(const double* data,
                                       std::size_t n_samples,
                                       std::size_t n_features,
                                       const ForestParams& params,
                                       std::uint64_t seed) {
  if (n_samples < 2)
    throw DataError("isolation forest needs at least 2 samples");
  if (n_features < 1)
    throw DataError("isolation forest needs at least 1 feature");
  if (params.n_trees < 1) throw ConfigError("anomaly.n_trees must be >= 1");
  if (params.subsample < 2) throw ConfigError("anomaly.subsample must be >= 2");

  IsolationForest forest;
  forest.n_features_ = n_features;
  forest.psi_ = std::min<std::size_t>(params.subsample, n_samples);
  forest.depth_limit_ = static_cast<std::size_t>(
      std::ceil(std::log2(static_cast<double>(forest.psi_))));

  Rng rng(seed);
  std::vector<std::uint32_t> pool(n_samples);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::uint32_t> idx;
  Builder b{data, n_features, forest.depth_limit_, &rng, {}, {}};
  b.mins.resize(n_features);
  b.maxs.resize(n_features);

  // Recursive splitter over an index range; returns the node id.
  auto grow = [&](auto&& self, std::uint32_t* first, std::uint32_t* last,
                  std::size_t depth) -> std::int32_t {
    const std::size_t count = static_cast<std::size_t>(last - first);
    const auto make_leaf = [&]() {
      Node leaf;
      leaf.size = static_cast<std::uint32_t>(count);
      forest.nodes_.push_back(leaf);
      return static_cast<std::int32_t>(forest.nodes_.size() - 1);
    };
    if (count <= 1 || depth >= b.depth_limit) return make_leaf();

    // Candidate features are those with spread inside this node.
    for (std::size_t f = 0; f < n_features; ++f) {
      b.mins[f] = data[*first * n_features + f];
      b.maxs[f] = b.mins[f];
    }
    for (std::uint32_t* it = first + 1; it != last; ++it)
      for (std::size_t f = 0; f < n_features; ++f) {
        const double v = data[*it * n_features + f];
        b.mins[f] = std::min(b.mins[f], v);
        b.maxs[f] = std::max(b.maxs[f], v);
      }
    std::size_t n_usable = 0;
    for (std::size_t f = 0; f < n_features; ++f)
      if (b.maxs[f] > b.mins[f]) ++n_usable;
    if (n_usable == 0) return make_leaf();

    std::size_t pick = rng.uniform_int(n_usable);
    std::size_t feature = 0;
    for (std::size_t f = 0; f < n_features; ++f) {
      if (b.maxs[f] > b.mins[f]) {
        if (pick == 0) {
          feature = f;
          break;
        }
        --pick;
      }
    }
    const double split =
        rng.uniform(b.mins[feature], b.maxs[feature]);

    std::uint32_t* mid = std::partition(first, last, [&](std::uint32_t i) {
      return data[i * n_features + feature] < split;
    });
    if (mid == first || mid == last) return make_leaf();  // degenerate draw

    Node node;
    node.feature = static_cast<int>(feature);
    node.split = split;
    forest.nodes_.push_back(node);
    const std::int32_t id = static_cast<std::int32_t>(forest.nodes_.size() - 1);
    const std::int32_t l = self(self, first, mid, depth + 1);
    const std::int32_t r = self(self, mid, last, depth + 1);
    forest.nodes_[id].left = l;
    forest.nodes_[id].right = r;
    return id;
  };

  forest.roots_.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    // Partial Fisher-Yates draw of psi indices without replacement.
    idx.assign(pool.begin(), pool.end());
    for (std::size_t i = 0; i < forest.psi_; ++i) {
      const std::size_t j = i + rng.uniform_int(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(forest.psi_);
    forest.roots_.push_back(grow(grow, idx.data(), idx.data() + idx.size(), 0));
  }
  return forest;
}

double IsolationForest::score(const double* sample) const {
  double total = 0.0;
  for (const std::int32_t root : roots_) {
    std::size_t depth = 0;
    std::int32_t id = root;
    while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
      const Node& n = nodes_[static_cast<std::size_t>(id)];
      id = sample[n.feature] < n.split ? n.left : n.right;
      ++depth;
    }
    const Node& leaf = nodes_[static_cast<std::size_t>(id)];
    total += static_cast<double>(depth) + average_path_length(leaf.size);
  }
  return score_from_mean_path(total / static_cast<double>(roots_.size()), psi_);
}

std::size_t IsolationForest::max_node_depth() const {
  std::size_t deepest = 0;
  auto walk = [&](auto&& self, std::int32_t id, std::size_t depth) -> void {
    deepest = std::max(deepest, depth);
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.feature < 0) return;
    self(self, n.left, depth + 1);
    self(self, n.right, depth + 1);
  };
  for (const std::int32_t root : roots_) walk(walk, root, 0);
  return deepest;
}

std::vector<double> anomaly_features(const UplinkRecord& r) {
  return {r.rssi_dbm,  r.snr_db,    r.temperature_c, r.humidity_pct,
          r.co2_ppm,   r.pm25_ugm3, r.pressure_hpa};
}

DeviceFilterResult filter_device_records(std::span<const UplinkRecord> records,
                                         double contamination,
                                         std::uint64_t global_seed,
                                         const ForestParams& params) {
  if (!(contamination >= 0.0 && contamination < 1.0))
    throw ConfigError("anomaly.contamination must be in [0,1)");
  for (const auto& r : records)
    if (r.device_id != records.front().device_id)
      throw DataError("filter_device_records: mixed device_ids in input");

  DeviceFilterResult result;
  const std::size_t n = records.size();
  if (n == 0) return result;

  // Canonical processing order by record identity makes the outcome
  // independent of the caller's ordering.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (records[a].timestamp != records[b].timestamp)
      return records[a].timestamp < records[b].timestamp;
    return records[a].counter < records[b].counter;
  });

  const std::size_t n_drop = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * contamination));
  if (n_drop == 0) {
    result.kept.reserve(n);
    for (const std::uint32_t i : order) result.kept.push_back(records[i]);
    return result;
  }

  std::vector<double> features(n * kAnomalyFeatureCount);
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = anomaly_features(records[order[k]]);
    std::copy(row.begin(), row.end(),
              features.begin() + static_cast<std::ptrdiff_t>(
                                     k * kAnomalyFeatureCount));
  }

  const std::uint64_t seed =
      global_seed ^ fnv1a64(records.front().device_id);
  const auto forest = IsolationForest::build(features.data(), n,
                                             kAnomalyFeatureCount, params, seed);

  std::vector<double> scores(n);
  for (std::size_t k = 0; k < n; ++k)
    scores[k] = forest.score(features.data() + k * kAnomalyFeatureCount);

  // Rank by score descending; ties drop the earlier timestamp first. The
  // canonical order index doubles as the time tiebreak.
  std::vector<std::uint32_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0u);
  std::sort(rank.begin(), rank.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  std::vector<bool> drop(n, false);
  for (std::size_t k = 0; k < n_drop; ++k) drop[rank[k]] = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (drop[k])
      result.dropped.push_back(records[order[k]]);
    else
      result.kept.push_back(records[order[k]]);
  }
  return result;
}

}  // namespace lorange
