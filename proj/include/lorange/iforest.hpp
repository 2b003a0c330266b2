#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lorange/records.hpp"

namespace lorange {

struct ForestParams {
  int n_trees = 100;
  int subsample = 256;  // psi; capped at the sample count
};

// Average unsuccessful-search path length c(n) of a BST with n points,
// computed from exact harmonic sums: c(1)=0, c(n)=2H(n-1)-2(n-1)/n.
double average_path_length(std::size_t n);

// Anomaly score from a mean isolation depth: 2^(-mean_path / c(psi)).
double score_from_mean_path(double mean_path, std::size_t psi);

// Isolation forest over row-major samples, built from uniform random
// (feature, split) choices on independent subsamples. Deterministic for a
// fixed seed.
class IsolationForest {
 public:
  static IsolationForest build(const double* data, std::size_t n_samples,
                               std::size_t n_features,
                               const ForestParams& params, std::uint64_t seed);

  // Anomaly score in (0,1); higher is more isolated.
  double score(const double* sample) const;

  std::size_t subsample_size() const { return psi_; }
  std::size_t depth_limit() const { return depth_limit_; }
  std::size_t n_trees() const { return roots_.size(); }
  // Deepest node over all trees (for the depth-limit invariant).
  std::size_t max_node_depth() const;

 private:
  struct Node {
    int feature = -1;       // -1 marks a leaf
    double split = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t size = 0;  // leaf population
  };

  std::size_t n_features_ = 0;
  std::size_t psi_ = 0;
  std::size_t depth_limit_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> roots_;
};

// All radio + environmental fields, in this fixed order.
inline constexpr std::size_t kAnomalyFeatureCount = 7;
std::vector<double> anomaly_features(const UplinkRecord& r);

struct DeviceFilterResult {
  std::vector<UplinkRecord> kept;
  std::vector<UplinkRecord> dropped;
};

// Drops the ceil(N*contamination) highest-scoring records of one device
// (ties: earlier timestamp dropped first). Record order does not affect the
// result: rows are ranked internally by (timestamp, counter) and the
// forest is seeded with global_seed xor fnv1a64(device_id).
DeviceFilterResult filter_device_records(std::span<const UplinkRecord> records,
                                         double contamination,
                                         std::uint64_t global_seed,
                                         const ForestParams& params = {});

}  // namespace lorange
