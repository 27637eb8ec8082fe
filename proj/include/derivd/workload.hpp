#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "derivd/kb.hpp"
#include "derivd/metrics.hpp"
#include "derivd/rng.hpp"

namespace derivd {

struct WorkloadSpec {
  DistributionKind kind = DistributionKind::zipf;
  double alpha = 1.2;
  std::size_t query_count = 1000;
  std::size_t stream_length = 100000;
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument unless query_count >= 1, stream_length >= 1
  /// and, for zipf, alpha lies in [0.5, 3.0].
  void validate() const;
};

DistributionKind parse_distribution_kind(std::string_view name);
std::string to_string(DistributionKind kind);

/// Rank 1 (the most frequent) goes to queries[0]. Queries must carry ids
/// 0..n-1 in order.
QueryDistribution build_distribution(const WorkloadSpec& spec, std::vector<Query> queries);

/// Normalized weights proportional to i^-alpha for ranks 1..n.
std::vector<double> zipf_weights(std::size_t n, double alpha);

/// Inverse-CDF sampler that owns its generator.
class StreamSampler {
 public:
  StreamSampler(const QueryDistribution& dist, std::uint64_t seed);
  QueryId next();

 private:
  std::vector<double> cdf_;
  Xoshiro256 rng_;
};

/// I.i.d. draws from `dist`; identical for identical (dist, length, seed).
std::vector<Query> sample_stream(const QueryDistribution& dist, std::size_t length, std::uint64_t seed);

}  // namespace derivd
