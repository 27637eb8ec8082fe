#include "derivd/workload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace derivd {

void WorkloadSpec::validate() const {
  if (query_count < 1) throw std::invalid_argument("workload: query_count must be at least 1");
  if (stream_length < 1) throw std::invalid_argument("workload: stream_length must be at least 1");
  if (kind == DistributionKind::zipf && !(alpha >= 0.5 && alpha <= 3.0))
    throw std::invalid_argument("workload: zipf alpha must lie in [0.5, 3.0]");
  if (kind == DistributionKind::custom) throw std::invalid_argument("workload: kind must be uniform or zipf");
}

DistributionKind parse_distribution_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "zipf") return DistributionKind::zipf;
  if (lower == "uniform") return DistributionKind::uniform;
  throw std::invalid_argument("unknown distribution kind '" + std::string(name) + "'");
}

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::uniform: return "uniform";
    case DistributionKind::zipf: return "zipf";
    case DistributionKind::custom: return "custom";
  }
  return "?";
}

std::vector<double> zipf_weights(std::size_t n, double alpha) {
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::pow(static_cast<double>(i + 1), -alpha);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

QueryDistribution build_distribution(const WorkloadSpec& spec, std::vector<Query> queries) {
  if (queries.empty()) throw std::invalid_argument("build_distribution: no queries");
  const std::size_t n = queries.size();
  std::vector<double> w;
  if (spec.kind == DistributionKind::zipf) {
    w = zipf_weights(n, spec.alpha);
  } else {
    w.assign(n, 1.0 / static_cast<double>(n));
  }
  return QueryDistribution(std::move(queries), std::move(w), spec.kind,
                           spec.kind == DistributionKind::zipf ? spec.alpha : 0.0);
}

StreamSampler::StreamSampler(const QueryDistribution& dist, std::uint64_t seed) : rng_(seed) {
  if (dist.empty()) throw std::invalid_argument("sampler: empty distribution");
  cdf_.reserve(dist.size());
  double acc = 0.0;
  for (double p : dist.weights()) {
    acc += p;
    cdf_.push_back(acc);
  }
}

QueryId StreamSampler::next() {
  const double u = rng_.uniform01() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf_.begin());
  return static_cast<QueryId>(std::min(idx, cdf_.size() - 1));
}

std::vector<Query> sample_stream(const QueryDistribution& dist, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("sample_stream: length must be at least 1");
  StreamSampler sampler(dist, seed);
  std::vector<Query> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(dist.queries()[sampler.next()]);
  return out;
}

}  // namespace derivd
