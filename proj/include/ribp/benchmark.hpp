#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ribp/samplers.hpp"

namespace ribp {

struct BenchmarkConfig {
  double alpha = 5.0;
  double c = 1.0;
  std::vector<int> js{2, 5, 8};
  std::size_t replicates = 25;
  std::size_t rows = 100;
  /// Truncation levels for the frequency curves of the weight-conditioned
  /// methods, in addition to `full_truncation`.
  std::vector<std::size_t> truncations{10, 20, 40};
  /// Truncation used for the rejection records of the weight-conditioned
  /// methods; their curves at this level are labelled "full".
  std::size_t full_truncation = 50;
  std::vector<SimMethod> methods{SimMethod::CollapsedRejection, SimMethod::UncollapsedRejection,
                                 SimMethod::TiltedRejection, SimMethod::Inclusion,
                                 SimMethod::ExactRetrospective};
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::uint64_t max_proposals_per_row = 1'000'000;
  /// Prior construction for the weight-conditioned methods.
  WeightsKind weights = WeightsKind::StickBreaking;

  void validate() const;
};

struct RejectionRecord {
  SimMethod method;
  int j;
  std::size_t replicate;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejections = 0;
  bool capped = false;  // the per-row proposal cap was hit; counts are partial
  double seconds = 0.0;
  double cpu_seconds = 0.0;
};

/// Mean over replicates of the column frequencies m_i / N sorted in
/// descending order, with its standard error, at each rank.
struct FrequencyPoint {
  SimMethod method;
  int j;
  std::string truncation;  // a number or "full"
  std::size_t rank;
  double mean;
  double se;
  std::size_t replicates;  // replicates that finished without hitting the cap
};

struct BenchmarkResult {
  std::vector<RejectionRecord> records;  // method-major, then J, then replicate
  std::vector<FrequencyPoint> frequencies;
};

/// Runs one sampler on a fresh prior draw. Weight-conditioned methods draw
/// `kind` weights with `truncation` atoms from the same stream.
SimResult run_method(SimMethod method, WeightsKind kind, double alpha, double c, std::size_t truncation,
                     const RestrictingDistribution& f, std::size_t rows, Rng& rng,
                     const SamplerOptions& opts);

BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// Column frequencies sorted in descending order.
std::vector<double> sorted_frequencies(const FeatureMatrix& z);

}  // namespace ribp
