#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ribp/feature_matrix.hpp"
#include "ribp/restricting.hpp"
#include "ribp/rng.hpp"

namespace ribp {

enum class Scenario { FifteenFeature, OneInflatedPoisson };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view text);

struct SynthSpec {
  Scenario scenario = Scenario::FifteenFeature;
  std::size_t n = 500;
  std::size_t d = 36;
  double sigma_n2 = 0.25;
  double sigma_A2 = 1.0;
  std::uint64_t seed = 1;
  /// Slab mean of the one-inflated scenario.
  double lambda = 3.0;
  /// One-inflated only: emit per-group f (delta:1 or poisson:lambda) instead
  /// of the shared mixture.
  bool partially_exchangeable = false;

  static constexpr std::size_t kFifteenFeatures = 15;
  static constexpr std::size_t kPoissonFeatures = 20;
  static constexpr double kSpike = 0.8;

  void validate() const;
};

struct SynthData {
  Eigen::MatrixXd X;
  FeatureMatrix z;
  Eigen::MatrixXd A;
  std::vector<RestrictingDistribution> f;
  /// FifteenFeature: 0 for rows with one feature, 1 for the dense rows.
  /// OneInflatedPoisson: 0 for spike rows, 1 for slab rows.
  std::vector<int> labels;
};

/// FifteenFeature: 15 features with A rows from Normal(0, sigma_A2); 80% of
/// the rows take a uniformly random 14-subset, the rest a single uniformly
/// chosen feature, in shuffled order; f_n is uniform over k_n - 1 .. k_n + 1.
/// OneInflatedPoisson: 20 features; with probability 0.8 a row has one
/// feature, otherwise Poisson(lambda) features (redrawn while above 20), on a
/// uniformly random subset.
SynthData generate(const SynthSpec& spec, Rng& rng);

/// Mean number of features per row implied by the scenario: the concentration
/// used by the unrestricted baselines.
double baseline_alpha(const SynthSpec& spec);

}  // namespace ribp
