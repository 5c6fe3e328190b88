#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ribp/feature_matrix.hpp"
#include "ribp/measure.hpp"
#include "ribp/restricting.hpp"
#include "ribp/rng.hpp"
#include "ribp/weights.hpp"

namespace ribp {

/// log S_J for J = 0..j_max, where S_J is the probability that independent
/// Bernoulli(weights) draws sum to J. Computed with the two-term recursion
/// S_J^i = pi_i S_{J-1}^{i-1} + (1 - pi_i) S_J^{i-1} in log space.
std::vector<double> log_poisson_binomial(std::span<const double> weights, int j_max);

/// Cached conditional-Bernoulli quantities for one weight vector.
///
/// Holds prefix tables log S_J(pi_1..pi_i), suffix tables log S_J(pi_i..pi_I)
/// and the marginal inclusion probabilities
///   eta_{k;J} = pi_k S_{J-1}(pi without k) / S_J(pi),
/// for all J <= j_max. Leave-one-out values combine a prefix and a suffix
/// table, so building costs O(I * j_max^2). Immutable after construction.
class InclusionTable {
 public:
  /// Throws std::invalid_argument if j_max < 0 or j_max > I.
  InclusionTable(const TruncatedWeights& weights, int j_max);

  std::size_t truncation() const { return pi_.size(); }
  int j_max() const { return j_max_; }
  std::uint64_t weights_hash() const { return hash_; }
  std::span<const double> weights() const { return pi_; }

  /// log S_J over all I weights; -inf for J > I.
  double log_s(int j) const;
  /// log S_J over the first i weights.
  double log_prefix(std::size_t i, int j) const;
  /// log S_J over weights i..I-1 (0-based).
  double log_suffix(std::size_t i, int j) const;
  /// log S_J over all weights except k.
  double log_s_without(std::size_t k, int j) const;

  double eta(std::size_t k, int j) const { return eta_[k * (j_max_ + 1) + j]; }

  /// log R-BeP(z; pi, f) using the cached S values. The row sum must not
  /// exceed j_max unless f assigns it zero mass.
  double row_log_pmf(std::span<const std::uint8_t> z, const RestrictingDistribution& f) const;

  /// log prod_i pi_i^z_i (1 - pi_i)^(1 - z_i), the unrestricted Bernoulli term.
  double bernoulli_log_prob(std::span<const std::uint8_t> z) const;

  double log_weight(std::size_t i) const { return log_pi_[i]; }
  double log_one_minus_weight(std::size_t i) const { return log_1m_pi_[i]; }

 private:
  std::size_t idx(std::size_t i, int j) const { return i * (j_max_ + 1) + j; }

  std::vector<double> pi_;
  std::vector<double> log_pi_;
  std::vector<double> log_1m_pi_;
  int j_max_;
  std::uint64_t hash_;
  std::vector<double> prefix_;  // (I+1) x (j_max+1)
  std::vector<double> suffix_;  // (I+1) x (j_max+1)
  std::vector<double> eta_;     // I x (j_max+1)
};

/// InclusionTable over `weights` sized for every count in the support of `f`
/// (j_max = f.support_max(), or 0 when f is unrestricted).
InclusionTable build_inclusion_table(const TruncatedWeights& weights, int j_max);

/// Draws a row from R-BeP(pi, delta_J) one feature at a time. Feature k is
/// switched on with its inclusion probability among the features k..I that
/// remain, given the number of ones still to place:
///   P(z_k = 1 | r remaining) = pi_k S_{r-1}(pi_{k+1..I}) / S_r(pi_{k..I}).
/// Throws std::invalid_argument if J exceeds the table's j_max.
BinaryRow draw_by_draw_sample(const InclusionTable& table, int j, Rng& rng);

/// Tilt beta with sum_i esscher(pi, beta)_i = J, found by bisection.
/// Requires 0 < J < I (the root is at +-infinity otherwise).
TiltParameter solve_tilt(const TruncatedWeights& weights, int j);

struct InclusionBounds {
  double lower;
  double upper;
};

/// Bounds on the untruncated inclusion probability eta_{k;J} of a
/// stick-breaking truncation, using the Poisson(alpha * pi_I) tail. k is 0-based.
InclusionBounds inclusion_bounds(const TruncatedWeights& weights, int j, std::size_t k);

}  // namespace ribp
