#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace ribp {

/// How a finite weight vector was constructed.
enum class WeightsKind {
  StickBreaking,  // size-ordered, non-increasing
  WeakLimit,      // i.i.d. Beta(c*alpha/I, c - c*alpha/I), unordered
};

std::string_view to_string(WeightsKind kind);
/// Accepts "stick-breaking" and "weak-limit".
WeightsKind parse_weights_kind(std::string_view name);

/// Finite approximation (pi_1..pi_I) to the beta-process directing measure.
///
/// Every weight is clamped to [kMinWeight, 1 - kMinWeight] on construction so
/// odds and log-probabilities stay finite.
class TruncatedWeights {
 public:
  static constexpr double kMinWeight = 1e-12;

  /// Throws std::invalid_argument when the vector is empty, alpha or c are not
  /// positive, any weight is NaN, or StickBreaking weights are increasing.
  TruncatedWeights(std::vector<double> weights, double alpha, double c, WeightsKind kind);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const { return weights_; }
  double alpha() const { return alpha_; }
  double c() const { return c_; }
  WeightsKind kind() const { return kind_; }

  /// Smallest instantiated weight pi_I (the last one for stick-breaking).
  double last() const { return weights_.back(); }

  /// Same alpha, c and kind with a new weight vector.
  TruncatedWeights with_values(std::vector<double> weights) const;

 private:
  std::vector<double> weights_;
  double alpha_;
  double c_;
  WeightsKind kind_;
};

/// Odds transform w_i = pi_i / (1 - pi_i) of a weight vector.
class BetaPrimeWeights {
 public:
  explicit BetaPrimeWeights(std::vector<double> odds);

  std::size_t size() const { return odds_.size(); }
  double operator[](std::size_t i) const { return odds_[i]; }
  std::span<const double> values() const { return odds_; }

  /// Multiply every odds value by `factor` > 0.
  BetaPrimeWeights scaled(double factor) const;

 private:
  std::vector<double> odds_;
};

BetaPrimeWeights to_beta_prime(const TruncatedWeights& weights);

/// Inverse of to_beta_prime; alpha, c and kind are taken from `like`.
TruncatedWeights from_beta_prime(const BetaPrimeWeights& odds, const TruncatedWeights& like);

}  // namespace ribp
