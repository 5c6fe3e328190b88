#include "ribp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ribp {

std::string_view to_string(WeightsKind kind) {
  switch (kind) {
    case WeightsKind::StickBreaking:
      return "stick-breaking";
    case WeightsKind::WeakLimit:
      return "weak-limit";
  }
  return "unknown";
}

WeightsKind parse_weights_kind(std::string_view name) {
  if (name == "stick-breaking") return WeightsKind::StickBreaking;
  if (name == "weak-limit") return WeightsKind::WeakLimit;
  throw std::invalid_argument("unknown weights construction '" + std::string(name) +
                              "' (expected stick-breaking or weak-limit)");
}

TruncatedWeights::TruncatedWeights(std::vector<double> weights, double alpha, double c,
                                   WeightsKind kind)
    : weights_(std::move(weights)), alpha_(alpha), c_(c), kind_(kind) {
  if (weights_.empty()) throw std::invalid_argument("weights: truncation level must be >= 1");
  if (!(alpha_ > 0.0) || !(c_ > 0.0))
    throw std::invalid_argument("weights: alpha and c must be positive");
  for (double& w : weights_) {
    if (std::isnan(w)) throw std::invalid_argument("weights: NaN weight");
    w = std::clamp(w, kMinWeight, 1.0 - kMinWeight);
  }
  if (kind_ == WeightsKind::StickBreaking &&
      !std::is_sorted(weights_.begin(), weights_.end(), std::greater<>()))
    throw std::invalid_argument("weights: stick-breaking weights must be non-increasing");
}

TruncatedWeights TruncatedWeights::with_values(std::vector<double> weights) const {
  return TruncatedWeights(std::move(weights), alpha_, c_, kind_);
}

BetaPrimeWeights::BetaPrimeWeights(std::vector<double> odds) : odds_(std::move(odds)) {
  for (double w : odds_) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("beta-prime weights must be finite and positive");
  }
}

BetaPrimeWeights BetaPrimeWeights::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("beta-prime scale must be positive");
  std::vector<double> out(odds_);
  for (double& w : out) w *= factor;
  return BetaPrimeWeights(std::move(out));
}

BetaPrimeWeights to_beta_prime(const TruncatedWeights& weights) {
  std::vector<double> odds(weights.size());
  for (std::size_t i = 0; i < odds.size(); ++i) odds[i] = weights[i] / (1.0 - weights[i]);
  return BetaPrimeWeights(std::move(odds));
}

TruncatedWeights from_beta_prime(const BetaPrimeWeights& odds, const TruncatedWeights& like) {
  std::vector<double> pi(odds.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = odds[i] / (1.0 + odds[i]);
  return like.with_values(std::move(pi));
}

}  // namespace ribp
