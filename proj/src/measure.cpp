#include "ribp/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ribp/numeric.hpp"
#include "ribp/random.hpp"

namespace ribp {

std::size_t default_truncation(double alpha) {
  return std::max<std::size_t>(50, static_cast<std::size_t>(std::ceil(10.0 * alpha)));
}

TruncatedWeights stick_breaking_weights(double alpha, std::size_t truncation, Rng& rng,
                                        double c) {
  if (c != 1.0)
    throw std::invalid_argument("stick-breaking construction is only available for c = 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("stick-breaking: alpha must be positive");
  if (truncation == 0) throw std::invalid_argument("stick-breaking: truncation must be >= 1");
  std::vector<double> pi(truncation);
  double log_pi = 0.0;
  for (auto& p : pi) {
    // Beta(alpha, 1) = U^(1/alpha)
    log_pi += std::log1p(-rng.uniform()) / alpha;
    p = std::exp(log_pi);
  }
  return TruncatedWeights(std::move(pi), alpha, c, WeightsKind::StickBreaking);
}

TruncatedWeights prior_weights(WeightsKind kind, double alpha, double c, std::size_t truncation, Rng& rng) {
  return kind == WeightsKind::StickBreaking ? stick_breaking_weights(alpha, truncation, rng, c)
                                            : weak_limit_weights(alpha, c, truncation, rng);
}

TruncatedWeights weak_limit_weights(double alpha, double c, std::size_t truncation, Rng& rng) {
  if (!(alpha > 0.0) || !(c > 0.0))
    throw std::invalid_argument("weak limit: alpha and c must be positive");
  if (!(static_cast<double>(truncation) > alpha))
    throw std::invalid_argument("weak limit: truncation level must exceed alpha");
  const double a = c * alpha / static_cast<double>(truncation);
  const double b = c - a;
  std::vector<double> pi(truncation);
  for (auto& p : pi) p = random::beta(rng, a, b);
  return TruncatedWeights(std::move(pi), alpha, c, WeightsKind::WeakLimit);
}

TruncatedWeights esscher_transform(const TruncatedWeights& weights, TiltParameter tilt) {
  if (!std::isfinite(tilt.beta)) throw std::invalid_argument("esscher: tilt must be finite");
  if (tilt.beta == 0.0) return weights;
  std::vector<double> pi(weights.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = logistic(logit(weights[i]) + tilt.beta);
  return weights.with_values(std::move(pi));
}

}  // namespace ribp
