#pragma once

#include <cstddef>

#include "ribp/rng.hpp"
#include "ribp/weights.hpp"

namespace ribp {

/// Exponential tilt beta applied to Bernoulli probabilities.
struct TiltParameter {
  double beta = 0.0;
};

/// max(50, ceil(10 * alpha)).
std::size_t default_truncation(double alpha);

/// First `truncation` size-ordered beta-process atoms (c = 1 only):
/// u_i ~ Beta(alpha, 1), pi_i = prod_{j<=i} u_j, accumulated in log space.
/// Throws std::invalid_argument for c != 1, alpha <= 0 or truncation == 0.
TruncatedWeights stick_breaking_weights(double alpha, std::size_t truncation, Rng& rng,
                                        double c = 1.0);

/// I i.i.d. Beta(c*alpha/I, c - c*alpha/I) weights. Requires I > alpha.
TruncatedWeights weak_limit_weights(double alpha, double c, std::size_t truncation, Rng& rng);

/// Dispatches on the construction.
TruncatedWeights prior_weights(WeightsKind kind, double alpha, double c, std::size_t truncation, Rng& rng);

/// pi'_i = pi_i e^beta / (pi_i e^beta + 1 - pi_i); beta = 0 returns the input.
TruncatedWeights esscher_transform(const TruncatedWeights& weights, TiltParameter tilt);

}  // namespace ribp
