#pragma once

#include <cstdint>
#include <span>

#include "ribp/restricting.hpp"
#include "ribp/weights.hpp"

namespace ribp {

/// log R-BeP(z; pi, f) = log f(|z|) + sum_i log pi_i^z_i (1-pi_i)^(1-z_i) - log S_|z|.
/// Returns -inf when f(|z|) = 0. With an unrestricted f this is the plain
/// Bernoulli-process log-probability.
/// Throws std::invalid_argument if len(z) != I or f's support exceeds I.
double restricted_bernoulli_log_pmf(std::span<const std::uint8_t> z,
                                    const TruncatedWeights& weights,
                                    const RestrictingDistribution& f);

}  // namespace ribp
