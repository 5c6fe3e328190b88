#pragma once

// Variate generation on top of Rng. Everything here is a thin wrapper over
// Boost.Random, whose algorithms are fixed in source (unlike std:: distributions)
// so draws replay bit-for-bit across platforms.

#include <cmath>
#include <cstdint>
#include <span>

#include "ribp/rng.hpp"

namespace ribp::random {

bool bernoulli(Rng& rng, double p);

double normal(Rng& rng, double mean = 0.0, double sd = 1.0);

/// Gamma(shape, 1) variate.
double gamma(Rng& rng, double shape);

/// log of a Gamma(shape, 1) variate, accurate for tiny shapes where the variate
/// itself underflows: log G_a = log G_{a+1} + log(U) / a.
double log_gamma_variate(Rng& rng, double shape);

/// Beta(a, b) variate computed from log-gamma variates; never NaN, may be
/// exactly 0 or 1 when the true value is closer than double resolution.
double beta(Rng& rng, double a, double b);

/// log of a Beta(a, b) variate.
double log_beta_variate(Rng& rng, double a, double b);

std::int64_t poisson(Rng& rng, double mean);

/// Uniform integer in [lo, hi].
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// Index drawn with probability proportional to exp(log_weights[i]).
/// Entries equal to -inf have zero probability; at least one must be finite.
std::size_t categorical_from_log(Rng& rng, std::span<const double> log_weights);

/// Index drawn with probability proportional to weights[i] >= 0.
std::size_t categorical(Rng& rng, std::span<const double> weights);

}  // namespace ribp::random
