#include "ribp/random.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "ribp/numeric.hpp"

namespace ribp::random {

bool bernoulli(Rng& rng, double p) { return rng.uniform() < p; }

double normal(Rng& rng, double mean, double sd) {
  boost::random::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

double gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

double log_gamma_variate(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape >= 1.0) return std::log(gamma(rng, shape));
  // 1 - uniform() lies in (0, 1] so the log is finite.
  const double log_u = std::log1p(-rng.uniform());
  return std::log(gamma(rng, shape + 1.0)) + log_u / shape;
}

double log_beta_variate(Rng& rng, double a, double b) {
  const double ga = log_gamma_variate(rng, a);
  const double gb = log_gamma_variate(rng, b);
  // log(Ga / (Ga + Gb)) = -log(1 + exp(gb - ga))
  return -log1pexp(gb - ga);
}

double beta(Rng& rng, double a, double b) {
  const double ga = log_gamma_variate(rng, a);
  const double gb = log_gamma_variate(rng, b);
  return logistic(ga - gb);
}

std::int64_t poisson(Rng& rng, double mean) {
  if (mean < 0.0 || !std::isfinite(mean))
    throw std::invalid_argument("poisson: mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  boost::random::poisson_distribution<std::int64_t, double> dist(mean);
  return dist(rng);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  boost::random::uniform_int_distribution<std::int64_t> dist(lo, hi);
  return dist(rng);
}

std::size_t categorical_from_log(Rng& rng, std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("categorical: no outcomes");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(top)) {
    if (top == std::numeric_limits<double>::infinity()) {
      return static_cast<std::size_t>(
          std::max_element(log_weights.begin(), log_weights.end()) - log_weights.begin());
    }
    throw std::invalid_argument("categorical: all outcomes have zero weight");
  }
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - top);
  double u = rng.uniform() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double w = std::exp(log_weights[i] - top);
    if (w <= 0.0) continue;
    last = i;
    if (u < w) return i;
    u -= w;
  }
  return last;
}

std::size_t categorical(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("categorical: all outcomes have zero weight");
  double u = rng.uniform() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last;
}

}  // namespace ribp::random
