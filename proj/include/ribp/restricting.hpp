#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ribp/rng.hpp"

namespace ribp {

/// Distribution f over the number of non-zero entries in a row.
///
/// Every variant except Unrestricted is resolved at construction into an
/// explicit pmf over 0..support_max(). Poisson is truncated at the smallest
/// count whose cumulative mass reaches 1 - 1e-10 and renormalized.
///
/// Unrestricted stands for "no restriction": rows follow the plain Bernoulli
/// process, which is what the IBP baselines use. It has no pmf of its own
/// (the implied count law is the Poisson-binomial of the weights) and its
/// acceptance probability in the rejection constructions is 1.
///
/// Text form (see parse): `delta:J`, `uniform:k:h`, `poisson:lambda`,
/// `mix:w1*spec1+w2*spec2`, `table:p0,p1,...`, `unrestricted`.
class RestrictingDistribution {
 public:
  enum class Kind { PointMass, UniformWindow, Poisson, Mixture, Table, Unrestricted };

  static constexpr double kPoissonTailMass = 1e-10;

  static RestrictingDistribution point_mass(int j);
  /// Uniform over {max(0, center - halfwidth), ..., center + halfwidth}.
  static RestrictingDistribution uniform_window(int center, int halfwidth);
  static RestrictingDistribution poisson(double lambda);
  static RestrictingDistribution mixture(std::vector<double> weights,
                                         std::vector<RestrictingDistribution> components);
  /// Explicit pmf over 0..pmf.size()-1; must sum to 1 within 1e-6 (renormalized).
  static RestrictingDistribution table(std::vector<double> pmf);
  static RestrictingDistribution unrestricted();

  /// Parses the text form; throws std::invalid_argument on malformed input.
  static RestrictingDistribution parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_unrestricted() const { return kind_ == Kind::Unrestricted; }
  /// True when all mass sits on a single count (the location-update regime).
  bool is_point_mass() const;

  /// f(k); zero outside the support. Not defined for Unrestricted.
  double pmf(int k) const;
  double log_pmf(int k) const;

  /// Probability that a rejection construction accepts a row with k ones:
  /// f(k) for restricted variants, 1 for Unrestricted.
  double accept_probability(int k) const;

  /// Largest count with non-zero mass. 0 for Unrestricted.
  int support_max() const { return support_max_; }
  int support_min() const { return support_min_; }

  /// pmf over 0..support_max().
  std::span<const double> probabilities() const { return pmf_; }

  double mean() const;

  /// Draws a count from f. Not defined for Unrestricted.
  int sample(Rng& rng) const;

  /// Throws std::invalid_argument if the support exceeds the truncation level.
  void require_fits(std::size_t truncation) const;

  /// Canonical text form; parse(to_spec()) reproduces the distribution.
  const std::string& to_spec() const { return spec_; }

  friend bool operator==(const RestrictingDistribution& a, const RestrictingDistribution& b) {
    return a.kind_ == b.kind_ && a.pmf_ == b.pmf_;
  }

 private:
  RestrictingDistribution(Kind kind, std::vector<double> pmf, std::string spec);

  Kind kind_;
  std::vector<double> pmf_;
  std::string spec_;
  int support_min_ = 0;
  int support_max_ = 0;
};

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double x);

}  // namespace ribp
