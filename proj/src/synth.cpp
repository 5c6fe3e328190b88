#include "ribp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ribp/linear_gaussian.hpp"
#include "ribp/random.hpp"

namespace ribp {

std::string_view to_string(Scenario s) {
  return s == Scenario::FifteenFeature ? "fifteen-feature" : "one-inflated-poisson";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "fifteen-feature") return Scenario::FifteenFeature;
  if (text == "one-inflated-poisson") return Scenario::OneInflatedPoisson;
  throw std::invalid_argument("unknown scenario '" + std::string(text) +
                              "' (expected fifteen-feature or one-inflated-poisson)");
}

void SynthSpec::validate() const {
  if (n == 0 || d == 0) throw std::invalid_argument("synth: N and D must be positive");
  if (!(sigma_n2 > 0.0) || !(sigma_A2 > 0.0)) throw std::invalid_argument("synth: variances must be positive");
  if (scenario == Scenario::OneInflatedPoisson && !(lambda > 0.0 && std::isfinite(lambda)))
    throw std::invalid_argument("synth: lambda must be positive");
}

namespace {

BinaryRow random_subset(std::size_t width, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(width);
  std::iota(idx.begin(), idx.end(), 0);
  // partial Fisher-Yates
  for (std::size_t j = 0; j < k; ++j) {
    const auto pick = static_cast<std::size_t>(random::uniform_int(rng, j, width - 1));
    std::swap(idx[j], idx[pick]);
  }
  BinaryRow row(width, 0);
  for (std::size_t j = 0; j < k; ++j) row[idx[j]] = 1;
  return row;
}

}  // namespace

SynthData generate(const SynthSpec& spec, Rng& rng) {
  spec.validate();
  SynthData out;
  const bool fifteen = spec.scenario == Scenario::FifteenFeature;
  const std::size_t width = fifteen ? SynthSpec::kFifteenFeatures : SynthSpec::kPoissonFeatures;
  out.A = gaussian_matrix(width, spec.d, std::sqrt(spec.sigma_A2), rng);
  out.z = FeatureMatrix(spec.n, width);
  out.labels.resize(spec.n);

  if (fifteen) {
    const auto dense = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(spec.n)));
    std::vector<int> label(spec.n);
    for (std::size_t r = 0; r < spec.n; ++r) label[r] = r < dense ? 1 : 0;
    for (std::size_t r = spec.n; r > 1; --r)
      std::swap(label[r - 1], label[static_cast<std::size_t>(random::uniform_int(rng, 0, r - 1))]);
    for (std::size_t r = 0; r < spec.n; ++r) {
      out.labels[r] = label[r];
      const std::size_t k = label[r] ? width - 1 : 1;
      out.z.set_row(r, random_subset(width, k, rng));
      out.f.push_back(RestrictingDistribution::uniform_window(static_cast<int>(k), 1));
    }
  } else {
    const auto spike = RestrictingDistribution::point_mass(1);
    const auto slab = RestrictingDistribution::poisson(spec.lambda);
    const auto mixed = RestrictingDistribution::mixture({SynthSpec::kSpike, 1.0 - SynthSpec::kSpike}, {spike, slab});
    for (std::size_t r = 0; r < spec.n; ++r) {
      const bool is_slab = !random::bernoulli(rng, SynthSpec::kSpike);
      std::size_t k = 1;
      if (is_slab) {
        do k = static_cast<std::size_t>(random::poisson(rng, spec.lambda));
        while (k > width);
      }
      out.labels[r] = is_slab;
      out.z.set_row(r, random_subset(width, k, rng));
      out.f.push_back(spec.partially_exchangeable ? (is_slab ? slab : spike) : mixed);
    }
  }
  out.X = out.z.to_eigen() * out.A + gaussian_matrix(spec.n, spec.d, std::sqrt(spec.sigma_n2), rng);
  return out;
}

double baseline_alpha(const SynthSpec& spec) {
  if (spec.scenario == Scenario::FifteenFeature) {
    const double dense = std::round(0.8 * static_cast<double>(spec.n));
    return (dense * (SynthSpec::kFifteenFeatures - 1) + (spec.n - dense)) / static_cast<double>(spec.n);
  }
  return SynthSpec::kSpike + (1.0 - SynthSpec::kSpike) * spec.lambda;
}

}  // namespace ribp
