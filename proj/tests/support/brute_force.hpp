#pragma once
// Enumeration oracles. Everything here walks all 2^I binary vectors, so it is
// only usable for small I, and shares no code with the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Row = std::vector<std::uint8_t>;

inline void for_each_row(std::size_t width, const std::function<void(const Row&)>& visit) {
  Row z(width, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << width); ++mask) {
    for (std::size_t i = 0; i < width; ++i) z[i] = (mask >> i) & 1;
    visit(z);
  }
}

inline int count(const Row& z) {
  int c = 0;
  for (auto v : z) c += v;
  return c;
}

inline double bernoulli_prob(const Row& z, const std::vector<double>& pi) {
  double p = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) p *= z[i] ? pi[i] : 1.0 - pi[i];
  return p;
}

/// P(sum of independent Bernoulli(pi) = j).
inline double s(const std::vector<double>& pi, int j) {
  double total = 0.0;
  for_each_row(pi.size(), [&](const Row& z) {
    if (count(z) == j) total += bernoulli_prob(z, pi);
  });
  return total;
}

/// P(z_k = 1 | sum = j).
inline double eta(const std::vector<double>& pi, std::size_t k, int j) {
  double on = 0.0, all = 0.0;
  for_each_row(pi.size(), [&](const Row& z) {
    if (count(z) != j) return;
    const double p = bernoulli_prob(z, pi);
    all += p;
    if (z[k]) on += p;
  });
  return all > 0.0 ? on / all : 0.0;
}

/// f(|z|) * Bernoulli(z) / S_|z|, with f given as a pmf vector.
inline double restricted_pmf(const Row& z, const std::vector<double>& pi,
                             const std::vector<double>& f) {
  const int c = count(z);
  const double fc = c < static_cast<int>(f.size()) ? f[c] : 0.0;
  if (fc == 0.0) return 0.0;
  return fc * bernoulli_prob(z, pi) / s(pi, c);
}

inline std::uint64_t encode(const Row& z) {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < z.size(); ++i) code |= std::uint64_t(z[i] != 0) << i;
  return code;
}

}  // namespace oracle
