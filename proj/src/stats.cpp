#include "ribp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace ribp::stats {

namespace {

double chi2_sf(double x, double dof) {
  if (dof <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

// Indices of categories to keep separate; the rest form one pooled bin.
// Returns groups of category indices.
std::vector<std::vector<std::size_t>> pool(std::span<const double> expected, double min_expected) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> small;
  double small_mass = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (expected[k] >= min_expected) {
      groups.push_back({k});
    } else if (expected[k] > 0.0) {
      small.push_back(k);
      small_mass += expected[k];
    }
  }
  if (!small.empty()) {
    if (small_mass >= min_expected || groups.empty()) {
      groups.push_back(small);
    } else {
      auto smallest = std::min_element(groups.begin(), groups.end(), [&](auto& a, auto& b) {
        return expected[a.front()] < expected[b.front()];
      });
      smallest->insert(smallest->end(), small.begin(), small.end());
    }
  }
  return groups;
}

}  // namespace

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          double min_expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double mass = std::accumulate(expected.begin(), expected.end(), 0.0);
  std::vector<double> e(expected.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = n * expected[k] / mass;

  // Observations in zero-probability categories are an immediate failure.
  for (std::size_t k = 0; k < e.size(); ++k)
    if (e[k] == 0.0 && observed[k] > 0.0) return {INFINITY, 0.0, 0.0};

  TestResult r;
  const auto groups = pool(e, min_expected);
  for (const auto& g : groups) {
    double o = 0.0, x = 0.0;
    for (auto k : g) {
      o += observed[k];
      x += e[k];
    }
    r.statistic += (o - x) * (o - x) / x;
  }
  r.dof = static_cast<double>(groups.size()) - 1.0;
  r.p_value = chi2_sf(r.statistic, r.dof);
  return r;
}

TestResult chi_square_homogeneity(const std::vector<std::vector<double>>& table,
                                  double min_expected) {
  if (table.size() < 2) throw std::invalid_argument("chi_square_homogeneity: need two samples");
  const std::size_t cats = table.front().size();
  for (const auto& row : table)
    if (row.size() != cats) throw std::invalid_argument("chi_square_homogeneity: ragged table");

  std::vector<double> col(cats, 0.0);
  std::vector<double> row_tot(table.size(), 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < table.size(); ++s)
    for (std::size_t k = 0; k < cats; ++k) {
      col[k] += table[s][k];
      row_tot[s] += table[s][k];
      total += table[s][k];
    }
  // Pool on the smallest expected count of each column.
  const double min_row = *std::min_element(row_tot.begin(), row_tot.end());
  std::vector<double> least(cats);
  for (std::size_t k = 0; k < cats; ++k) least[k] = col[k] * min_row / total;
  const auto groups = pool(least, min_expected);

  TestResult r;
  for (std::size_t s = 0; s < table.size(); ++s)
    for (const auto& g : groups) {
      double o = 0.0, c = 0.0;
      for (auto k : g) {
        o += table[s][k];
        c += col[k];
      }
      const double x = row_tot[s] * c / total;
      if (x > 0.0) r.statistic += (o - x) * (o - x) / x;
    }
  r.dof = (static_cast<double>(groups.size()) - 1.0) * (static_cast<double>(table.size()) - 1.0);
  r.p_value = chi2_sf(r.statistic, r.dof);
  return r;
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double q = 0.0;
  if (lambda < 0.2) {
    q = 1.0;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-12) break;
      sign = -sign;
    }
    q = std::clamp(2.0 * q, 0.0, 1.0);
  }
  return {d, 0.0, q};
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  const std::size_t n = std::max(p.size(), q.size());
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sq = std::accumulate(q.begin(), q.end(), 0.0);
  double tv = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = k < p.size() ? p[k] / sp : 0.0;
    const double b = k < q.size() ? q[k] / sq : 0.0;
    tv += std::abs(a - b);
  }
  return 0.5 * tv;
}

}  // namespace ribp::stats
