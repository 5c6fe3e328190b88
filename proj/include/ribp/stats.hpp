#pragma once

#include <span>
#include <vector>

namespace ribp::stats {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson goodness-of-fit of `observed` counts against category
/// probabilities `expected` (renormalized). Categories with expected count
/// below `min_expected` are pooled into one bin, which is then merged into
/// the smallest remaining bin if it is still too small.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          double min_expected = 5.0);

/// Chi-square test of homogeneity for a samples x categories table of
/// counts. Sparse categories are pooled as in chi_square_gof.
TestResult chi_square_homogeneity(const std::vector<std::vector<double>>& table,
                                  double min_expected = 5.0);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q_KS((sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double mean(std::span<const double> xs);
/// Sample standard deviation / sqrt(n).
double standard_error(std::span<const double> xs);
double median(std::vector<double> xs);

/// 0.5 * sum |p - q| after normalizing both.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace ribp::stats
