#pragma once

#include <span>

#include <Eigen/Dense>

#include "ribp/feature_matrix.hpp"
#include "ribp/rng.hpp"

namespace ribp {

/// true marks an entry of X as held out (excluded from the likelihood).
using HoldoutMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// X = Z A + eps with eps ~ Normal(0, sigma_n2) entrywise and a
/// Normal(0, sigma_A2) prior on every entry of A.
struct LinearGaussianModel {
  Eigen::MatrixXd A;  // I x D
  double sigma_A2 = 1.0;
  double sigma_n2 = 1.0;
  Eigen::MatrixXd X;  // N x D

  /// Throws std::invalid_argument on non-positive variances or shape mismatch.
  void validate(std::size_t truncation) const;
};

/// sum_{n,d} log Normal(x_nd; (ZA)_nd, sigma_n2) over entries not held out.
double log_likelihood(const FeatureMatrix& z, const LinearGaussianModel& model,
                      const HoldoutMask* holdout = nullptr);

/// Contribution of one row: sum_d log Normal(x_nd; (z A)_d, sigma_n2), where
/// `only_holdout` selects the held-out entries instead of the observed ones.
double row_log_likelihood(std::span<const std::uint8_t> z, std::size_t n,
                          const LinearGaussianModel& model, const HoldoutMask* holdout = nullptr,
                          bool only_holdout = false);

/// log p(X | Z) with A integrated out, i.e. each column of X is
/// Normal(0, sigma_A2 Z Z^T + sigma_n2 I). Uses the N x N covariance when
/// N < K and the K x K Woodbury form otherwise.
double log_likelihood_collapsed(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x,
                                double sigma_A2, double sigma_n2);
double log_likelihood_collapsed(const FeatureMatrix& z, const Eigen::MatrixXd& x,
                                double sigma_A2, double sigma_n2);

struct PosteriorA {
  Eigen::MatrixXd mean;        // K x D
  Eigen::MatrixXd covariance;  // K x K, shared by every column of A
};

/// Conjugate posterior of A: covariance sigma_n2 M^-1, mean M^-1 Z^T X with
/// M = Z^T Z + (sigma_n2 / sigma_A2) I.
PosteriorA posterior_A(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x, double sigma_A2,
                       double sigma_n2);
PosteriorA posterior_A(const FeatureMatrix& z, const Eigen::MatrixXd& x, double sigma_A2,
                       double sigma_n2);

/// One draw of A from a posterior_A result.
Eigen::MatrixXd sample_A(const PosteriorA& post, Rng& rng);

/// Entries drawn i.i.d. Normal(0, sd^2).
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sd, Rng& rng);

}  // namespace ribp
