#include "ribp/linear_gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ribp/errors.hpp"
#include "ribp/random.hpp"

namespace ribp {

namespace {

constexpr double kJitter = 1e-10;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Cholesky of a symmetric positive definite matrix, retrying with jitter.
Eigen::LLT<Eigen::MatrixXd> robust_llt(Eigen::MatrixXd m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  double jitter = kJitter;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-2) throw NumericalError("Cholesky factorization failed");
    m.diagonal().array() += jitter;
    llt.compute(m);
    jitter *= 10.0;
  }
  return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

void LinearGaussianModel::validate(std::size_t truncation) const {
  if (!(sigma_A2 > 0.0) || !(sigma_n2 > 0.0))
    throw std::invalid_argument("linear-Gaussian model: variances must be positive");
  if (static_cast<std::size_t>(A.rows()) != truncation)
    throw std::invalid_argument("linear-Gaussian model: A has the wrong number of rows");
  if (A.cols() != X.cols())
    throw std::invalid_argument("linear-Gaussian model: A and X disagree on D");
}

double row_log_likelihood(std::span<const std::uint8_t> z, std::size_t n,
                          const LinearGaussianModel& model, const HoldoutMask* holdout,
                          bool only_holdout) {
  const Eigen::Index d_max = model.X.cols();
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d_max);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i]) mean += model.A.row(i);
  double ss = 0.0;
  int count = 0;
  for (Eigen::Index d = 0; d < d_max; ++d) {
    const bool held = holdout != nullptr && (*holdout)(n, d);
    if (held != only_holdout) continue;
    const double r = model.X(n, d) - mean(d);
    ss += r * r;
    ++count;
  }
  return -0.5 * count * (kLog2Pi + std::log(model.sigma_n2)) - 0.5 * ss / model.sigma_n2;
}

double log_likelihood(const FeatureMatrix& z, const LinearGaussianModel& model,
                      const HoldoutMask* holdout) {
  if (z.rows() != static_cast<std::size_t>(model.X.rows()) ||
      z.cols() != static_cast<std::size_t>(model.A.rows()))
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  if (holdout && (holdout->rows() != model.X.rows() || holdout->cols() != model.X.cols()))
    throw std::invalid_argument("log_likelihood: mask dimension mismatch");
  double total = 0.0;
  for (std::size_t n = 0; n < z.rows(); ++n) total += row_log_likelihood(z.row(n), n, model, holdout);
  return total;
}

double log_likelihood_collapsed(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x,
                                double sigma_A2, double sigma_n2) {
  if (z.rows() != x.rows()) throw std::invalid_argument("collapsed likelihood: N mismatch");
  if (!(sigma_A2 > 0.0) || !(sigma_n2 > 0.0))
    throw std::invalid_argument("collapsed likelihood: variances must be positive");
  const double n = static_cast<double>(x.rows());
  const double d = static_cast<double>(x.cols());
  const double k = static_cast<double>(z.cols());
  if (x.rows() < z.cols()) {
    Eigen::MatrixXd cov = sigma_A2 * z * z.transpose();
    cov.diagonal().array() += sigma_n2;
    const auto llt = robust_llt(cov);
    const double quad = (x.array() * llt.solve(x).array()).sum();
    return -0.5 * n * d * kLog2Pi - 0.5 * d * log_det(llt) - 0.5 * quad;
  }
  Eigen::MatrixXd m = z.transpose() * z;
  m.diagonal().array() += sigma_n2 / sigma_A2;
  const auto llt = robust_llt(m);
  const Eigen::MatrixXd ztx = z.transpose() * x;
  const double quad = x.squaredNorm() - (ztx.array() * llt.solve(ztx).array()).sum();
  return -0.5 * n * d * kLog2Pi - 0.5 * (n - k) * d * std::log(sigma_n2) -
         0.5 * k * d * std::log(sigma_A2) - 0.5 * d * log_det(llt) - 0.5 * quad / sigma_n2;
}

double log_likelihood_collapsed(const FeatureMatrix& z, const Eigen::MatrixXd& x,
                                double sigma_A2, double sigma_n2) {
  return log_likelihood_collapsed(z.to_eigen(), x, sigma_A2, sigma_n2);
}

PosteriorA posterior_A(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x, double sigma_A2,
                       double sigma_n2) {
  if (z.rows() != x.rows()) throw std::invalid_argument("posterior_A: N mismatch");
  Eigen::MatrixXd m = z.transpose() * z;
  m.diagonal().array() += sigma_n2 / sigma_A2;
  const auto llt = robust_llt(m);
  PosteriorA post;
  post.mean = llt.solve(z.transpose() * x);
  post.covariance = sigma_n2 * llt.solve(Eigen::MatrixXd::Identity(z.cols(), z.cols()));
  return post;
}

PosteriorA posterior_A(const FeatureMatrix& z, const Eigen::MatrixXd& x, double sigma_A2,
                       double sigma_n2) {
  return posterior_A(z.to_eigen(), x, sigma_A2, sigma_n2);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sd, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  // Fill row by row so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = random::normal(rng, 0.0, sd);
  return m;
}

Eigen::MatrixXd sample_A(const PosteriorA& post, Rng& rng) {
  const auto llt = robust_llt(post.covariance);
  const Eigen::MatrixXd e = gaussian_matrix(post.mean.rows(), post.mean.cols(), 1.0, rng);
  return post.mean + llt.matrixL().toDenseMatrix() * e;
}

}  // namespace ribp
