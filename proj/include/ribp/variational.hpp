#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ribp/feature_matrix.hpp"
#include "ribp/inclusion.hpp"
#include "ribp/linear_gaussian.hpp"
#include "ribp/restricting.hpp"
#include "ribp/rng.hpp"
#include "ribp/weights.hpp"

namespace ribp {

/// Mean-field state for the hybrid scheme.
///
/// q(A_id) = Normal(phi_id, Phi_id), q(z_ni) = Bernoulli(nu_ni) and
/// q(J_n = k) = gamma_nk. Phi is stored per entry; without held-out data every
/// feature's variances are equal (the isotropic case). Rows with an
/// unrestricted f have no count variable and an all-zero gamma row; their
/// prior term is the plain Bernoulli(pi_i).
///
/// Given the weights, the prior of row n is replaced by the factorized
/// surrogate sum_k gamma_nk [log f_n(k) + sum_i log Bernoulli(z_ni; eta_{i;k})],
/// with eta clamped to [kEtaFloor, 1 - kEtaFloor]. update_gamma and update_nu
/// are its exact coordinate maximizers, so elbo() never decreases under them.
struct VariationalState {
  static constexpr double kEtaFloor = 1e-12;

  Eigen::MatrixXd X;
  std::optional<HoldoutMask> holdout;  // true = held out, excluded from every data term
  double sigma_A2 = 1.0;
  double sigma_n2 = 1.0;
  std::vector<RestrictingDistribution> f;
  TruncatedWeights weights;
  InclusionTable table;

  Eigen::MatrixXd phi;    // I x D
  Eigen::MatrixXd Phi;    // I x D variances
  Eigen::MatrixXd nu;     // N x I
  Eigen::MatrixXd gamma;  // N x (j_max + 1)
  Eigen::MatrixXd log_eta, log_one_minus_eta;  // I x (j_max + 1)
  Eigen::MatrixXd pred;   // N x D cache of nu * phi

  /// q starts at `init_z`: nu = init_z, gamma_n = f_n, phi the conjugate
  /// posterior mean given init_z and Phi_id = sigma_n2 / (sigma_n2 / sigma_A2 + m_i).
  VariationalState(Eigen::MatrixXd x, TruncatedWeights weights, std::vector<RestrictingDistribution> f,
                   double sigma_A2, double sigma_n2, const FeatureMatrix& init_z,
                   std::optional<HoldoutMask> holdout = std::nullopt);

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t truncation() const { return weights.size(); }
  int j_max() const { return static_cast<int>(gamma.cols()) - 1; }
  bool observed(std::size_t n, Eigen::Index d) const { return !holdout || !(*holdout)(n, d); }

  /// Rebuilds table and clamped log eta after the weights change.
  void set_weights(TruncatedWeights w);
  void refresh_pred();
};

/// log gamma_nk ∝ log f_n(k) + sum_i [nu_ni log eta_ik + (1 - nu_ni) log(1 - eta_ik)]
/// over the support of f_n. No-op for unrestricted rows.
void update_gamma(VariationalState& state, std::size_t n);

/// nu_ni = logistic(xi) with
///   xi = sum_k gamma_nk logit(eta_ik)
///        - (1 / 2 sigma_n2) (-2 phi_i . x_n + tr Phi_i + phi_i . phi_i + 2 phi_i . sum_{j != i} nu_nj phi_j),
/// all sums over the observed entries of row n. Unrestricted rows use logit(pi_i)
/// as the prior term.
void update_nu(VariationalState& state, std::size_t n, std::size_t i);

/// Conjugate update of q(A_i) for every feature in turn:
///   Phi_id = sigma_n2 / (sigma_n2 / sigma_A2 + sum_n nu_ni)
///   phi_id = Phi_id / sigma_n2 * sum_n nu_ni (x_nd - sum_{j != i} nu_nj phi_jd),
/// with n restricted to rows where entry d is observed.
void update_A(VariationalState& state);

struct ElboTerms {
  double log_lik = 0.0;      // E_q log p(X_obs | Z, A)
  double log_prior_z = 0.0;  // surrogate E_q log p(Z, J | pi)
  double log_prior_A = 0.0;
  double entropy_z = 0.0;    // nu and gamma
  double entropy_A = 0.0;    // -inf when some Phi_id = 0

  double total() const { return log_lik + log_prior_z + log_prior_A + entropy_z + entropy_A; }
};

ElboTerms elbo_terms(const VariationalState& state);
double elbo(const VariationalState& state);

/// update_gamma and update_nu row by row, then update_A.
void variational_sweep(VariationalState& state);

/// J_n ~ gamma_n then Z_n by draw-by-draw on weights nu_n with that count;
/// unrestricted rows are independent Bernoulli(nu_ni).
FeatureMatrix sample_variational_z(const VariationalState& state, Rng& rng);

/// Plug-in negative log-likelihood of the held-out entries (NaN without a mask).
double variational_heldout_nll(const VariationalState& state);

/// Number of features with nu_ni > 0.5 in each row.
std::vector<int> active_counts(const VariationalState& state);

struct HybridConfig {
  double alpha = 1.0;
  double c = 1.0;
  std::size_t truncation = 20;
  std::vector<RestrictingDistribution> f;  // per row
  double sigma_A2 = 1.0;
  double sigma_n2 = 1.0;
  std::size_t iterations = 300;  // cap on variational sweeps
  /// Sweeps between weight resamples; 0 keeps the weights fixed.
  std::size_t resample_every = 25;
  double tolerance = 1e-6;
  std::optional<HoldoutMask> holdout;
};

struct HybridTraceRow {
  std::size_t sweep;
  std::size_t segment;  // weights are fixed within a segment
  double elbo;
  double heldout_nll;
  bool weights_accepted;  // set on the last sweep of a segment
};

struct HybridSample {
  std::size_t sweep;
  FeatureMatrix z;  // the draw used for the weights update
  std::vector<double> weights;
};

struct HybridResult {
  VariationalState state;
  std::vector<HybridTraceRow> trace;
  std::vector<HybridSample> samples;
  double heldout_nll;
  std::size_t sweeps = 0;
};

/// Segments of coordinate ascent at fixed weights, each ended after
/// `resample_every` sweeps or once the relative ELBO change drops below the
/// tolerance. After each segment Z is sampled from q and the weights take one
/// Metropolis-Hastings step given that Z. The run stops at the sweep cap or
/// when two consecutive segments end within the tolerance of each other.
HybridResult hybrid_fit(const HybridConfig& config, const Eigen::MatrixXd& x, Rng& rng);

}  // namespace ribp
