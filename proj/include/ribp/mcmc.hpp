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

/// State of the uncollapsed sampler over (Z, pi, A).
///
/// `table` always describes `weights`; it is rebuilt whenever a weights
/// proposal is accepted. `residual` caches X - Z A and is kept in step by
/// every update. With `flat_likelihood` set, the data term is dropped and the
/// chain targets the prior.
struct GibbsState {
  FeatureMatrix z;
  TruncatedWeights weights;
  LinearGaussianModel model;
  std::vector<RestrictingDistribution> f;  // one per row
  std::optional<HoldoutMask> holdout;
  InclusionTable table;
  Eigen::MatrixXd residual;
  std::uint64_t iteration = 0;
  bool flat_likelihood = false;
  /// Slot-to-column map of each row's ones, used by location updates. Rebuilt
  /// in column order whenever it no longer matches Z.
  std::vector<std::vector<std::size_t>> locations;

  GibbsState(FeatureMatrix z, TruncatedWeights weights, LinearGaussianModel model,
             std::vector<RestrictingDistribution> f);

  void refresh_table();
  void refresh_residual();
  /// log p(x_n | residual row r), over the entries of row n that are not held out.
  double row_log_lik(std::size_t n, const Eigen::RowVectorXd& r) const;
  /// Largest count any f_n can produce (used to size the table).
  int j_max() const;
  /// Columns of the ones of row n, by slot.
  std::vector<std::size_t> row_locations(std::size_t n) const;
};

/// Resamples z_ni from its full conditional. With k the number of other ones
/// in the row,
///   P(z_ni = 1) ∝ f(k + 1) pi_i / S_{k+1}(pi) * p(x_n | z_ni = 1)
///   P(z_ni = 0) ∝ f(k) (1 - pi_i) / S_k(pi) * p(x_n | z_ni = 0).
/// Throws std::invalid_argument if f_n is a point mass.
void gibbs_entry_update(GibbsState& state, std::size_t n, std::size_t i, Rng& rng);
/// The probability P(z_ni = 1 | rest) used by gibbs_entry_update.
double gibbs_entry_probability(const GibbsState& state, std::size_t n, std::size_t i);

/// Moves the one in slot j of row n to one of the currently empty columns or
/// leaves it in place, with probability proportional to pi_i / (1 - pi_i)
/// times the likelihood. Slots keep their identity across moves.
/// Throws std::invalid_argument unless f_n is a point mass.
void gibbs_location_update(GibbsState& state, std::size_t n, std::size_t j, Rng& rng);

struct LocationChoice {
  std::size_t column;
  double probability;
};
/// Candidate columns and probabilities used by gibbs_location_update.
std::vector<LocationChoice> gibbs_location_probabilities(const GibbsState& state, std::size_t n,
                                                         std::size_t j);

/// Whole-row Metropolis-Hastings step with a prior proposal: J ~ f_n, then a
/// draw-by-draw row (a Bernoulli row when f_n is unrestricted). Accepted with
/// probability min(1, p(x_n | Z') / p(x_n | Z)). Returns true on acceptance.
bool mh_row_proposal(GibbsState& state, std::size_t n, Rng& rng);

/// sum_n log R-BeP(Z_n; table weights, f_n).
double restricted_log_likelihood(const InclusionTable& table, const FeatureMatrix& z,
                                 const std::vector<RestrictingDistribution>& f);

/// log of the weak-limit prior density prod_i Beta(pi_i; c alpha / I, c - c alpha / I).
double weak_limit_log_prior(const TruncatedWeights& weights);

/// Proposal for all weights jointly from the unrestricted posterior
///   pi'_i ~ Beta(c alpha / I + m_i, c - c alpha / I + N - m_i)
/// accepted with the Metropolis-Hastings ratio of
/// prior x restricted likelihood over the proposal density. Requires
/// weak-limit weights. Returns true on acceptance.
bool mh_weights_update(GibbsState& state, Rng& rng);

/// Log of the MH acceptance ratio for moving from the state's weights to
/// `proposal` (exposed for tests).
double mh_weights_log_ratio(const GibbsState& state, const TruncatedWeights& proposal,
                            const InclusionTable& proposal_table);

/// Fills held-out entries of X with draws from the current model, then draws
/// A from its conjugate posterior.
void resample_A(GibbsState& state, Rng& rng);

/// One sweep: entry or location updates for every row, one row MH per row,
/// one weights MH (weak-limit weights only), then A.
struct SweepStats {
  std::size_t rows_accepted = 0;
  bool weights_accepted = false;
};
SweepStats gibbs_sweep(GibbsState& state, Rng& rng);

/// log p(X_obs | Z, A) + sum_n log R-BeP(Z_n) + log p(pi) + log p(A).
double log_joint(const GibbsState& state);

/// Negative log-likelihood of the held-out entries given the current state.
double heldout_nll(const GibbsState& state);

struct ChainConfig {
  double alpha = 1.0;
  double c = 1.0;
  std::size_t truncation = 20;
  std::vector<RestrictingDistribution> f;  // per row
  double sigma_A2 = 1.0;
  double sigma_n2 = 1.0;
  std::size_t iterations = 100;
  std::size_t thin = 1;
  /// Samples before this iteration are excluded from the held-out average.
  /// Defaults to iterations / 2 when unset.
  std::optional<std::size_t> burn_in;
  std::optional<HoldoutMask> holdout;
};

struct ChainSample {
  std::size_t iteration;
  FeatureMatrix z;
  std::vector<double> weights;
  Eigen::MatrixXd A;
};

struct TraceRow {
  std::size_t iteration;
  double log_joint;
  double heldout_nll;  // NaN without a holdout mask
  std::size_t rows_accepted;
  bool weights_accepted;
};

struct ChainResult {
  std::vector<ChainSample> samples;  // iteration 0 is the initialization
  std::vector<TraceRow> trace;
  /// Mean held-out NLL over iterations after burn-in (NaN without a mask).
  double heldout_nll = 0.0;
};

/// Weak-limit prior draw of the weights, Z by inclusion sampling, A from its
/// posterior given that Z.
GibbsState initialize_chain(const ChainConfig& config, const Eigen::MatrixXd& x, Rng& rng);

ChainResult run_chain(const ChainConfig& config, const Eigen::MatrixXd& x, Rng& rng);

}  // namespace ribp
