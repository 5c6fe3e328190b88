#include "ribp/mcmc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ribp/numeric.hpp"
#include "ribp/random.hpp"
#include "ribp/samplers.hpp"

namespace ribp {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

int max_count(const std::vector<RestrictingDistribution>& f, std::size_t truncation) {
  int j = 0;
  for (const auto& fn : f) {
    fn.require_fits(truncation);
    j = std::max(j, fn.support_max());
  }
  return j;
}

double log_beta_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - std::lgamma(a) - std::lgamma(b) +
         std::lgamma(a + b);
}

Eigen::RowVectorXd row_times_a(std::span<const std::uint8_t> z, const Eigen::MatrixXd& a) {
  Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(a.cols());
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i]) m += a.row(i);
  return m;
}

}  // namespace

GibbsState::GibbsState(FeatureMatrix z_, TruncatedWeights weights_, LinearGaussianModel model_,
                       std::vector<RestrictingDistribution> f_)
    : z(std::move(z_)),
      weights(std::move(weights_)),
      model(std::move(model_)),
      f(std::move(f_)),
      table(weights, max_count(f, weights.size())) {
  if (f.size() != z.rows()) throw std::invalid_argument("gibbs state: need one f per row");
  if (z.cols() != weights.size())
    throw std::invalid_argument("gibbs state: Z width differs from the truncation level");
  if (static_cast<std::size_t>(model.X.rows()) != z.rows())
    throw std::invalid_argument("gibbs state: X and Z disagree on N");
  model.validate(weights.size());
  refresh_residual();
}

int GibbsState::j_max() const { return max_count(f, weights.size()); }

std::vector<std::size_t> GibbsState::row_locations(std::size_t n) const {
  const int ones = z.row_count(n);
  if (n < locations.size() && static_cast<int>(locations[n].size()) == ones) {
    bool ok = true;
    for (auto i : locations[n]) ok = ok && i < z.cols() && z(n, i);
    if (ok) return locations[n];
  }
  std::vector<std::size_t> loc;
  for (std::size_t i = 0; i < z.cols(); ++i)
    if (z(n, i)) loc.push_back(i);
  return loc;
}

void GibbsState::refresh_table() { table = InclusionTable(weights, j_max()); }

void GibbsState::refresh_residual() { residual = model.X - z.to_eigen() * model.A; }

double GibbsState::row_log_lik(std::size_t n, const Eigen::RowVectorXd& r) const {
  if (flat_likelihood) return 0.0;
  double ss = 0.0;
  int count = 0;
  for (Eigen::Index d = 0; d < r.size(); ++d) {
    if (holdout && (*holdout)(n, d)) continue;
    ss += r(d) * r(d);
    ++count;
  }
  return -0.5 * count * (kLog2Pi + std::log(model.sigma_n2)) - 0.5 * ss / model.sigma_n2;
}

namespace {

struct EntryTerms {
  Eigen::RowVectorXd r0, r1;  // residual rows with z_ni = 0 and z_ni = 1
  double log_off, log_on;
};

EntryTerms entry_terms(const GibbsState& state, std::size_t n, std::size_t i) {
  const auto& f = state.f[n];
  if (f.is_point_mass())
    throw std::invalid_argument("entry update needs a non-degenerate f; use location updates");
  const bool current = state.z(n, i);
  const int k = state.z.row_count(n) - current;
  EntryTerms t;
  t.r0 = state.residual.row(n);
  if (current) t.r0 += state.model.A.row(i);
  t.r1 = t.r0 - state.model.A.row(i);
  t.log_on = state.table.log_weight(i) + state.row_log_lik(n, t.r1);
  t.log_off = state.table.log_one_minus_weight(i) + state.row_log_lik(n, t.r0);
  if (!f.is_unrestricted()) {
    const double f1 = f.log_pmf(k + 1);
    const double f0 = f.log_pmf(k);
    t.log_on = f1 == kNegInf ? kNegInf : t.log_on + f1 - state.table.log_s(k + 1);
    t.log_off = f0 == kNegInf ? kNegInf : t.log_off + f0 - state.table.log_s(k);
  }
  return t;
}

struct LocationTerms {
  std::size_t own;
  Eigen::RowVectorXd base;  // residual row without the moving one
  std::vector<std::size_t> candidates;
  std::vector<double> log_weights;
};

LocationTerms location_terms(const GibbsState& state, std::size_t n, std::size_t j) {
  if (!state.f[n].is_point_mass())
    throw std::invalid_argument("location update needs a point-mass f");
  const std::size_t width = state.z.cols();
  const auto loc = state.row_locations(n);
  if (j >= loc.size()) throw std::invalid_argument("location update: row has fewer ones");
  LocationTerms t;
  t.own = loc[j];
  t.base = state.residual.row(n) + state.model.A.row(t.own);
  for (std::size_t i = 0; i < width; ++i) {
    if (state.z(n, i) && i != t.own) continue;
    t.candidates.push_back(i);
    const double odds = state.table.log_weight(i) - state.table.log_one_minus_weight(i);
    t.log_weights.push_back(odds + state.row_log_lik(n, t.base - state.model.A.row(i)));
  }
  return t;
}

}  // namespace

double gibbs_entry_probability(const GibbsState& state, std::size_t n, std::size_t i) {
  const auto t = entry_terms(state, n, i);
  if (t.log_on == kNegInf) return 0.0;
  return logistic(t.log_on - t.log_off);
}

void gibbs_entry_update(GibbsState& state, std::size_t n, std::size_t i, Rng& rng) {
  auto t = entry_terms(state, n, i);
  const double lw[2] = {t.log_off, t.log_on};
  const bool next = random::categorical_from_log(rng, lw) == 1;
  state.z.set(n, i, next);
  state.residual.row(n) = next ? t.r1 : t.r0;
}

std::vector<LocationChoice> gibbs_location_probabilities(const GibbsState& state, std::size_t n,
                                                         std::size_t j) {
  const auto t = location_terms(state, n, j);
  const double norm = log_sum_exp(t.log_weights);
  std::vector<LocationChoice> out;
  for (std::size_t c = 0; c < t.candidates.size(); ++c)
    out.push_back({t.candidates[c], std::exp(t.log_weights[c] - norm)});
  return out;
}

void gibbs_location_update(GibbsState& state, std::size_t n, std::size_t j, Rng& rng) {
  const auto t = location_terms(state, n, j);
  const std::size_t pick = t.candidates[random::categorical_from_log(rng, t.log_weights)];
  auto loc = state.row_locations(n);
  loc[j] = pick;
  if (state.locations.size() < state.z.rows()) state.locations.resize(state.z.rows());
  state.locations[n] = std::move(loc);
  if (pick == t.own) return;
  state.z.set(n, t.own, false);
  state.z.set(n, pick, true);
  state.residual.row(n) = t.base - state.model.A.row(pick);
}

bool mh_row_proposal(GibbsState& state, std::size_t n, Rng& rng) {
  const auto& f = state.f[n];
  BinaryRow proposal;
  if (f.is_unrestricted()) {
    proposal.resize(state.z.cols());
    for (std::size_t i = 0; i < proposal.size(); ++i)
      proposal[i] = random::bernoulli(rng, state.weights[i]);
  } else {
    proposal = draw_by_draw_sample(state.table, f.sample(rng), rng);
  }
  const Eigen::RowVectorXd r_new = state.model.X.row(n) - row_times_a(proposal, state.model.A);
  const double log_ratio =
      state.row_log_lik(n, r_new) - state.row_log_lik(n, state.residual.row(n));
  if (log_ratio < 0.0 && !(std::log(rng.uniform()) < log_ratio)) return false;
  state.z.set_row(n, proposal);
  state.residual.row(n) = r_new;
  return true;
}

double restricted_log_likelihood(const InclusionTable& table, const FeatureMatrix& z,
                                 const std::vector<RestrictingDistribution>& f) {
  double total = 0.0;
  for (std::size_t n = 0; n < z.rows(); ++n) total += table.row_log_pmf(z.row(n), f[n]);
  return total;
}

double weak_limit_log_prior(const TruncatedWeights& weights) {
  const double a = weights.c() * weights.alpha() / static_cast<double>(weights.size());
  const double b = weights.c() - a;
  double lp = 0.0;
  for (double p : weights.values()) lp += log_beta_pdf(p, a, b);
  return lp;
}

namespace {

double proposal_log_density(const TruncatedWeights& weights, const std::vector<int>& m,
                            std::size_t rows) {
  const double a = weights.c() * weights.alpha() / static_cast<double>(weights.size());
  const double b = weights.c() - a;
  double lq = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    lq += log_beta_pdf(weights[i], a + m[i], b + static_cast<double>(rows) - m[i]);
  return lq;
}

}  // namespace

double mh_weights_log_ratio(const GibbsState& state, const TruncatedWeights& proposal,
                            const InclusionTable& proposal_table) {
  const auto m = state.z.column_counts();
  const std::size_t rows = state.z.rows();
  const double target_new =
      weak_limit_log_prior(proposal) + restricted_log_likelihood(proposal_table, state.z, state.f);
  const double target_old =
      weak_limit_log_prior(state.weights) + restricted_log_likelihood(state.table, state.z, state.f);
  return target_new - target_old + proposal_log_density(state.weights, m, rows) -
         proposal_log_density(proposal, m, rows);
}

bool mh_weights_update(GibbsState& state, Rng& rng) {
  if (state.weights.kind() != WeightsKind::WeakLimit)
    throw std::invalid_argument("weights update needs weak-limit weights");
  const auto m = state.z.column_counts();
  const double a = state.weights.c() * state.weights.alpha() / state.weights.size();
  const double b = state.weights.c() - a;
  const double rows = static_cast<double>(state.z.rows());
  std::vector<double> pi(state.weights.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = random::beta(rng, a + m[i], b + rows - m[i]);
  TruncatedWeights proposal = state.weights.with_values(std::move(pi));
  InclusionTable table(proposal, state.j_max());
  const double log_ratio = mh_weights_log_ratio(state, proposal, table);
  if (log_ratio < 0.0 && !(std::log(rng.uniform()) < log_ratio)) return false;
  state.weights = std::move(proposal);
  state.table = std::move(table);
  return true;
}

void resample_A(GibbsState& state, Rng& rng) {
  auto& model = state.model;
  if (state.flat_likelihood) {
    model.A = gaussian_matrix(model.A.rows(), model.A.cols(), std::sqrt(model.sigma_A2), rng);
    state.refresh_residual();
    return;
  }
  Eigen::MatrixXd x = model.X;
  if (state.holdout) {
    const double sd = std::sqrt(model.sigma_n2);
    for (Eigen::Index n = 0; n < x.rows(); ++n)
      for (Eigen::Index d = 0; d < x.cols(); ++d)
        if ((*state.holdout)(n, d)) x(n, d) = x(n, d) - state.residual(n, d) + random::normal(rng, 0.0, sd);
  }
  model.A = sample_A(posterior_A(state.z, x, model.sigma_A2, model.sigma_n2), rng);
  state.refresh_residual();
}

SweepStats gibbs_sweep(GibbsState& state, Rng& rng) {
  SweepStats stats;
  for (std::size_t n = 0; n < state.z.rows(); ++n) {
    if (state.f[n].is_point_mass()) {
      const int ones = state.z.row_count(n);
      for (int j = 0; j < ones; ++j) gibbs_location_update(state, n, j, rng);
    } else {
      for (std::size_t i = 0; i < state.z.cols(); ++i) gibbs_entry_update(state, n, i, rng);
    }
  }
  for (std::size_t n = 0; n < state.z.rows(); ++n) stats.rows_accepted += mh_row_proposal(state, n, rng);
  if (state.weights.kind() == WeightsKind::WeakLimit) stats.weights_accepted = mh_weights_update(state, rng);
  resample_A(state, rng);
  ++state.iteration;
  return stats;
}

double log_joint(const GibbsState& state) {
  double lj = 0.0;
  for (std::size_t n = 0; n < state.z.rows(); ++n) lj += state.row_log_lik(n, state.residual.row(n));
  lj += restricted_log_likelihood(state.table, state.z, state.f);
  if (state.weights.kind() == WeightsKind::WeakLimit) lj += weak_limit_log_prior(state.weights);
  const double s2 = state.model.sigma_A2;
  lj += -0.5 * state.model.A.size() * (kLog2Pi + std::log(s2)) - 0.5 * state.model.A.squaredNorm() / s2;
  return lj;
}

double heldout_nll(const GibbsState& state) {
  if (!state.holdout) return std::numeric_limits<double>::quiet_NaN();
  const double log_norm = kLog2Pi + std::log(state.model.sigma_n2);
  double nll = 0.0;
  for (Eigen::Index n = 0; n < state.residual.rows(); ++n)
    for (Eigen::Index d = 0; d < state.residual.cols(); ++d)
      if ((*state.holdout)(n, d)) {
        const double r = state.residual(n, d);
        nll += 0.5 * log_norm + 0.5 * r * r / state.model.sigma_n2;
      }
  return nll;
}

GibbsState initialize_chain(const ChainConfig& config, const Eigen::MatrixXd& x, Rng& rng) {
  if (config.f.size() != static_cast<std::size_t>(x.rows()))
    throw std::invalid_argument("chain config: need one restricting distribution per row");
  if (config.thin == 0) throw std::invalid_argument("chain config: thin must be >= 1");
  if (config.holdout &&
      (config.holdout->rows() != x.rows() || config.holdout->cols() != x.cols()))
    throw std::invalid_argument("chain config: holdout mask has the wrong shape");
  Rng init = rng.split(0);
  auto weights = weak_limit_weights(config.alpha, config.c, config.truncation, init);
  auto z = sample_inclusion(weights, config.f, init).z;

  // Held-out entries start at their observed column means.
  Eigen::MatrixXd filled = x;
  if (config.holdout) {
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
      double sum = 0.0;
      int count = 0;
      for (Eigen::Index n = 0; n < x.rows(); ++n)
        if (!(*config.holdout)(n, d)) {
          sum += x(n, d);
          ++count;
        }
      const double mean = count ? sum / count : 0.0;
      for (Eigen::Index n = 0; n < x.rows(); ++n)
        if ((*config.holdout)(n, d)) filled(n, d) = mean;
    }
  }
  LinearGaussianModel model;
  model.sigma_A2 = config.sigma_A2;
  model.sigma_n2 = config.sigma_n2;
  model.X = x;
  model.A = sample_A(posterior_A(z, filled, config.sigma_A2, config.sigma_n2), init);
  GibbsState state(std::move(z), std::move(weights), std::move(model), config.f);
  state.holdout = config.holdout;
  return state;
}

ChainResult run_chain(const ChainConfig& config, const Eigen::MatrixXd& x, Rng& rng) {
  GibbsState state = initialize_chain(config, x, rng);
  Rng chain = rng.split(1);
  ChainResult result;
  auto snapshot = [&](std::size_t it) {
    result.samples.push_back({it, state.z,
                              std::vector<double>(state.weights.values().begin(),
                                                  state.weights.values().end()),
                              state.model.A});
  };
  snapshot(0);
  result.trace.push_back({0, log_joint(state), heldout_nll(state), 0, false});

  const std::size_t burn = config.burn_in.value_or(config.iterations / 2);
  double nll_sum = 0.0;
  std::size_t nll_count = 0;
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    const auto s = gibbs_sweep(state, chain);
    const double nll = heldout_nll(state);
    result.trace.push_back({it, log_joint(state), nll, s.rows_accepted, s.weights_accepted});
    if (it % config.thin == 0) snapshot(it);
    if (it > burn) {
      nll_sum += nll;
      ++nll_count;
    }
  }
  result.heldout_nll = nll_count ? nll_sum / nll_count : result.trace.back().heldout_nll;
  return result;
}

}  // namespace ribp
