#include "ribp/variational.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ribp/mcmc.hpp"
#include "ribp/measure.hpp"
#include "ribp/numeric.hpp"
#include "ribp/random.hpp"
#include "ribp/samplers.hpp"

namespace ribp {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

int restricted_j_max(const std::vector<RestrictingDistribution>& f, std::size_t truncation) {
  int j = 0;
  for (const auto& fn : f) {
    fn.require_fits(truncation);
    if (!fn.is_unrestricted()) j = std::max(j, fn.support_max());
  }
  return j;
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double bernoulli_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

}  // namespace

VariationalState::VariationalState(Eigen::MatrixXd x, TruncatedWeights w,
                                   std::vector<RestrictingDistribution> f_, double sa2, double sn2,
                                   const FeatureMatrix& init_z, std::optional<HoldoutMask> mask)
    : X(std::move(x)),
      holdout(std::move(mask)),
      sigma_A2(sa2),
      sigma_n2(sn2),
      f(std::move(f_)),
      weights(w),
      table(w, restricted_j_max(f, w.size())) {
  const std::size_t n = rows(), width = truncation();
  if (f.size() != n) throw std::invalid_argument("variational state: need one f per row");
  if (!(sa2 > 0.0) || !(sn2 > 0.0)) throw std::invalid_argument("variational state: variances must be positive");
  if (init_z.rows() != n || init_z.cols() != width)
    throw std::invalid_argument("variational state: initial Z has the wrong shape");
  if (holdout && (holdout->rows() != X.rows() || holdout->cols() != X.cols()))
    throw std::invalid_argument("variational state: holdout mask has the wrong shape");

  const int jm = table.j_max();
  gamma = Eigen::MatrixXd::Zero(n, jm + 1);
  nu.resize(n, width);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < width; ++i) nu(r, i) = init_z(r, i) ? 1.0 : 0.0;
    if (f[r].is_unrestricted()) continue;
    for (int k = 0; k <= jm; ++k) gamma(r, k) = f[r].pmf(k);
  }

  Eigen::MatrixXd filled = X;
  if (holdout) {
    for (Eigen::Index d = 0; d < X.cols(); ++d) {
      double sum = 0.0;
      int count = 0;
      for (Eigen::Index r = 0; r < X.rows(); ++r)
        if (!(*holdout)(r, d)) {
          sum += X(r, d);
          ++count;
        }
      for (Eigen::Index r = 0; r < X.rows(); ++r)
        if ((*holdout)(r, d)) filled(r, d) = count ? sum / count : 0.0;
    }
  }
  phi = posterior_A(init_z, filled, sigma_A2, sigma_n2).mean;
  // mean-field variances given nu = init_z, per observed entry
  Phi.resize(width, X.cols());
  for (std::size_t i = 0; i < width; ++i)
    for (Eigen::Index d = 0; d < X.cols(); ++d) {
      double m = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        if (observed(r, d)) m += nu(r, i);
      Phi(i, d) = sigma_n2 / (sigma_n2 / sigma_A2 + m);
    }
  set_weights(weights);
  refresh_pred();
}

void VariationalState::set_weights(TruncatedWeights w) {
  weights = std::move(w);
  table = InclusionTable(weights, j_max());
  const std::size_t width = truncation();
  log_eta.resize(width, j_max() + 1);
  log_one_minus_eta.resize(width, j_max() + 1);
  for (std::size_t i = 0; i < width; ++i)
    for (int k = 0; k <= j_max(); ++k) {
      const double e = std::clamp(table.eta(i, k), kEtaFloor, 1.0 - kEtaFloor);
      log_eta(i, k) = std::log(e);
      log_one_minus_eta(i, k) = std::log1p(-e);
    }
}

void VariationalState::refresh_pred() { pred = nu * phi; }

void update_gamma(VariationalState& state, std::size_t n) {
  const auto& f = state.f[n];
  if (f.is_unrestricted()) return;
  const int lo = f.support_min(), hi = f.support_max();
  std::vector<double> lg(hi - lo + 1, kNegInf);
  for (int k = lo; k <= hi; ++k) {
    const double lf = f.log_pmf(k);
    if (lf == kNegInf) continue;
    double s = lf;
    for (std::size_t i = 0; i < state.truncation(); ++i) {
      const double v = state.nu(n, i);
      s += v * state.log_eta(i, k) + (1.0 - v) * state.log_one_minus_eta(i, k);
    }
    lg[k - lo] = s;
  }
  const double norm = log_sum_exp(lg);
  state.gamma.row(n).setZero();
  for (int k = lo; k <= hi; ++k) state.gamma(n, k) = std::exp(lg[k - lo] - norm);
}

void update_nu(VariationalState& state, std::size_t n, std::size_t i) {
  double xi = 0.0;
  if (state.f[n].is_unrestricted()) {
    xi = state.table.log_weight(i) - state.table.log_one_minus_weight(i);
  } else {
    for (Eigen::Index k = 0; k < state.gamma.cols(); ++k) {
      const double g = state.gamma(n, k);
      if (g > 0.0) xi += g * (state.log_eta(i, k) - state.log_one_minus_eta(i, k));
    }
  }
  const double old = state.nu(n, i);
  double data = 0.0;
  for (Eigen::Index d = 0; d < state.X.cols(); ++d) {
    if (!state.observed(n, d)) continue;
    const double p = state.phi(i, d);
    const double others = state.pred(n, d) - old * p;
    data += -2.0 * p * state.X(n, d) + state.Phi(i, d) + p * p + 2.0 * p * others;
  }
  xi -= data / (2.0 * state.sigma_n2);
  const double next = logistic(xi);
  state.nu(n, i) = next;
  state.pred.row(n) += (next - old) * state.phi.row(i);
}

void update_A(VariationalState& state) {
  const double sn2 = state.sigma_n2, sa2 = state.sigma_A2;
  for (std::size_t i = 0; i < state.truncation(); ++i) {
    for (Eigen::Index d = 0; d < state.X.cols(); ++d) {
      const double old = state.phi(i, d);
      double mass = 0.0, lin = 0.0;
      for (std::size_t n = 0; n < state.rows(); ++n) {
        if (!state.observed(n, d)) continue;
        const double v = state.nu(n, i);
        mass += v;
        lin += v * (state.X(n, d) - (state.pred(n, d) - v * old));
      }
      const double var = sn2 / (sn2 / sa2 + mass);
      const double mean = var / sn2 * lin;
      state.Phi(i, d) = var;
      state.phi(i, d) = mean;
      if (mean != old) state.pred.col(d) += state.nu.col(i) * (mean - old);
    }
  }
}

ElboTerms elbo_terms(const VariationalState& state) {
  ElboTerms t;
  const std::size_t n_rows = state.rows(), width = state.truncation();
  const double sn2 = state.sigma_n2, sa2 = state.sigma_A2;
  for (std::size_t n = 0; n < n_rows; ++n)
    for (Eigen::Index d = 0; d < state.X.cols(); ++d) {
      if (!state.observed(n, d)) continue;
      const double r = state.X(n, d) - state.pred(n, d);
      double var = 0.0;
      for (std::size_t i = 0; i < width; ++i) {
        const double v = state.nu(n, i), p = state.phi(i, d);
        var += v * (p * p + state.Phi(i, d)) - v * v * p * p;
      }
      t.log_lik += -0.5 * (kLog2Pi + std::log(sn2)) - 0.5 * (r * r + var) / sn2;
    }

  for (std::size_t n = 0; n < n_rows; ++n) {
    for (std::size_t i = 0; i < width; ++i) t.entropy_z += bernoulli_entropy(state.nu(n, i));
    if (state.f[n].is_unrestricted()) {
      for (std::size_t i = 0; i < width; ++i) {
        const double v = state.nu(n, i);
        t.log_prior_z += v * state.table.log_weight(i) + (1.0 - v) * state.table.log_one_minus_weight(i);
      }
      continue;
    }
    for (Eigen::Index k = 0; k < state.gamma.cols(); ++k) {
      const double g = state.gamma(n, k);
      if (g <= 0.0) continue;
      double s = state.f[n].log_pmf(static_cast<int>(k));
      for (std::size_t i = 0; i < width; ++i) {
        const double v = state.nu(n, i);
        s += v * state.log_eta(i, k) + (1.0 - v) * state.log_one_minus_eta(i, k);
      }
      t.log_prior_z += g * s;
      t.entropy_z -= xlogx(g);
    }
  }

  for (std::size_t i = 0; i < width; ++i)
    for (Eigen::Index d = 0; d < state.X.cols(); ++d) {
      const double p = state.phi(i, d), v = state.Phi(i, d);
      t.log_prior_A += -0.5 * (kLog2Pi + std::log(sa2)) - 0.5 * (p * p + v) / sa2;
      t.entropy_A += v > 0.0 ? 0.5 * (kLog2Pi + 1.0 + std::log(v)) : kNegInf;
    }
  return t;
}

double elbo(const VariationalState& state) { return elbo_terms(state).total(); }

void variational_sweep(VariationalState& state) {
  for (std::size_t n = 0; n < state.rows(); ++n) {
    update_gamma(state, n);
    for (std::size_t i = 0; i < state.truncation(); ++i) update_nu(state, n, i);
  }
  update_A(state);
}

FeatureMatrix sample_variational_z(const VariationalState& state, Rng& rng) {
  const std::size_t width = state.truncation();
  FeatureMatrix z(state.rows(), width);
  for (std::size_t n = 0; n < state.rows(); ++n) {
    std::vector<double> p(width);
    for (std::size_t i = 0; i < width; ++i) p[i] = state.nu(n, i);
    if (state.f[n].is_unrestricted()) {
      for (std::size_t i = 0; i < width; ++i) z.set(n, i, random::bernoulli(rng, p[i]));
      continue;
    }
    std::vector<double> g(state.gamma.cols());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = state.gamma(n, k);
    const int j = static_cast<int>(random::categorical(rng, g));
    const TruncatedWeights w(std::move(p), state.weights.alpha(), state.weights.c(), WeightsKind::WeakLimit);
    z.set_row(n, draw_by_draw_sample(InclusionTable(w, j), j, rng));
  }
  return z;
}

double variational_heldout_nll(const VariationalState& state) {
  if (!state.holdout) return std::numeric_limits<double>::quiet_NaN();
  double nll = 0.0;
  for (std::size_t n = 0; n < state.rows(); ++n)
    for (Eigen::Index d = 0; d < state.X.cols(); ++d)
      if (!state.observed(n, d)) {
        const double r = state.X(n, d) - state.pred(n, d);
        nll += 0.5 * (kLog2Pi + std::log(state.sigma_n2)) + 0.5 * r * r / state.sigma_n2;
      }
  return nll;
}

std::vector<int> active_counts(const VariationalState& state) {
  std::vector<int> out(state.rows(), 0);
  for (std::size_t n = 0; n < state.rows(); ++n)
    for (std::size_t i = 0; i < state.truncation(); ++i) out[n] += state.nu(n, i) > 0.5;
  return out;
}

namespace {

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

HybridResult hybrid_fit(const HybridConfig& config, const Eigen::MatrixXd& x, Rng& rng) {
  if (config.f.size() != static_cast<std::size_t>(x.rows()))
    throw std::invalid_argument("hybrid config: need one restricting distribution per row");
  if (!(config.tolerance >= 0.0)) throw std::invalid_argument("hybrid config: tolerance must be >= 0");
  Rng init = rng.split(0);
  Rng run = rng.split(1);
  auto weights = weak_limit_weights(config.alpha, config.c, config.truncation, init);
  const auto z0 = sample_inclusion(weights, config.f, init).z;
  VariationalState state(x, weights, config.f, config.sigma_A2, config.sigma_n2, z0, config.holdout);

  std::vector<HybridTraceRow> trace;
  std::vector<HybridSample> samples;
  trace.push_back({0, 0, elbo(state), variational_heldout_nll(state), false});
  std::size_t sweep = 0, segment = 0;
  double prev_end = std::numeric_limits<double>::quiet_NaN();
  while (sweep < config.iterations) {
    double last = trace.back().elbo;
    bool settled = false;
    for (std::size_t in_segment = 0; sweep < config.iterations;) {
      variational_sweep(state);
      ++sweep;
      ++in_segment;
      const double e = elbo(state);
      trace.push_back({sweep, segment, e, variational_heldout_nll(state), false});
      settled = within(e, last, config.tolerance);
      last = e;
      if (settled || (config.resample_every && in_segment >= config.resample_every)) break;
    }
    if (config.resample_every == 0) {
      if (settled) break;
      continue;
    }
    const FeatureMatrix z = sample_variational_z(state, run);
    LinearGaussianModel model;
    model.sigma_A2 = config.sigma_A2;
    model.sigma_n2 = config.sigma_n2;
    model.A = state.phi;
    model.X = x;
    GibbsState gibbs(z, state.weights, std::move(model), config.f);
    gibbs.flat_likelihood = true;
    const bool accepted = mh_weights_update(gibbs, run);
    trace.back().weights_accepted = accepted;
    if (accepted) state.set_weights(gibbs.weights);
    samples.push_back({sweep, z,
                       std::vector<double>(state.weights.values().begin(), state.weights.values().end())});
    if (std::isfinite(prev_end) && within(last, prev_end, config.tolerance)) break;
    prev_end = last;
    ++segment;
  }
  const double nll = variational_heldout_nll(state);
  return {std::move(state), std::move(trace), std::move(samples), nll, sweep};
}

}  // namespace ribp
