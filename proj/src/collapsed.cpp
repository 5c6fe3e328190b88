#include "ribp/collapsed.hpp"

#include <cmath>
#include <stdexcept>

#include "ribp/errors.hpp"
#include "ribp/ibp.hpp"
#include "ribp/linear_gaussian.hpp"
#include "ribp/numeric.hpp"
#include "ribp/random.hpp"

namespace ribp {

namespace {

int row_sum(const BinaryRow& row) {
  int s = 0;
  for (auto v : row) s += v;
  return s;
}

void widen(FeatureMatrix& z, AuxState& aux, std::size_t width) {
  if (width <= z.cols()) return;
  z.add_columns(width - z.cols());
  for (auto& cn : aux.c) cn.resize(width, 0);
}

double data_term(const FeatureMatrix& z, const CollapsedModel& model) {
  if (model.flat) return 0.0;
  return log_likelihood_collapsed(z, model.X, model.sigma_A2, model.sigma_n2);
}

void drop_dead_columns(FeatureMatrix& z, AuxState& aux) {
  const auto m = aux.totals(z);
  std::vector<bool> keep(m.size());
  bool any_dead = false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    keep[i] = m[i] > 0;
    any_dead = any_dead || !keep[i];
  }
  if (!any_dead) return;
  z.keep_columns(keep);
  for (auto& cn : aux.c) {
    std::vector<int> kept;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if (keep[i]) kept.push_back(cn[i]);
    cn = std::move(kept);
  }
}

}  // namespace

std::vector<int> AuxState::totals(const FeatureMatrix& z) const {
  std::vector<int> m = z.column_counts();
  for (const auto& cn : c)
    for (std::size_t i = 0; i < cn.size(); ++i) m[i] += cn[i];
  return m;
}

int AuxState::customers(const FeatureMatrix& z) const {
  int total = static_cast<int>(z.rows());
  for (int tn : t) total += tn;
  return total;
}

void collapsed_initialize(FeatureMatrix& z, AuxState& aux, double alpha,
                          const RestrictingDistribution& f, std::size_t n, Rng& rng,
                          std::uint64_t cap) {
  IbpState state;
  std::vector<BinaryRow> rows;
  aux.t.assign(n, 0);
  aux.c.assign(n, {});
  for (std::size_t r = 0; r < n; ++r) {
    for (;;) {
      BinaryRow row = ibp_predictive_next(state, alpha, rng);
      if (random::bernoulli(rng, f.accept_probability(row_sum(row)))) {
        rows.push_back(std::move(row));
        break;
      }
      if (static_cast<std::uint64_t>(++aux.t[r]) >= cap)
        throw NumericalError("collapsed initialize: proposal cap reached");
      auto& cr = aux.c[r];
      if (cr.size() < row.size()) cr.resize(row.size(), 0);
      for (std::size_t i = 0; i < row.size(); ++i) cr[i] += row[i];
    }
  }
  const std::size_t width = state.counts.size();
  z = FeatureMatrix(0, width);
  for (auto& row : rows) {
    row.resize(width, 0);
    z.append_row(row);
  }
  for (auto& cr : aux.c) cr.resize(width, 0);
}

CollapsedSweepStats collapsed_sweep(FeatureMatrix& z, AuxState& aux, const CollapsedModel& model,
                                    double alpha, const RestrictingDistribution& f, Rng& rng,
                                    const CollapsedOptions& opts) {
  if (aux.t.size() != z.rows() || aux.c.size() != z.rows())
    throw std::invalid_argument("collapsed sweep: auxiliary state does not match Z");
  CollapsedSweepStats stats;
  const std::size_t rows = z.rows();

  for (std::size_t n = 0; n < rows; ++n) {
    // Predictive state of the sequence with block n removed.
    IbpState state;
    state.counts = aux.totals(z);
    for (std::size_t i = 0; i < z.cols(); ++i) state.counts[i] -= z(n, i) + aux.c[n][i];
    state.customers = aux.customers(z) - 1 - aux.t[n];

    int t_new = 0;
    std::vector<int> c_new(z.cols(), 0);
    BinaryRow survivor;
    std::uint64_t tries = 0;
    bool capped = false;
    for (;;) {
      if (++tries > opts.cap) {
        capped = true;
        break;
      }
      BinaryRow prop = ibp_propose(state, alpha, rng);
      if (random::bernoulli(rng, f.accept_probability(row_sum(prop)))) {
        survivor = std::move(prop);
        break;
      }
      state.absorb(prop);
      ++t_new;
      if (c_new.size() < prop.size()) c_new.resize(prop.size(), 0);
      for (std::size_t i = 0; i < prop.size(); ++i) c_new[i] += prop[i];
    }
    if (capped) {
      ++stats.cap_hits;
      continue;
    }

    const std::size_t width = std::max({z.cols(), c_new.size(), survivor.size()});
    widen(z, aux, width);
    c_new.resize(width, 0);
    survivor.resize(width, 0);

    bool accept = true;
    if (!model.flat) {
      FeatureMatrix proposal = z;
      proposal.set_row(n, survivor);
      const double log_ratio = data_term(proposal, model) - data_term(z, model);
      accept = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
    }
    if (accept) {
      z.set_row(n, survivor);
      aux.t[n] = t_new;
      aux.c[n] = std::move(c_new);
      ++stats.rows_accepted;
    }

    if (!opts.single_flips) continue;
    const double customers = aux.customers(z);
    for (std::size_t i = 0; i < z.cols(); ++i) {
      const auto m = aux.totals(z);
      const bool cur = z(n, i);
      const int others = m[i] - cur;
      if (others == 0) continue;
      const double p = others / customers;
      const int k = z.row_count(n) - cur;
      auto log_prior = [&](bool v) {
        const double fv = f.accept_probability(k + v);
        if (fv == 0.0) return kNegInf;
        const double pv = v ? p : 1.0 - p;
        return pv > 0.0 ? std::log(pv) + std::log(fv) : kNegInf;
      };
      const double prior_new = log_prior(!cur);
      if (prior_new == kNegInf) continue;
      double log_r = prior_new - log_prior(cur);
      if (!model.flat) {
        FeatureMatrix flipped = z;
        flipped.set(n, i, !cur);
        log_r += data_term(flipped, model) - data_term(z, model);
      }
      if (log_r >= 0.0 || std::log(rng.uniform()) < log_r) {
        z.set(n, i, !cur);
        ++stats.flips_accepted;
      }
    }
  }
  drop_dead_columns(z, aux);
  return stats;
}

}  // namespace ribp
