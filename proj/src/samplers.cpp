#include "ribp/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ribp/errors.hpp"
#include "ribp/ibp.hpp"
#include "ribp/inclusion.hpp"
#include "ribp/measure.hpp"
#include "ribp/random.hpp"
#include "ribp/timer.hpp"

namespace ribp {

namespace {

int row_sum(const BinaryRow& row) {
  int s = 0;
  for (auto v : row) s += v;
  return s;
}

void stamp(SimReport& report, const Timer& timer) {
  report.seconds = timer.seconds();
  report.cpu_seconds = timer.cpu_seconds();
}

void check_cap(std::uint64_t tries, const SamplerOptions& opts, std::string_view method) {
  if (tries > opts.max_proposals_per_row)
    throw NumericalError(std::string(method) + ": proposal cap reached for a single row");
}

BinaryRow bernoulli_row(std::span<const double> pi, Rng& rng) {
  BinaryRow row(pi.size(), 0);
  for (std::size_t i = 0; i < pi.size(); ++i) row[i] = random::bernoulli(rng, pi[i]);
  return row;
}

}  // namespace

std::string_view to_string(SimMethod method) {
  switch (method) {
    case SimMethod::CollapsedRejection: return "collapsed-rejection";
    case SimMethod::UncollapsedRejection: return "uncollapsed-rejection";
    case SimMethod::TiltedRejection: return "tilted-rejection";
    case SimMethod::Inclusion: return "inclusion";
    case SimMethod::ExactRetrospective: return "exact-retrospective";
  }
  return "?";
}

SimMethod parse_sim_method(std::string_view name) {
  for (auto m : {SimMethod::CollapsedRejection, SimMethod::UncollapsedRejection,
                 SimMethod::TiltedRejection, SimMethod::Inclusion, SimMethod::ExactRetrospective})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown simulation method '" + std::string(name) + "'");
}

bool conditions_on_weights(SimMethod method) {
  return method == SimMethod::UncollapsedRejection || method == SimMethod::TiltedRejection ||
         method == SimMethod::Inclusion;
}

SimResult sample_collapsed_rejection(double alpha, const RestrictingDistribution& f,
                                     std::size_t n, Rng& rng, const SamplerOptions& opts) {
  if (!(alpha > 0.0)) throw std::invalid_argument("collapsed rejection: alpha must be positive");
  Timer timer;
  SimReport report;
  report.method = std::string(to_string(SimMethod::CollapsedRejection));
  IbpState state;
  std::vector<BinaryRow> accepted;
  accepted.reserve(n);
  while (accepted.size() < n) {
    std::uint64_t tries = 0;
    for (;;) {
      check_cap(++tries, opts, report.method);
      BinaryRow row = ibp_predictive_next(state, alpha, rng);
      ++report.proposals;
      if (random::bernoulli(rng, f.accept_probability(row_sum(row)))) {
        accepted.push_back(std::move(row));
        ++report.accepted;
        break;
      }
      ++report.rejections;
    }
  }
  FeatureMatrix z(0, state.counts.size());
  for (auto& row : accepted) {
    row.resize(state.counts.size(), 0);
    z.append_row(row);
  }
  const auto m = z.column_counts();
  std::vector<bool> keep(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) keep[i] = m[i] > 0;
  z.keep_columns(keep);
  report.truncation = z.cols();
  stamp(report, timer);
  return {std::move(z), report, std::nullopt};
}

FeatureMatrix sample_naive_nonexchangeable(double alpha, std::size_t n, Rng& rng) {
  IbpState state;
  std::vector<BinaryRow> accepted;
  while (accepted.size() < n) {
    BinaryRow row = ibp_propose(state, alpha, rng);
    if (row_sum(row) != 1) continue;
    state.absorb(row);
    accepted.push_back(std::move(row));
  }
  FeatureMatrix z(0, state.counts.size());
  for (auto& row : accepted) {
    row.resize(state.counts.size(), 0);
    z.append_row(row);
  }
  return z;
}

SimResult sample_uncollapsed_rejection(const TruncatedWeights& weights,
                                       const RestrictingDistribution& f, std::size_t n,
                                       Rng& rng, bool tilted, const SamplerOptions& opts) {
  f.require_fits(weights.size());
  if (tilted && f.is_unrestricted())
    throw std::invalid_argument("tilted rejection needs a restricting distribution");
  Timer timer;
  SimReport report;
  report.method = std::string(
      to_string(tilted ? SimMethod::TiltedRejection : SimMethod::UncollapsedRejection));
  report.truncation = weights.size();
  const int width = static_cast<int>(weights.size());
  FeatureMatrix z(n, weights.size());
  std::map<int, TruncatedWeights> tilt_cache;

  const Rng base = rng.split(rng());
  for (std::size_t r = 0; r < n; ++r) {
    Rng row_rng = base.split(r);
    std::uint64_t tries = 0;
    if (!tilted) {
      for (;;) {
        check_cap(++tries, opts, report.method);
        BinaryRow row = bernoulli_row(weights.values(), row_rng);
        ++report.proposals;
        if (random::bernoulli(row_rng, f.accept_probability(row_sum(row)))) {
          z.set_row(r, row);
          ++report.accepted;
          break;
        }
        ++report.rejections;
      }
      continue;
    }
    const int j = f.sample(row_rng);
    if (j == 0 || j == width) {
      z.set_row(r, BinaryRow(weights.size(), j == 0 ? 0 : 1));
      ++report.proposals;
      ++report.accepted;
      continue;
    }
    auto it = tilt_cache.find(j);
    if (it == tilt_cache.end())
      it = tilt_cache.emplace(j, esscher_transform(weights, solve_tilt(weights, j))).first;
    for (;;) {
      check_cap(++tries, opts, report.method);
      BinaryRow row = bernoulli_row(it->second.values(), row_rng);
      ++report.proposals;
      if (row_sum(row) == j) {
        z.set_row(r, row);
        ++report.accepted;
        break;
      }
      ++report.rejections;
    }
  }
  stamp(report, timer);
  return {std::move(z), report, weights};
}

SimResult sample_inclusion(const TruncatedWeights& weights,
                           std::span<const RestrictingDistribution> per_row, Rng& rng) {
  Timer timer;
  SimReport report;
  report.method = std::string(to_string(SimMethod::Inclusion));
  report.truncation = weights.size();
  int j_max = 0;
  for (const auto& f : per_row) {
    f.require_fits(weights.size());
    j_max = std::max(j_max, f.support_max());
  }
  const InclusionTable table(weights, j_max);
  FeatureMatrix z(per_row.size(), weights.size());
  const Rng base = rng.split(rng());
  for (std::size_t r = 0; r < per_row.size(); ++r) {
    Rng row_rng = base.split(r);
    const auto& f = per_row[r];
    if (f.is_unrestricted())
      z.set_row(r, bernoulli_row(weights.values(), row_rng));
    else
      z.set_row(r, draw_by_draw_sample(table, f.sample(row_rng), row_rng));
    ++report.proposals;
    ++report.accepted;
  }
  stamp(report, timer);
  return {std::move(z), report, weights};
}

SimResult sample_inclusion(const TruncatedWeights& weights, const RestrictingDistribution& f,
                           std::size_t n, Rng& rng) {
  const std::vector<RestrictingDistribution> per_row(n, f);
  return sample_inclusion(weights, per_row, rng);
}

RetrospectiveStick::RetrospectiveStick(double alpha, std::size_t initial_atoms, Rng& rng)
    : alpha_(alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("retrospective stick: alpha must be positive");
  if (initial_atoms == 0) throw std::invalid_argument("retrospective stick: need one atom");
  for (std::size_t i = 0; i < initial_atoms; ++i) extend(rng);
}

RetrospectiveStick::RetrospectiveStick(const TruncatedWeights& weights) : alpha_(weights.alpha()) {
  if (weights.kind() != WeightsKind::StickBreaking || weights.c() != 1.0)
    throw std::invalid_argument("retrospective stick needs c = 1 stick-breaking weights");
  for (double p : weights.values()) log_pi_.push_back(std::log(p));
}

void RetrospectiveStick::extend(Rng& rng) {
  const double prev = log_pi_.empty() ? 0.0 : log_pi_.back();
  log_pi_.push_back(prev + std::log1p(-rng.uniform()) / alpha_);
}

double RetrospectiveStick::last() const { return std::exp(log_pi_.back()); }

TruncatedWeights RetrospectiveStick::weights() const {
  std::vector<double> pi(log_pi_.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = std::exp(log_pi_[i]);
  return TruncatedWeights(std::move(pi), alpha_, 1.0, WeightsKind::StickBreaking);
}

int RetrospectiveStick::draw_tail(BinaryRow& row, Rng& rng) {
  const double r1 = static_cast<double>(examined_) + 1.0;
  const double log_pi_i = log_pi_.back();
  // 1 - (1 - pi_I)^(r+1)
  const double span = -std::expm1(r1 * std::log1p(-std::exp(log_pi_i)));
  const auto ones = static_cast<int>(random::poisson(rng, alpha_ * span / r1));
  ++examined_;
  if (ones == 0) return 0;

  // On-atoms: i.i.d. with density proportional to (1 - p)^r on (0, pi_I).
  std::vector<std::pair<double, std::uint8_t>> atoms;
  for (int k = 0; k < ones; ++k) {
    const double p = -std::expm1(std::log1p(-rng.uniform() * span) / r1);
    atoms.emplace_back(std::log(p), 1);
  }
  double floor = 0.0;
  for (const auto& a : atoms) floor = std::min(floor, a.first);
  // Off-atoms above the smallest on-atom: intensity alpha (1 - p)^(r+1) / p,
  // by thinning the alpha / p stick.
  for (double lp = log_pi_i + std::log1p(-rng.uniform()) / alpha_; lp > floor;
       lp += std::log1p(-rng.uniform()) / alpha_)
    if (rng.uniform() < std::exp(r1 * std::log1p(-std::exp(lp)))) atoms.emplace_back(lp, 0);
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [lp, on] : atoms) {
    log_pi_.push_back(lp);
    row.push_back(on);
  }
  return ones;
}

RetrospectiveStick::Proposal RetrospectiveStick::propose(int j, Rng& rng) {
  BinaryRow row(log_pi_.size(), 0);
  int k_star = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    row[i] = random::bernoulli(rng, std::exp(log_pi_[i]));
    k_star += row[i];
  }
  if (k_star > j) return {Outcome::RejectExcess, k_star, std::move(row)};
  const int tail = draw_tail(row, rng);
  if (k_star == j) return {tail == 0 ? Outcome::AcceptEqual : Outcome::RejectEqual, k_star, std::move(row)};
  return {tail == j - k_star ? Outcome::AcceptDeficit : Outcome::RejectDeficit, k_star, std::move(row)};
}

SimResult sample_exact_retrospective(double alpha, const RestrictingDistribution& f,
                                     std::size_t n, Rng& rng, const SamplerOptions& opts) {
  if (f.is_unrestricted())
    throw std::invalid_argument("exact retrospective sampler needs a restricting distribution");
  Timer timer;
  SimReport report;
  report.method = std::string(to_string(SimMethod::ExactRetrospective));
  RetrospectiveStick stick(alpha, std::max<std::size_t>(1, opts.initial_truncation), rng);
  const std::size_t start = stick.truncation();
  std::vector<BinaryRow> rows;
  rows.reserve(n);
  while (rows.size() < n) {
    const int j = f.sample(rng);
    std::uint64_t tries = 0;
    for (;;) {
      check_cap(++tries, opts, report.method);
      auto prop = stick.propose(j, rng);
      ++report.proposals;
      using O = RetrospectiveStick::Outcome;
      switch (prop.outcome) {
        case O::RejectExcess: ++report.excess_proposals; break;
        case O::RejectEqual:
        case O::AcceptEqual: ++report.equal_proposals; break;
        case O::RejectDeficit:
        case O::AcceptDeficit: ++report.deficit_proposals; break;
      }
      if (prop.outcome == O::AcceptEqual || prop.outcome == O::AcceptDeficit) {
        if (prop.outcome == O::AcceptEqual)
          ++report.equal_accepted;
        else
          ++report.deficit_accepted;
        rows.push_back(std::move(prop.row));
        ++report.accepted;
        break;
      }
      ++report.rejections;
    }
  }
  FeatureMatrix z(0, stick.truncation());
  for (auto& row : rows) {
    row.resize(stick.truncation(), 0);
    z.append_row(row);
  }
  report.truncation = stick.truncation();
  report.atoms_added = stick.truncation() - start;
  stamp(report, timer);
  return {std::move(z), report, stick.weights()};
}

}  // namespace ribp
