#include "ribp/inclusion.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "ribp/errors.hpp"
#include "ribp/numeric.hpp"
#include "ribp/random.hpp"

namespace ribp {

namespace {

std::uint64_t fingerprint(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

std::vector<double> log_poisson_binomial(std::span<const double> weights, int j_max) {
  if (j_max < 0) throw std::invalid_argument("log_poisson_binomial: negative j_max");
  std::vector<double> s(j_max + 1, kNegInf);
  s[0] = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double lp = std::log(weights[i]);
    const double lq = std::log1p(-weights[i]);
    const int top = std::min<int>(j_max, static_cast<int>(i) + 1);
    for (int j = top; j >= 1; --j) s[j] = log_add(lp + s[j - 1], lq + s[j]);
    s[0] += lq;
  }
  return s;
}

InclusionTable::InclusionTable(const TruncatedWeights& weights, int j_max)
    : pi_(weights.values().begin(), weights.values().end()), j_max_(j_max) {
  const std::size_t n = pi_.size();
  if (j_max < 0 || static_cast<std::size_t>(j_max) > n)
    throw std::invalid_argument("inclusion table: j_max must lie in [0, I]");
  hash_ = fingerprint(pi_);
  log_pi_.resize(n);
  log_1m_pi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_pi_[i] = std::log(pi_[i]);
    log_1m_pi_[i] = std::log1p(-pi_[i]);
  }

  const std::size_t w = j_max_ + 1;
  prefix_.assign((n + 1) * w, kNegInf);
  suffix_.assign((n + 1) * w, kNegInf);
  prefix_[idx(0, 0)] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    prefix_[idx(i, 0)] = prefix_[idx(i - 1, 0)] + log_1m_pi_[i - 1];
    for (int j = 1; j <= j_max_; ++j)
      prefix_[idx(i, j)] = log_add(log_pi_[i - 1] + prefix_[idx(i - 1, j - 1)],
                                   log_1m_pi_[i - 1] + prefix_[idx(i - 1, j)]);
  }
  suffix_[idx(n, 0)] = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix_[idx(i, 0)] = suffix_[idx(i + 1, 0)] + log_1m_pi_[i];
    for (int j = 1; j <= j_max_; ++j)
      suffix_[idx(i, j)] = log_add(log_pi_[i] + suffix_[idx(i + 1, j - 1)],
                                   log_1m_pi_[i] + suffix_[idx(i + 1, j)]);
  }

  eta_.assign(n * w, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (int j = 1; j <= j_max_; ++j) {
      const double e = std::exp(log_pi_[k] + log_s_without(k, j - 1) - log_s(j));
      eta_[k * w + j] = std::clamp(e, 0.0, 1.0);
    }
}

double InclusionTable::log_s(int j) const {
  if (j < 0 || static_cast<std::size_t>(j) > pi_.size()) return kNegInf;
  if (j > j_max_) throw std::out_of_range("inclusion table: count exceeds j_max");
  return prefix_[idx(pi_.size(), j)];
}

double InclusionTable::log_prefix(std::size_t i, int j) const {
  if (j < 0 || static_cast<std::size_t>(j) > i) return kNegInf;
  if (j > j_max_) throw std::out_of_range("inclusion table: count exceeds j_max");
  return prefix_[idx(i, j)];
}

double InclusionTable::log_suffix(std::size_t i, int j) const {
  if (j < 0 || static_cast<std::size_t>(j) > pi_.size() - i) return kNegInf;
  if (j > j_max_) throw std::out_of_range("inclusion table: count exceeds j_max");
  return suffix_[idx(i, j)];
}

double InclusionTable::log_s_without(std::size_t k, int j) const {
  if (j < 0 || static_cast<std::size_t>(j) >= pi_.size()) return kNegInf;
  if (j > j_max_) throw std::out_of_range("inclusion table: count exceeds j_max");
  double acc = kNegInf;
  for (int a = 0; a <= j; ++a) acc = log_add(acc, prefix_[idx(k, a)] + suffix_[idx(k + 1, j - a)]);
  return acc;
}

double InclusionTable::bernoulli_log_prob(std::span<const std::uint8_t> z) const {
  if (z.size() != pi_.size()) throw std::invalid_argument("row length differs from truncation");
  double lp = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) lp += z[i] ? log_pi_[i] : log_1m_pi_[i];
  return lp;
}

double InclusionTable::row_log_pmf(std::span<const std::uint8_t> z,
                                   const RestrictingDistribution& f) const {
  const double bern = bernoulli_log_prob(z);
  if (f.is_unrestricted()) return bern;
  int count = 0;
  for (auto v : z) count += v != 0;
  const double lf = f.log_pmf(count);
  if (lf == kNegInf) return kNegInf;
  return lf + bern - log_s(count);
}

InclusionTable build_inclusion_table(const TruncatedWeights& weights, int j_max) {
  return InclusionTable(weights, j_max);
}

BinaryRow draw_by_draw_sample(const InclusionTable& table, int j, Rng& rng) {
  const std::size_t n = table.truncation();
  if (j < 0 || j > table.j_max())
    throw std::invalid_argument("draw_by_draw: count exceeds the table's j_max");
  BinaryRow z(n, 0);
  int remaining = j;
  for (std::size_t k = 0; k < n && remaining > 0; ++k) {
    if (static_cast<std::size_t>(remaining) == n - k) {
      for (std::size_t r = k; r < n; ++r) z[r] = 1;
      break;
    }
    const double p = std::exp(table.log_weight(k) + table.log_suffix(k + 1, remaining - 1) -
                              table.log_suffix(k, remaining));
    if (random::bernoulli(rng, std::min(p, 1.0))) {
      z[k] = 1;
      --remaining;
    }
  }
  return z;
}

TiltParameter solve_tilt(const TruncatedWeights& weights, int j) {
  const std::size_t n = weights.size();
  if (j <= 0 || static_cast<std::size_t>(j) >= n)
    throw std::invalid_argument("solve_tilt: requires 0 < J < I");
  std::vector<double> lo_odds(n);
  for (std::size_t i = 0; i < n; ++i) lo_odds[i] = logit(weights[i]);
  auto excess = [&](double beta) {
    double s = 0.0;
    for (double l : lo_odds) s += logistic(l + beta);
    return s - j;
  };
  double lo = -60.0, hi = 60.0;
  while (excess(lo) > 0.0) {
    lo *= 2.0;
    if (lo < -1e6) throw NumericalError("solve_tilt: could not bracket the root");
  }
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("solve_tilt: could not bracket the root");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return TiltParameter{0.5 * (lo + hi)};
}

InclusionBounds inclusion_bounds(const TruncatedWeights& weights, int j, std::size_t k) {
  if (weights.kind() != WeightsKind::StickBreaking)
    throw std::invalid_argument("inclusion bounds need size-ordered stick-breaking weights");
  if (j < 0 || static_cast<std::size_t>(j) > weights.size() || k >= weights.size())
    throw std::invalid_argument("inclusion bounds: index out of range");
  const InclusionTable table(weights, j);
  const double rate = weights.last() * weights.alpha();
  const double e = std::exp(-rate);
  const double tail = -std::expm1(-rate);
  const double s_loo = j == 0 ? 0.0 : std::exp(table.log_s_without(k, j - 1));
  const double s = std::exp(table.log_s(j));
  const double pk = weights[k];
  return {pk * e * s_loo / (e * s + tail), pk * (e * s_loo + tail) / (e * s)};
}

}  // namespace ribp
