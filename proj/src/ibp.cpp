#include "ribp/ibp.hpp"

#include <algorithm>
#include <stdexcept>

#include "ribp/random.hpp"

namespace ribp {

int IbpState::active() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int m) { return m > 0; }));
}

void IbpState::absorb(const BinaryRow& row) {
  if (row.size() > counts.size()) counts.resize(row.size(), 0);
  for (std::size_t i = 0; i < row.size(); ++i) counts[i] += row[i];
  ++customers;
}

void IbpState::remove(const BinaryRow& row) {
  if (row.size() > counts.size()) throw std::invalid_argument("IbpState::remove: row too wide");
  for (std::size_t i = 0; i < row.size(); ++i) {
    counts[i] -= row[i];
    if (counts[i] < 0) throw std::logic_error("IbpState::remove: negative dish count");
  }
  --customers;
}

BinaryRow ibp_propose(const IbpState& state, double alpha, Rng& rng) {
  const double n1 = state.customers + 1.0;
  BinaryRow row(state.counts.size(), 0);
  for (std::size_t i = 0; i < row.size(); ++i)
    if (state.counts[i] > 0) row[i] = random::bernoulli(rng, state.counts[i] / n1);
  const auto fresh = random::poisson(rng, alpha / n1);
  row.resize(row.size() + fresh, 1);
  return row;
}

BinaryRow ibp_predictive_next(IbpState& state, double alpha, Rng& rng) {
  BinaryRow row = ibp_propose(state, alpha, rng);
  state.absorb(row);
  return row;
}

}  // namespace ribp
