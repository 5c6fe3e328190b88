#pragma once

#include <vector>

#include "ribp/feature_matrix.hpp"
#include "ribp/rng.hpp"

namespace ribp {

/// Sufficient statistics of the one-parameter IBP predictive: how many
/// customers have been served and how often each dish has been taken.
struct IbpState {
  std::vector<int> counts;  // m_i
  int customers = 0;        // n

  /// Number of dishes with m_i > 0.
  int active() const;
  /// Adds a row (of width >= counts.size()) as the next customer.
  void absorb(const BinaryRow& row);
  /// Removes a previously absorbed row. Trailing zero counts are kept.
  void remove(const BinaryRow& row);
};

/// Draws the next customer's row without changing `state`: dish i with
/// probability m_i / (n + 1), then Poisson(alpha / (n + 1)) new dishes.
/// The row has width counts.size() + (number of new dishes).
BinaryRow ibp_propose(const IbpState& state, double alpha, Rng& rng);

/// ibp_propose followed by state.absorb.
BinaryRow ibp_predictive_next(IbpState& state, double alpha, Rng& rng);

}  // namespace ribp
