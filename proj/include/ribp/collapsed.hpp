#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ribp/feature_matrix.hpp"
#include "ribp/restricting.hpp"
#include "ribp/rng.hpp"

namespace ribp {

/// Discarded IBP rows that sit between accepted rows. t[n] counts the rows
/// discarded just before accepted row n and c[n][i] how many of them took
/// dish i. Columns of c are aligned with the columns of Z.
struct AuxState {
  std::vector<int> t;
  std::vector<std::vector<int>> c;

  /// m_i = sum_n (z_ni + c_ni).
  std::vector<int> totals(const FeatureMatrix& z) const;
  /// N + sum_n t_n, the number of customers in the underlying IBP sequence.
  int customers(const FeatureMatrix& z) const;
};

struct CollapsedModel {
  Eigen::MatrixXd X;  // N x D; ignored when flat
  double sigma_A2 = 1.0;
  double sigma_n2 = 1.0;
  bool flat = false;
};

struct CollapsedOptions {
  /// Auxiliary proposals allowed per row before the old (t_n, c_n) is kept.
  std::uint64_t cap = 100'000;
  /// Also run single-entry flips on columns used by other rows.
  bool single_flips = true;
};

struct CollapsedSweepStats {
  std::size_t rows_accepted = 0;
  std::size_t flips_accepted = 0;
  std::size_t cap_hits = 0;
};

/// A forward draw of (Z, aux) from the prior by IBP subsampling. Throws
/// NumericalError when a row needs more than `cap` proposals.
void collapsed_initialize(FeatureMatrix& z, AuxState& aux, double alpha,
                          const RestrictingDistribution& f, std::size_t n, Rng& rng,
                          std::uint64_t cap = 1'000'000);

/// One sweep of the collapsed sampler. For each row n the block
/// (t_n, c_n, Z_n) is regenerated from the IBP predictive given the other
/// blocks: proposals are drawn until one passes the f test, the failures form
/// the new (t_n, c_n) and the survivor is the new Z_n. The block is accepted
/// with probability min(1, p(X | Z') / p(X | Z)), with A integrated out.
/// Single-entry flips then use the IBP conditional m_{-ni} / (N + sum t)
/// times the f ratio times the likelihood ratio. Columns with m_i = 0 are
/// removed at the end.
CollapsedSweepStats collapsed_sweep(FeatureMatrix& z, AuxState& aux, const CollapsedModel& model,
                                    double alpha, const RestrictingDistribution& f, Rng& rng,
                                    const CollapsedOptions& opts = {});

}  // namespace ribp
