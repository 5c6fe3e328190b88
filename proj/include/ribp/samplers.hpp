#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ribp/feature_matrix.hpp"
#include "ribp/restricting.hpp"
#include "ribp/rng.hpp"
#include "ribp/weights.hpp"

namespace ribp {

enum class SimMethod {
  CollapsedRejection,
  UncollapsedRejection,
  TiltedRejection,
  Inclusion,
  ExactRetrospective,
};

std::string_view to_string(SimMethod method);
/// Accepts the CLI names: collapsed-rejection, uncollapsed-rejection,
/// tilted-rejection, inclusion, exact-retrospective.
SimMethod parse_sim_method(std::string_view name);
/// True for methods that take a weight vector as input.
bool conditions_on_weights(SimMethod method);

/// Counters from one sampler run.
struct SimReport {
  std::string method;
  std::uint64_t accepted = 0;
  std::uint64_t proposals = 0;
  std::uint64_t rejections = 0;
  double seconds = 0.0;      // wall clock
  double cpu_seconds = 0.0;  // process CPU time
  std::size_t truncation = 0;

  // Exact retrospective sampler: proposals per case of the K* vs J rule.
  std::uint64_t excess_proposals = 0;     // K* > J
  std::uint64_t equal_proposals = 0;      // K* = J
  std::uint64_t equal_accepted = 0;
  std::uint64_t deficit_proposals = 0;    // K* < J
  std::uint64_t deficit_accepted = 0;
  std::uint64_t atoms_added = 0;

  /// proposals == accepted + rejections.
  bool consistent() const { return proposals == accepted + rejections; }
};

struct SimResult {
  FeatureMatrix z;
  SimReport report;
  /// Weights the rows were drawn from; the grown stick for the exact sampler.
  std::optional<TruncatedWeights> weights;
};

struct SamplerOptions {
  /// Proposals allowed for a single row before giving up with NumericalError.
  std::uint64_t max_proposals_per_row = 1'000'000;
  /// Atoms instantiated before the first row (exact sampler only).
  std::size_t initial_truncation = 1;
};

/// Exact R-IBP(c=1, alpha, f) rows from IBP predictive proposals. Every
/// proposal, accepted or not, is folded into the dish counts. Columns are in
/// dish-creation order; dishes that no accepted row uses are dropped.
SimResult sample_collapsed_rejection(double alpha, const RestrictingDistribution& f,
                                     std::size_t n, Rng& rng, const SamplerOptions& opts = {});

/// The broken construction with f = delta_1 in which proposals only see the
/// dish counts of accepted rows. Kept as a reference for the exchangeability
/// tests; its law is not R-IBP.
FeatureMatrix sample_naive_nonexchangeable(double alpha, std::size_t n, Rng& rng);

/// Rows i.i.d. given the weights. Untilted: propose Bernoulli(pi) rows and
/// accept with probability f(sum). Tilted: draw J_n ~ f, propose from the
/// Esscher-tilted weights whose mean row sum is J_n (cached per J) and accept
/// iff the sum equals J_n. Rows with J_n in {0, I} are filled directly.
SimResult sample_uncollapsed_rejection(const TruncatedWeights& weights,
                                       const RestrictingDistribution& f, std::size_t n,
                                       Rng& rng, bool tilted, const SamplerOptions& opts = {});

/// Rows i.i.d. given the weights with no rejections: J_n ~ f, then a
/// draw-by-draw conditional-Bernoulli sample. An unrestricted f gives plain
/// Bernoulli-process rows.
SimResult sample_inclusion(const TruncatedWeights& weights, const RestrictingDistribution& f,
                           std::size_t n, Rng& rng);
/// One row per entry of `per_row`, row n drawn with f_n.
SimResult sample_inclusion(const TruncatedWeights& weights,
                           std::span<const RestrictingDistribution> per_row, Rng& rng);

/// Stick-breaking beta-process atoms grown on demand, with the K* vs J
/// decision rule used by the exact sampler.
///
/// The atoms below the last one, pi_I, are shared by every proposal. After r
/// proposals have had their tail looked at and found empty below pi_I, the
/// tail is a Poisson process with intensity alpha (1 - p)^r / p on (0, pi_I),
/// so the next proposal turns on Poisson(alpha (1 - (1 - pi_I)^(r+1)) / (r+1))
/// tail features. Whenever that count is positive the features it turns on,
/// and every atom above the smallest of them, are instantiated, accepted or
/// not. With r = 0 this is the Poisson(alpha * pi_I) count.
class RetrospectiveStick {
 public:
  enum class Outcome {
    RejectExcess,   // K* > J
    RejectEqual,    // K* = J but the tail was not empty
    AcceptEqual,    // K* = J, empty tail
    RejectDeficit,  // K* < J, tail count != J - K*
    AcceptDeficit,  // K* < J, tail supplied the missing ones; stick extended
  };

  struct Proposal {
    Outcome outcome;
    int k_star;
    BinaryRow row;  // width = truncation() after the call; meaningful when accepted
  };

  RetrospectiveStick(double alpha, std::size_t initial_atoms, Rng& rng);
  /// Continues from existing stick-breaking weights.
  explicit RetrospectiveStick(const TruncatedWeights& weights);

  /// One proposal for a row that must have exactly J ones.
  Proposal propose(int j, Rng& rng);

  std::size_t truncation() const { return log_pi_.size(); }
  double alpha() const { return alpha_; }
  double last() const;
  /// Proposals whose tail has been examined so far (r above).
  std::size_t examined() const { return examined_; }
  TruncatedWeights weights() const;

 private:
  void extend(Rng& rng);
  // Draws the tail of the current proposal and appends its entries to `row`.
  int draw_tail(BinaryRow& row, Rng& rng);

  double alpha_;
  std::vector<double> log_pi_;
  std::size_t examined_ = 0;
};

/// Exact R-IBP(c=1, alpha, f) rows with dynamic truncation. J_n ~ f is drawn
/// once per row; proposals follow RetrospectiveStick::propose. Rows accepted
/// earlier have zeros on atoms added later. Throws NumericalError when a row
/// needs more than opts.max_proposals_per_row proposals.
SimResult sample_exact_retrospective(double alpha, const RestrictingDistribution& f,
                                     std::size_t n, Rng& rng, const SamplerOptions& opts = {});

}  // namespace ribp
