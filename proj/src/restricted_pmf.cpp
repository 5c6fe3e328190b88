#include "ribp/restricted_pmf.hpp"

#include <cmath>
#include <stdexcept>

#include "ribp/inclusion.hpp"
#include "ribp/numeric.hpp"

namespace ribp {

double restricted_bernoulli_log_pmf(std::span<const std::uint8_t> z,
                                    const TruncatedWeights& weights,
                                    const RestrictingDistribution& f) {
  if (z.size() != weights.size())
    throw std::invalid_argument("restricted pmf: row length differs from truncation");
  f.require_fits(weights.size());
  double bern = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) {
      bern += std::log(weights[i]);
      ++count;
    } else {
      bern += std::log1p(-weights[i]);
    }
  }
  if (f.is_unrestricted()) return bern;
  const double lf = f.log_pmf(count);
  if (lf == kNegInf) return kNegInf;
  return lf + bern - log_poisson_binomial(weights.values(), count)[count];
}

}  // namespace ribp
