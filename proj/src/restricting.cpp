#include "ribp/restricting.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ribp/numeric.hpp"

namespace ribp {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw std::invalid_argument("f spec: cannot parse " + std::string(what) + " from '" +
                                std::string(text) + "'");
  return value;
}

int parse_count(std::string_view text, std::string_view what) {
  const double v = parse_number(text, what);
  if (v < 0 || v != std::floor(v) || v > 1e6)
    throw std::invalid_argument("f spec: " + std::string(what) + " must be a non-negative integer");
  return static_cast<int>(v);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

// Mixture components are separated by '+', except where '+' is an exponent sign.
std::vector<std::string_view> split_components(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const bool end = i == text.size();
    if (end || (text[i] == '+' && i > 0 && text[i - 1] != 'e' && text[i - 1] != 'E')) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace

RestrictingDistribution::RestrictingDistribution(Kind kind, std::vector<double> pmf,
                                                 std::string spec)
    : kind_(kind), pmf_(std::move(pmf)), spec_(std::move(spec)) {
  if (kind_ == Kind::Unrestricted) return;
  while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();
  if (pmf_.empty()) throw std::invalid_argument("f: empty pmf");
  double total = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("f: pmf entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("f: pmf must sum to 1");
  for (double& p : pmf_) p /= total;
  support_max_ = static_cast<int>(pmf_.size()) - 1;
  support_min_ = 0;
  while (pmf_[support_min_] == 0.0) ++support_min_;
}

RestrictingDistribution RestrictingDistribution::point_mass(int j) {
  if (j < 0) throw std::invalid_argument("f: delta count must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(j) + 1, 0.0);
  pmf[j] = 1.0;
  return {Kind::PointMass, std::move(pmf), "delta:" + std::to_string(j)};
}

RestrictingDistribution RestrictingDistribution::uniform_window(int center, int halfwidth) {
  if (center < 0 || halfwidth < 0)
    throw std::invalid_argument("f: uniform window needs center >= 0 and halfwidth >= 0");
  const int lo = std::max(0, center - halfwidth);
  const int hi = center + halfwidth;
  std::vector<double> pmf(static_cast<std::size_t>(hi) + 1, 0.0);
  for (int k = lo; k <= hi; ++k) pmf[k] = 1.0 / (hi - lo + 1);
  return {Kind::UniformWindow, std::move(pmf),
          "uniform:" + std::to_string(center) + ":" + std::to_string(halfwidth)};
}

RestrictingDistribution RestrictingDistribution::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("f: poisson mean must be finite and >= 0");
  std::vector<double> pmf;
  if (lambda == 0.0) {
    pmf = {1.0};
  } else {
    const int hard_cap = static_cast<int>(lambda + 60.0 * std::sqrt(lambda) + 200.0);
    double cumulative = 0.0;
    for (int k = 0; k <= hard_cap; ++k) {
      const double p = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
      pmf.push_back(p);
      cumulative += p;
      if (cumulative >= 1.0 - kPoissonTailMass) break;
    }
    const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    for (double& p : pmf) p /= total;
  }
  return {Kind::Poisson, std::move(pmf), "poisson:" + format_double(lambda)};
}

RestrictingDistribution RestrictingDistribution::mixture(
    std::vector<double> weights, std::vector<RestrictingDistribution> components) {
  if (weights.size() != components.size() || weights.empty())
    throw std::invalid_argument("f: mixture needs one weight per component");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("f: mixture weights must sum to > 0");
  std::size_t width = 0;
  for (const auto& c : components) {
    if (c.is_unrestricted()) throw std::invalid_argument("f: cannot mix 'unrestricted'");
    if (c.kind() == Kind::Mixture) throw std::invalid_argument("f: nested mixtures are not supported");
    width = std::max(width, c.pmf_.size());
  }
  std::vector<double> pmf(width, 0.0);
  std::string spec = "mix:";
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (weights[c] < 0.0) throw std::invalid_argument("f: mixture weights must be >= 0");
    const double w = weights[c] / total;
    for (std::size_t k = 0; k < components[c].pmf_.size(); ++k) pmf[k] += w * components[c].pmf_[k];
    if (c > 0) spec += "+";
    spec += format_double(weights[c]) + "*" + components[c].spec_;
  }
  return {Kind::Mixture, std::move(pmf), std::move(spec)};
}

RestrictingDistribution RestrictingDistribution::table(std::vector<double> pmf) {
  std::string spec = "table:";
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (k > 0) spec += ",";
    spec += format_double(pmf[k]);
  }
  return {Kind::Table, std::move(pmf), std::move(spec)};
}

RestrictingDistribution RestrictingDistribution::unrestricted() {
  return {Kind::Unrestricted, {}, "unrestricted"};
}

RestrictingDistribution RestrictingDistribution::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (head == "unrestricted" && colon == std::string_view::npos) return unrestricted();
  if (head == "delta") return point_mass(parse_count(rest, "delta count"));
  if (head == "uniform") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) throw std::invalid_argument("f spec: expected uniform:k:h");
    return uniform_window(parse_count(parts[0], "window center"),
                          parse_count(parts[1], "window halfwidth"));
  }
  if (head == "poisson") return poisson(parse_number(rest, "poisson mean"));
  if (head == "table") {
    std::vector<double> pmf;
    for (auto part : split(rest, ',')) pmf.push_back(parse_number(part, "table entry"));
    return table(std::move(pmf));
  }
  if (head == "mix") {
    std::vector<double> weights;
    std::vector<RestrictingDistribution> components;
    for (auto part : split_components(rest)) {
      const auto star = part.find('*');
      if (star == std::string_view::npos)
        throw std::invalid_argument("f spec: mixture components must look like w*spec");
      weights.push_back(parse_number(part.substr(0, star), "mixture weight"));
      components.push_back(parse(part.substr(star + 1)));
    }
    return mixture(std::move(weights), std::move(components));
  }
  throw std::invalid_argument("f spec: unknown distribution '" + std::string(text) + "'");
}

bool RestrictingDistribution::is_point_mass() const {
  return kind_ != Kind::Unrestricted && support_min_ == support_max_;
}

double RestrictingDistribution::pmf(int k) const {
  if (kind_ == Kind::Unrestricted) throw std::logic_error("f: unrestricted has no pmf");
  if (k < 0 || k > support_max_) return 0.0;
  return pmf_[k];
}

double RestrictingDistribution::log_pmf(int k) const {
  const double p = pmf(k);
  return p > 0.0 ? std::log(p) : kNegInf;
}

double RestrictingDistribution::accept_probability(int k) const {
  return kind_ == Kind::Unrestricted ? 1.0 : pmf(k);
}

double RestrictingDistribution::mean() const {
  if (kind_ == Kind::Unrestricted) throw std::logic_error("f: unrestricted has no mean");
  double m = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += k * pmf_[k];
  return m;
}

int RestrictingDistribution::sample(Rng& rng) const {
  if (kind_ == Kind::Unrestricted) throw std::logic_error("f: cannot sample unrestricted");
  double u = rng.uniform();
  for (int k = 0; k <= support_max_; ++k) {
    if (u < pmf_[k]) return k;
    u -= pmf_[k];
  }
  return support_max_;
}

void RestrictingDistribution::require_fits(std::size_t truncation) const {
  if (kind_ != Kind::Unrestricted && static_cast<std::size_t>(support_max_) > truncation)
    throw std::invalid_argument("f '" + spec_ + "' has support up to " +
                                std::to_string(support_max_) + " which exceeds truncation level " +
                                std::to_string(truncation));
}

}  // namespace ribp
