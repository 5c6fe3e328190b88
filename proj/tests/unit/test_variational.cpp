#include <cmath>
#include <numbers>
#include <vector>

#include "brute_force.hpp"
#include "doctest.h"
#include "ribp/measure.hpp"
#include "ribp/random.hpp"
#include "ribp/samplers.hpp"
#include "ribp/stats.hpp"
#include "ribp/variational.hpp"

using namespace ribp;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

VariationalState random_state(Rng& rng, std::size_t n, std::size_t width, std::size_t d,
                              const RestrictingDistribution& f, double sn2 = 0.5) {
  auto w = weak_limit_weights(2.0, 1.0, width, rng);
  std::vector<RestrictingDistribution> fs(n, f);
  const auto z = sample_inclusion(w, fs, rng).z;
  Eigen::MatrixXd a = gaussian_matrix(width, d, 1.0, rng);
  Eigen::MatrixXd x = z.to_eigen() * a + gaussian_matrix(n, d, std::sqrt(sn2), rng);
  VariationalState s(x, w, fs, 1.0, sn2, z);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < width; ++i) s.nu(r, i) = rng.uniform();
  s.Phi = Eigen::MatrixXd::Constant(width, d, 0.3) + gaussian_matrix(width, d, 0.05, rng).cwiseAbs();
  s.refresh_pred();
  return s;
}

std::vector<double> weight_vector(const VariationalState& s) {
  return {s.weights.values().begin(), s.weights.values().end()};
}

void check_invariants(const VariationalState& s) {
  for (std::size_t n = 0; n < s.rows(); ++n) {
    if (!s.f[n].is_unrestricted()) CHECK(std::abs(s.gamma.row(n).sum() - 1.0) < 1e-10);
    for (std::size_t i = 0; i < s.truncation(); ++i) CHECK((s.nu(n, i) >= 0.0 && s.nu(n, i) <= 1.0));
  }
  CHECK(s.Phi.minCoeff() >= 0.0);
  CHECK((s.pred - s.nu * s.phi).norm() < 1e-8);
}

}  // namespace

TEST_CASE("gamma update") {
  Rng rng(41);
  auto s = random_state(rng, 3, 5, 2, RestrictingDistribution::point_mass(2));
  for (std::size_t n = 0; n < 3; ++n) {
    update_gamma(s, n);
    CHECK(s.gamma(n, 2) == 1.0);
  }

  // J_max = 1, f uniform on {0, 1}
  auto t = random_state(rng, 2, 3, 2, RestrictingDistribution::table({0.5, 0.5}));
  update_gamma(t, 1);
  const auto pi = weight_vector(t);
  double lm[2];
  for (int k = 0; k < 2; ++k) {
    lm[k] = std::log(0.5);
    for (std::size_t i = 0; i < 3; ++i) {
      const double e = std::clamp(oracle::eta(pi, i, k), 1e-12, 1.0 - 1e-12);
      lm[k] += t.nu(1, i) * std::log(e) + (1.0 - t.nu(1, i)) * std::log(1.0 - e);
    }
  }
  CHECK(std::abs(t.gamma(1, 1) - 1.0 / (1.0 + std::exp(lm[0] - lm[1]))) < 1e-12);
  CHECK(std::abs(t.gamma(1, 0) + t.gamma(1, 1) - 1.0) < 1e-12);
}

TEST_CASE("nu update") {
  Rng rng(42);
  auto s = random_state(rng, 2, 4, 3, RestrictingDistribution::uniform_window(2, 1), 1e300);
  update_gamma(s, 0);
  update_nu(s, 0, 1);
  double prior = 0.0;
  for (Eigen::Index k = 0; k < s.gamma.cols(); ++k)
    if (s.gamma(0, k) > 0.0) prior += s.gamma(0, k) * (s.log_eta(1, k) - s.log_one_minus_eta(1, k));
  CHECK(std::abs(s.nu(0, 1) - sigmoid(prior)) < 1e-12);

  s.log_eta.setConstant(std::log(0.5));
  s.log_one_minus_eta.setConstant(std::log(0.5));
  update_nu(s, 1, 2);
  CHECK(s.nu(1, 2) == doctest::Approx(0.5).epsilon(1e-14));

  // one feature, one dimension
  Eigen::MatrixXd x(1, 1);
  x << 1.3;
  FeatureMatrix z(1, 1);
  z.set(0, 0, true);
  TruncatedWeights w({0.4}, 1.0, 1.0, WeightsKind::WeakLimit);
  VariationalState one(x, w, {RestrictingDistribution::unrestricted()}, 1.0, 0.7, z);
  one.phi(0, 0) = 0.9;
  one.Phi(0, 0) = 0.2;
  one.refresh_pred();
  update_nu(one, 0, 0);
  const double xi = std::log(0.4 / 0.6) - (-2 * 0.9 * 1.3 + 0.2 + 0.81) / (2 * 0.7);
  CHECK(std::abs(one.nu(0, 0) - sigmoid(xi)) < 1e-12);
}

TEST_CASE("A update") {
  Rng rng(43);
  auto s = random_state(rng, 4, 3, 2, RestrictingDistribution::uniform_window(1, 1));
  s.nu.setZero();
  s.refresh_pred();
  update_A(s);
  CHECK(s.phi.norm() == 0.0);
  CHECK((s.Phi.array() - 1.0).abs().maxCoeff() < 1e-15);

  Eigen::MatrixXd x(1, 1);
  x << 2.0;
  FeatureMatrix z(1, 1);
  z.set(0, 0, true);
  VariationalState one(x, TruncatedWeights({0.5}, 1.0, 1.0, WeightsKind::WeakLimit),
                       {RestrictingDistribution::unrestricted()}, 1.5, 0.5, z);
  one.nu(0, 0) = 1.0;
  one.refresh_pred();
  update_A(one);
  CHECK(std::abs(one.phi(0, 0) - 2.0 * 1.5 / 2.0) < 1e-12);

  // binary nu: coordinate ascent over features converges to the conjugate mean
  auto b = random_state(rng, 7, 4, 3, RestrictingDistribution::uniform_window(2, 1));
  FeatureMatrix zb(7, 4);
  for (std::size_t n = 0; n < 7; ++n)
    for (std::size_t i = 0; i < 4; ++i) {
      zb.set(n, i, rng.uniform() < 0.5);
      b.nu(n, i) = zb(n, i);
    }
  b.refresh_pred();
  for (int it = 0; it < 2000; ++it) update_A(b);
  const auto post = posterior_A(zb, b.X, b.sigma_A2, b.sigma_n2);
  CHECK((b.phi - post.mean).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ELBO terms against independent oracles") {
  Rng rng(44);
  const auto f = RestrictingDistribution::table({0.1, 0.3, 0.4, 0.2});
  auto s = random_state(rng, 3, 4, 2, f);
  for (std::size_t n = 0; n < 3; ++n) update_gamma(s, n);
  const auto terms = elbo_terms(s);

  // data term by Monte Carlo over q(Z) q(A)
  std::vector<double> v(200000);
  for (auto& sample : v) {
    double lp = 0.0;
    Eigen::MatrixXd a(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int d = 0; d < 2; ++d) a(i, d) = random::normal(rng, s.phi(i, d), std::sqrt(s.Phi(i, d)));
    for (int n = 0; n < 3; ++n) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(2);
      for (int i = 0; i < 4; ++i)
        if (rng.uniform() < s.nu(n, i)) mean += a.row(i);
      for (int d = 0; d < 2; ++d) {
        const double r = s.X(n, d) - mean(d);
        lp += -0.5 * (kLog2Pi + std::log(s.sigma_n2)) - 0.5 * r * r / s.sigma_n2;
      }
    }
    sample = lp;
  }
  CHECK(std::abs(terms.log_lik - stats::mean(v)) < 4 * stats::standard_error(v));

  // surrogate prior term and entropy by enumeration with brute-force eta
  const auto pi = weight_vector(s);
  double prior = 0.0, entropy = 0.0;
  for (int n = 0; n < 3; ++n) {
    oracle::for_each_row(4, [&](const oracle::Row& z) {
      double q = 1.0;
      for (int i = 0; i < 4; ++i) q *= z[i] ? s.nu(n, i) : 1.0 - s.nu(n, i);
      entropy -= q * std::log(q);
      for (int k = 0; k <= 3; ++k) {
        const double g = s.gamma(n, k);
        double lp = std::log(f.pmf(k));
        for (int i = 0; i < 4; ++i) {
          const double e = std::clamp(oracle::eta(pi, i, k), 1e-12, 1.0 - 1e-12);
          lp += z[i] ? std::log(e) : std::log(1.0 - e);
        }
        prior += q * g * lp;
      }
    });
    for (int k = 0; k <= 3; ++k) entropy -= s.gamma(n, k) * std::log(s.gamma(n, k));
  }
  CHECK(std::abs(terms.log_prior_z - prior) < 1e-8);
  CHECK(std::abs(terms.entropy_z - entropy) < 1e-8);
}

TEST_CASE("ELBO of a degenerate q is the log joint") {
  Rng rng(45);
  auto s = random_state(rng, 3, 4, 2, RestrictingDistribution::point_mass(2));
  FeatureMatrix z(3, 4);
  for (int n = 0; n < 3; ++n) {
    const BinaryRow row{1, 0, 1, 0};
    z.set_row(n, row);
    for (int i = 0; i < 4; ++i) s.nu(n, i) = row[i];
  }
  s.Phi.setZero();
  s.refresh_pred();
  const auto t = elbo_terms(s);
  LinearGaussianModel m;
  m.A = s.phi;
  m.X = s.X;
  m.sigma_n2 = s.sigma_n2;
  CHECK(std::abs(t.log_lik - log_likelihood(z, m)) < 1e-10);
  const double lpa = -0.5 * s.phi.size() * kLog2Pi - 0.5 * s.phi.squaredNorm();
  CHECK(std::abs(t.log_prior_A - lpa) < 1e-10);
  CHECK(t.entropy_z == 0.0);
  CHECK(t.entropy_A == -std::numeric_limits<double>::infinity());
}

TEST_CASE("ELBO never decreases at fixed weights") {
  for (int instance = 0; instance < 20; ++instance) {
    Rng rng(100 + instance);
    const RestrictingDistribution fs[] = {RestrictingDistribution::uniform_window(2, 1),
                                          RestrictingDistribution::point_mass(2),
                                          RestrictingDistribution::table({0.2, 0.2, 0.2, 0.2, 0.2}),
                                          RestrictingDistribution::unrestricted()};
    auto s = random_state(rng, 6, 5, 3, fs[instance % 4]);
    double last = elbo(s);
    for (int sweep = 0; sweep < 15; ++sweep) {
      for (std::size_t n = 0; n < s.rows(); ++n) {
        update_gamma(s, n);
        const double e0 = elbo(s);
        CHECK(e0 >= last - 1e-8);
        last = e0;
        for (std::size_t i = 0; i < s.truncation(); ++i) {
          update_nu(s, n, i);
          const double e = elbo(s);
          CHECK(e >= last - 1e-8);
          last = e;
        }
      }
      update_A(s);
      const double e = elbo(s);
      CHECK(e >= last - 1e-8);
      last = e;
      check_invariants(s);
    }
  }
}

TEST_CASE("ELBO is invariant under relabelling features") {
  Rng rng(46);
  auto s = random_state(rng, 4, 3, 2, RestrictingDistribution::unrestricted());
  auto p = s;
  const std::vector<std::size_t> order{2, 0, 1};
  std::vector<double> w(3);
  for (int i = 0; i < 3; ++i) {
    w[i] = s.weights[order[i]];
    p.phi.row(i) = s.phi.row(order[i]);
    p.Phi.row(i) = s.Phi.row(order[i]);
    p.nu.col(i) = s.nu.col(order[i]);
  }
  p.set_weights(s.weights.with_values(w));
  p.refresh_pred();
  CHECK(std::abs(elbo(p) - elbo(s)) < 1e-10);
}

TEST_CASE("point-mass rows: expected count approaches J without data") {
  Rng rng(47);
  auto s = random_state(rng, 3, 10, 2, RestrictingDistribution::point_mass(3), 1e300);
  for (int sweep = 0; sweep < 50; ++sweep) variational_sweep(s);
  for (std::size_t n = 0; n < 3; ++n) CHECK(std::abs(s.nu.row(n).sum() - 3.0) < 0.5);
}

TEST_CASE("a start at the generating Z is a fixed point when the signal is clear") {
  Rng rng(47);
  const std::size_t n = 40, width = 4, d = 16;
  const TruncatedWeights w(std::vector<double>(width, 0.5), 2.0, 1.0, WeightsKind::WeakLimit);
  FeatureMatrix z(n, width);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < width; ++i) z.set(r, i, rng.uniform() < 0.5);
  const Eigen::MatrixXd a = gaussian_matrix(width, d, 1.0, rng);
  const Eigen::MatrixXd x = z.to_eigen() * a + gaussian_matrix(n, d, 0.1, rng);
  for (const auto& f : {RestrictingDistribution::unrestricted(), RestrictingDistribution::table({0.2, 0.2, 0.2, 0.2, 0.2})}) {
    VariationalState s(x, w, std::vector<RestrictingDistribution>(n, f), 1.0, 0.01, z);
    CHECK(s.Phi.maxCoeff() < 0.01);
    for (int sweep = 0; sweep < 10; ++sweep) variational_sweep(s);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < width; ++i) CHECK(std::abs(s.nu(r, i) - (z(r, i) ? 1.0 : 0.0)) < 1e-3);
  }
}

TEST_CASE("samples from q respect the restriction") {
  Rng rng(48);
  auto s = random_state(rng, 5, 6, 2, RestrictingDistribution::uniform_window(2, 1));
  for (int sweep = 0; sweep < 5; ++sweep) variational_sweep(s);
  for (int rep = 0; rep < 200; ++rep) {
    const auto z = sample_variational_z(s, rng);
    for (std::size_t n = 0; n < 5; ++n) CHECK(s.f[n].pmf(z.row_count(n)) > 0.0);
  }
}

TEST_CASE("hybrid fit") {
  Rng data(49);
  const std::size_t n = 20;
  const Eigen::MatrixXd x = gaussian_matrix(n, 4, 1.0, data);
  HybridConfig cfg;
  cfg.alpha = 2.0;
  cfg.truncation = 6;
  cfg.f.assign(n, RestrictingDistribution::uniform_window(2, 1));
  cfg.iterations = 60;
  cfg.resample_every = 0;
  Rng r0(3);
  const auto fixed = hybrid_fit(cfg, x, r0);
  CHECK(fixed.samples.empty());
  for (std::size_t t = 1; t < fixed.trace.size(); ++t)
    CHECK(fixed.trace[t].elbo >= fixed.trace[t - 1].elbo - 1e-8);

  cfg.resample_every = 10;
  HoldoutMask mask = HoldoutMask::Constant(n, 4, false);
  mask(3, 1) = mask(11, 2) = true;
  cfg.holdout = mask;
  Rng r1(4), r2(4);
  const auto a = hybrid_fit(cfg, x, r1);
  const auto b = hybrid_fit(cfg, x, r2);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) CHECK(a.trace[t].elbo == b.trace[t].elbo);
  CHECK(a.state.nu == b.state.nu);
  CHECK(std::isfinite(a.heldout_nll));
  CHECK(!a.samples.empty());
  for (std::size_t t = 1; t < a.trace.size(); ++t)
    if (a.trace[t].segment == a.trace[t - 1].segment)
      CHECK(a.trace[t].elbo >= a.trace[t - 1].elbo - 1e-8);

  cfg.iterations = 0;
  Rng r3(4);
  const auto none = hybrid_fit(cfg, x, r3);
  CHECK(none.trace.size() == 1);
  CHECK(none.sweeps == 0);
}
