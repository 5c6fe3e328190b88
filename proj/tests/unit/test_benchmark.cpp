#include <algorithm>

#include "doctest.h"
#include "ribp/benchmark.hpp"

using namespace ribp;

namespace {

BenchmarkConfig small() {
  BenchmarkConfig c;
  c.js = {2, 5};
  c.replicates = 3;
  c.rows = 20;
  c.truncations = {10};
  c.full_truncation = 30;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("benchmark record layout") {
  const auto cfg = small();
  const auto res = run_benchmark(cfg);
  REQUIRE(res.records.size() == 5 * 2 * 3);
  std::size_t k = 0;
  for (auto m : cfg.methods)
    for (int j : cfg.js)
      for (std::size_t rep = 0; rep < 3; ++rep, ++k) {
        const auto& r = res.records[k];
        CHECK(r.method == m);
        CHECK(r.j == j);
        CHECK(r.replicate == rep);
        CHECK(!r.capped);
        CHECK(r.accepted == 20);
        CHECK(r.proposals == r.accepted + r.rejections);
        if (m == SimMethod::Inclusion) CHECK(r.rejections == 0);
      }

  // "full" curves for every method, numbered levels only for weight methods
  for (const auto& p : res.frequencies) {
    if (p.truncation != "full") CHECK(conditions_on_weights(p.method));
    CHECK(p.replicates == 3);
  }
  for (auto m : cfg.methods)
    for (int j : cfg.js) {
      std::vector<double> curve;
      double total = 0.0;
      for (const auto& p : res.frequencies)
        if (p.method == m && p.j == j && p.truncation == "full") {
          CHECK(p.rank == curve.size());
          curve.push_back(p.mean);
          total += p.mean;
        }
      CHECK(std::is_sorted(curve.rbegin(), curve.rend()));
      // frequencies sum to J per row
      CHECK(total == doctest::Approx(j));
    }
}

TEST_CASE("benchmark is independent of the thread count") {
  auto cfg = small();
  const auto one = run_benchmark(cfg);
  cfg.threads = 3;
  const auto three = run_benchmark(cfg);
  REQUIRE(one.records.size() == three.records.size());
  for (std::size_t k = 0; k < one.records.size(); ++k) CHECK(one.records[k].rejections == three.records[k].rejections);
  REQUIRE(one.frequencies.size() == three.frequencies.size());
  for (std::size_t k = 0; k < one.frequencies.size(); ++k) CHECK(one.frequencies[k].mean == three.frequencies[k].mean);
}

TEST_CASE("benchmark proposal cap is recorded, not fatal") {
  auto cfg = small();
  cfg.methods = {SimMethod::UncollapsedRejection, SimMethod::Inclusion};
  cfg.js = {8};
  cfg.max_proposals_per_row = 1;
  const auto res = run_benchmark(cfg);
  bool any = false;
  for (const auto& r : res.records) {
    if (r.method == SimMethod::Inclusion) CHECK(!r.capped);
    any = any || r.capped;
  }
  CHECK(any);
}

TEST_CASE("benchmark validation") {
  auto cfg = small();
  cfg.truncations = {4};
  CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
  cfg = small();
  cfg.c = 2.0;
  CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
  cfg.methods = {SimMethod::Inclusion};
  CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
  cfg.weights = WeightsKind::WeakLimit;
  CHECK_NOTHROW(run_benchmark(cfg));
  cfg.truncations = {5};
  cfg.js = {2};
  CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
  CHECK(parse_weights_kind("weak-limit") == WeightsKind::WeakLimit);
  CHECK_THROWS_AS(parse_weights_kind("stick"), std::invalid_argument);
}
