#include "ribp/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <thread>

#include "ribp/errors.hpp"
#include "ribp/measure.hpp"
#include "ribp/stats.hpp"

namespace ribp {

void BenchmarkConfig::validate() const {
  if (!(alpha > 0.0) || !(c > 0.0)) throw std::invalid_argument("benchmark: alpha and c must be positive");
  if (js.empty() || methods.empty()) throw std::invalid_argument("benchmark: need at least one J and one method");
  for (int j : js)
    if (j < 0) throw std::invalid_argument("benchmark: J must be >= 0");
  const int largest = *std::max_element(js.begin(), js.end());
  for (std::size_t t : truncations)
    if (t < static_cast<std::size_t>(largest))
      throw std::invalid_argument("benchmark: truncation " + std::to_string(t) + " is below J = " +
                                  std::to_string(largest));
  if (full_truncation < static_cast<std::size_t>(largest))
    throw std::invalid_argument("benchmark: full truncation is below the largest J");
  if (threads == 0) throw std::invalid_argument("benchmark: threads must be >= 1");
  for (auto m : methods) {
    if (conditions_on_weights(m)) {
      if (weights == WeightsKind::StickBreaking && c != 1.0)
        throw std::invalid_argument("benchmark: stick-breaking weights need c = 1; use weak-limit");
    } else if (c != 1.0) {
      throw std::invalid_argument("benchmark: " + std::string(to_string(m)) + " samples the c = 1 model only");
    }
  }
  if (weights == WeightsKind::WeakLimit) {
    std::vector<std::size_t> all = truncations;
    all.push_back(full_truncation);
    for (std::size_t t : all)
      if (!(static_cast<double>(t) > alpha))
        throw std::invalid_argument("benchmark: weak-limit truncation " + std::to_string(t) + " must exceed alpha");
  }
}

SimResult run_method(SimMethod method, WeightsKind kind, double alpha, double c, std::size_t truncation,
                     const RestrictingDistribution& f, std::size_t rows, Rng& rng,
                     const SamplerOptions& opts) {
  switch (method) {
    case SimMethod::CollapsedRejection:
      return sample_collapsed_rejection(alpha, f, rows, rng, opts);
    case SimMethod::ExactRetrospective:
      return sample_exact_retrospective(alpha, f, rows, rng, opts);
    default:
      break;
  }
  const auto weights = prior_weights(kind, alpha, c, truncation, rng);
  if (method == SimMethod::Inclusion) return sample_inclusion(weights, f, rows, rng);
  return sample_uncollapsed_rejection(weights, f, rows, rng, method == SimMethod::TiltedRejection, opts);
}

std::vector<double> sorted_frequencies(const FeatureMatrix& z) {
  std::vector<double> out;
  if (z.rows() == 0) return out;
  for (int m : z.column_counts())
    if (m > 0) out.push_back(static_cast<double>(m) / static_cast<double>(z.rows()));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

namespace {

void run_parallel(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) task(k);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

struct CurveJob {
  SimMethod method;
  int j;
  std::string label;
  std::size_t truncation;
};

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  const Rng root(config.seed);
  SamplerOptions opts;
  opts.max_proposals_per_row = config.max_proposals_per_row;

  // Rejection records (and the "full" curves) share one set of runs.
  std::vector<CurveJob> jobs;
  for (auto m : config.methods)
    for (int j : config.js) jobs.push_back({m, j, "full", config.full_truncation});
  for (auto m : config.methods) {
    if (!conditions_on_weights(m)) continue;
    for (std::size_t t : config.truncations)
      for (int j : config.js) jobs.push_back({m, j, std::to_string(t), t});
  }

  const std::size_t reps = config.replicates;
  std::vector<RejectionRecord> runs(jobs.size() * reps);
  std::vector<std::optional<std::vector<double>>> curves(jobs.size() * reps);
  run_parallel(runs.size(), config.threads, [&](std::size_t k) {
    const auto& job = jobs[k / reps];
    const std::size_t rep = k % reps;
    const auto f = RestrictingDistribution::point_mass(job.j);
    Rng rng = root.split(static_cast<std::uint64_t>(job.method) + 1)
                  .split(static_cast<std::uint64_t>(job.j))
                  .split(job.truncation)
                  .split(rep);
    RejectionRecord& rec = runs[k];
    rec.method = job.method;
    rec.j = job.j;
    rec.replicate = rep;
    try {
      const auto res = run_method(job.method, config.weights, config.alpha, config.c, job.truncation, f, config.rows, rng, opts);
      rec.proposals = res.report.proposals;
      rec.accepted = res.report.accepted;
      rec.rejections = res.report.rejections;
      rec.seconds = res.report.seconds;
      rec.cpu_seconds = res.report.cpu_seconds;
      curves[k] = sorted_frequencies(res.z);
    } catch (const NumericalError&) {
      rec.capped = true;
    }
  });

  BenchmarkResult result;
  for (std::size_t k = 0; k < jobs.size() * reps; ++k)
    if (jobs[k / reps].label == "full") result.records.push_back(runs[k]);

  for (std::size_t jb = 0; jb < jobs.size(); ++jb) {
    std::size_t width = 0, done = 0;
    for (std::size_t rep = 0; rep < reps; ++rep)
      if (const auto& c = curves[jb * reps + rep]) {
        width = std::max(width, c->size());
        ++done;
      }
    for (std::size_t rank = 0; rank < width; ++rank) {
      std::vector<double> v;
      for (std::size_t rep = 0; rep < reps; ++rep)
        if (const auto& c = curves[jb * reps + rep]) v.push_back(rank < c->size() ? (*c)[rank] : 0.0);
      result.frequencies.push_back({jobs[jb].method, jobs[jb].j, jobs[jb].label, rank, stats::mean(v),
                                    v.size() > 1 ? stats::standard_error(v) : 0.0, done});
    }
  }
  return result;
}

}  // namespace ribp
