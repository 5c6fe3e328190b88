#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ribp/benchmark.hpp"
#include "ribp/linear_gaussian.hpp"
#include "ribp/synth.hpp"

namespace ribp {

// One struct per subcommand. Field names mirror the CLI flags, and to_ini()
// writes a config file that `ribp <command> --config <file> --out <dir>` reads
// back. The output directory is not part of it.

struct SimulateConfig {
  std::string method = "inclusion";
  double alpha = 5.0;
  double c = 1.0;
  std::size_t truncation = 50;
  std::string f = "delta:5";
  std::string per_row_f;  // file; inclusion only
  std::size_t rows = 100;
  std::uint64_t seed = 1;
  std::size_t initial_truncation = 1;
  std::uint64_t max_proposals = 1'000'000;
  std::filesystem::path out;

  std::string to_ini() const;
};

struct BenchmarkCommandConfig {
  BenchmarkConfig bench;
  std::filesystem::path out;

  std::string to_ini() const;
};

struct FitConfig {
  std::string method = "gibbs-ribp";
  std::filesystem::path data;
  double alpha = 1.0;
  double c = 1.0;
  std::size_t truncation = 20;
  std::string f;  // defaults to unrestricted for the IBP methods
  std::string per_row_f;
  double sigma_a2 = 1.0;
  double sigma_n2 = 1.0;
  std::size_t iterations = 300;
  std::size_t thin = 10;
  long long burn_in = -1;  // < 0: half the iterations
  double holdout = 0.0;    // fraction of entries held out
  std::string mask;        // explicit mask file instead of a random one
  std::size_t resample_every = 25;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
  std::filesystem::path out;

  std::string to_ini() const;
};

struct SynthCommandConfig {
  SynthSpec spec;
  std::filesystem::path out;

  std::string to_ini() const;
};

enum class FitMethod { GibbsRibp, GibbsIbp, HybridViRibp, HybridViIbp };
FitMethod parse_fit_method(std::string_view name);
std::string_view to_string(FitMethod m);

/// Held-out mask with round(fraction * N * D) entries chosen uniformly
/// without replacement.
HoldoutMask random_mask(Eigen::Index rows, Eigen::Index cols, double fraction, Rng& rng);

/// Per-row f for a fit or simulation: the --per-row-f file if given,
/// otherwise --f repeated, otherwise unrestricted when `allow_default`.
std::vector<RestrictingDistribution> resolve_f(const std::string& f, const std::string& per_row_f,
                                               std::size_t rows, bool allow_default);

// Each writes its bundle (config.ini plus outputs) into `out`.
void cmd_simulate(const SimulateConfig& config);
void cmd_benchmark(const BenchmarkCommandConfig& config);
void cmd_fit(const FitConfig& config);
void cmd_synth(const SynthCommandConfig& config);

}  // namespace ribp
