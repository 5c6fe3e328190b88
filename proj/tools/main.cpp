#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ribp/commands.hpp"
#include "ribp/errors.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNumerical = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace ribp;

  CLI::App app{"Restricted Indian buffet process: simulation, benchmarks and inference"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file written by a previous run (flags win)");
  app.fallthrough();

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a binary matrix from the prior");
  simulate->add_option("--method", sim.method,
                       "collapsed-rejection, uncollapsed-rejection, tilted-rejection, inclusion or exact-retrospective")
      ->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Mass parameter")->capture_default_str();
  simulate->add_option("--c", sim.c, "Concentration parameter")->capture_default_str();
  simulate->add_option("--truncation", sim.truncation, "Atoms for weight-conditioned methods")->capture_default_str();
  simulate->add_option("--f", sim.f, "Restricting distribution, e.g. delta:5, uniform:5:1, poisson:3")
      ->capture_default_str();
  simulate->add_option("--per-row-f", sim.per_row_f, "File of per-row restricting distributions (inclusion only)");
  simulate->add_option("--rows", sim.rows, "Number of rows N")->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--initial-truncation", sim.initial_truncation, "Starting atoms for exact-retrospective")
      ->capture_default_str();
  simulate->add_option("--max-proposals", sim.max_proposals, "Proposal cap per row")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->required();

  BenchmarkCommandConfig bench;
  std::vector<std::string> bench_methods;
  std::string bench_weights = "stick-breaking";
  auto* benchmark = app.add_subcommand("benchmark", "Rejection counts and frequency curves for the prior samplers");
  benchmark->add_option("--alpha", bench.bench.alpha)->capture_default_str();
  benchmark->add_option("--c", bench.bench.c)->capture_default_str();
  benchmark->add_option("--js", bench.bench.js, "Row sums J (f = delta:J)")->capture_default_str();
  benchmark->add_option("--replicates", bench.bench.replicates)->capture_default_str();
  benchmark->add_option("--rows", bench.bench.rows)->capture_default_str();
  benchmark->add_option("--truncations", bench.bench.truncations, "Truncation levels for the curves")
      ->capture_default_str();
  benchmark->add_option("--full-truncation", bench.bench.full_truncation,
                        "Truncation behind the rejection counts and the \"full\" curves")
      ->capture_default_str();
  benchmark->add_option("--methods", bench_methods, "Subset of methods (default: all five)");
  benchmark->add_option("--weights", bench_weights, "stick-breaking or weak-limit")->capture_default_str();
  benchmark->add_option("--seed", bench.bench.seed)->capture_default_str();
  benchmark->add_option("--threads", bench.bench.threads)->capture_default_str();
  benchmark->add_option("--max-proposals", bench.bench.max_proposals_per_row)->capture_default_str();
  benchmark->add_option("--out", bench.out)->required();

  FitConfig fit;
  auto* fitcmd = app.add_subcommand("fit", "Posterior inference for the linear-Gaussian latent feature model");
  fitcmd->add_option("--method", fit.method, "gibbs-ribp, gibbs-ibp, hybrid-vi-ribp or hybrid-vi-ibp")
      ->capture_default_str();
  fitcmd->add_option("--data", fit.data, "CSV with one observation per row")->required();
  fitcmd->add_option("--alpha", fit.alpha)->capture_default_str();
  fitcmd->add_option("--c", fit.c)->capture_default_str();
  fitcmd->add_option("--truncation", fit.truncation)->capture_default_str();
  fitcmd->add_option("--f", fit.f, "Restricting distribution shared by all rows");
  fitcmd->add_option("--per-row-f", fit.per_row_f, "Per-row restricting distributions (f_spec.json or one per line)");
  fitcmd->add_option("--sigma-a2", fit.sigma_a2, "Prior variance of A")->capture_default_str();
  fitcmd->add_option("--sigma-n2", fit.sigma_n2, "Noise variance")->capture_default_str();
  fitcmd->add_option("--iterations", fit.iterations, "Gibbs iterations or cap on VI sweeps")->capture_default_str();
  fitcmd->add_option("--thin", fit.thin)->capture_default_str();
  fitcmd->add_option("--burn-in", fit.burn_in, "Negative: half the iterations")->capture_default_str();
  fitcmd->add_option("--holdout", fit.holdout, "Fraction of entries held out at random")->capture_default_str();
  fitcmd->add_option("--mask", fit.mask, "Held-out entries as row,col pairs");
  fitcmd->add_option("--resample-every", fit.resample_every, "VI sweeps between weight updates (0: fixed)")
      ->capture_default_str();
  fitcmd->add_option("--tolerance", fit.tolerance, "Relative ELBO tolerance")->capture_default_str();
  fitcmd->add_option("--seed", fit.seed)->capture_default_str();
  fitcmd->add_option("--out", fit.out)->required();

  SynthCommandConfig syn;
  std::string scenario = "fifteen-feature";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--scenario", scenario, "fifteen-feature or one-inflated-poisson")->capture_default_str();
  synth->add_option("--n", syn.spec.n, "Rows")->capture_default_str();
  synth->add_option("--d", syn.spec.d, "Dimensions")->capture_default_str();
  synth->add_option("--sigma-n2", syn.spec.sigma_n2)->capture_default_str();
  synth->add_option("--sigma-a2", syn.spec.sigma_A2)->capture_default_str();
  synth->add_option("--lambda", syn.spec.lambda, "Slab mean (one-inflated-poisson)")->capture_default_str();
  synth->add_flag("--partially-exchangeable", syn.spec.partially_exchangeable, "Per-group f (one-inflated-poisson)");
  synth->add_option("--seed", syn.spec.seed)->capture_default_str();
  synth->add_option("--out", syn.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (simulate->parsed()) {
      cmd_simulate(sim);
    } else if (benchmark->parsed()) {
      if (!bench_methods.empty()) {
        bench.bench.methods.clear();
        for (const auto& m : bench_methods) bench.bench.methods.push_back(parse_sim_method(m));
      }
      bench.bench.weights = parse_weights_kind(bench_weights);
      cmd_benchmark(bench);
    } else if (fitcmd->parsed()) {
      cmd_fit(fit);
    } else if (synth->parsed()) {
      syn.spec.scenario = parse_scenario(scenario);
      cmd_synth(syn);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
