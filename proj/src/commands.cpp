#include "ribp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ribp/collapsed.hpp"
#include "ribp/errors.hpp"
#include "ribp/io.hpp"
#include "ribp/mcmc.hpp"
#include "ribp/measure.hpp"
#include "ribp/random.hpp"
#include "ribp/stats.hpp"
#include "ribp/timer.hpp"
#include "ribp/variational.hpp"

namespace ribp {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Ini {
 public:
  explicit Ini(std::string_view section) { out_ << '[' << section << "]\n"; }

  Ini& put(std::string_view key, const std::string& v) {
    out_ << key << '=' << quote(v) << '\n';
    return *this;
  }
  Ini& put(std::string_view key, const char* v) { return put(key, std::string(v)); }
  Ini& put(std::string_view key, double v) {
    out_ << key << '=' << io::format_double(v) << '\n';
    return *this;
  }
  Ini& put(std::string_view key, std::uint64_t v) {
    out_ << key << '=' << v << '\n';
    return *this;
  }
  Ini& put(std::string_view key, long long v) {
    out_ << key << '=' << v << '\n';
    return *this;
  }
  Ini& put(std::string_view key, bool v) {
    out_ << key << '=' << (v ? "true" : "false") << '\n';
    return *this;
  }
  Ini& list(std::string_view key, const std::vector<std::string>& items, bool quoted) {
    out_ << key << "=[";
    for (std::size_t k = 0; k < items.size(); ++k) out_ << (k ? "," : "") << (quoted ? quote(items[k]) : items[k]);
    out_ << "]\n";
    return *this;
  }
  // optional string: omitted when empty so the default applies on reload
  Ini& maybe(std::string_view key, const std::string& v) {
    if (!v.empty()) put(key, v);
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string quote(const std::string& v) {
    if (v.find('"') != std::string::npos) throw std::invalid_argument("config values may not contain '\"'");
    return '"' + v + '"';
  }
  std::ostringstream out_;
};

template <class T>
std::vector<std::string> as_strings(const std::vector<T>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(std::to_string(x));
  return out;
}

void prepare_out(const fs::path& out) {
  if (out.empty()) throw std::invalid_argument("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create output directory " + out.string() + ": " + ec.message());
}

std::string num(double v) { return io::format_double(v); }

ordered_json nan_or(double v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); }

void write_weights(const fs::path& path, std::span<const double> w) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < w.size(); ++i) rows.push_back({std::to_string(i), num(w[i])});
  io::write_table(path, {"feature", "weight"}, rows);
}

void append_sparse(std::vector<std::vector<std::string>>& rows, std::size_t label, const FeatureMatrix& z) {
  for (std::size_t n = 0; n < z.rows(); ++n)
    for (std::size_t i = 0; i < z.cols(); ++i)
      if (z(n, i)) rows.push_back({std::to_string(label), std::to_string(n), std::to_string(i)});
}

}  // namespace

std::string SimulateConfig::to_ini() const {
  Ini ini("simulate");
  ini.put("method", method)
      .put("alpha", alpha)
      .put("c", c)
      .put("truncation", std::uint64_t{truncation})
      .put("f", f)
      .maybe("per-row-f", per_row_f)
      .put("rows", std::uint64_t{rows})
      .put("seed", seed)
      .put("initial-truncation", std::uint64_t{initial_truncation})
      .put("max-proposals", max_proposals);
  return ini.str();
}

std::string BenchmarkCommandConfig::to_ini() const {
  std::vector<std::string> methods;
  for (auto m : bench.methods) methods.emplace_back(to_string(m));
  Ini ini("benchmark");
  ini.put("alpha", bench.alpha)
      .put("c", bench.c)
      .list("js", as_strings(bench.js), false)
      .put("replicates", std::uint64_t{bench.replicates})
      .put("rows", std::uint64_t{bench.rows})
      .list("truncations", as_strings(bench.truncations), false)
      .put("full-truncation", std::uint64_t{bench.full_truncation})
      .list("methods", methods, true)
      .put("seed", bench.seed)
      .put("threads", std::uint64_t{bench.threads})
      .put("max-proposals", bench.max_proposals_per_row)
      .put("weights", std::string(to_string(bench.weights)));
  return ini.str();
}

std::string FitConfig::to_ini() const {
  Ini ini("fit");
  ini.put("method", method)
      .put("data", data.string())
      .put("alpha", alpha)
      .put("c", c)
      .put("truncation", std::uint64_t{truncation})
      .maybe("f", f)
      .maybe("per-row-f", per_row_f)
      .put("sigma-a2", sigma_a2)
      .put("sigma-n2", sigma_n2)
      .put("iterations", std::uint64_t{iterations})
      .put("thin", std::uint64_t{thin})
      .put("burn-in", burn_in)
      .put("holdout", holdout)
      .maybe("mask", mask)
      .put("resample-every", std::uint64_t{resample_every})
      .put("tolerance", tolerance)
      .put("seed", seed);
  return ini.str();
}

std::string SynthCommandConfig::to_ini() const {
  Ini ini("synth");
  ini.put("scenario", std::string(to_string(spec.scenario)))
      .put("n", std::uint64_t{spec.n})
      .put("d", std::uint64_t{spec.d})
      .put("sigma-n2", spec.sigma_n2)
      .put("sigma-a2", spec.sigma_A2)
      .put("lambda", spec.lambda)
      .put("partially-exchangeable", spec.partially_exchangeable)
      .put("seed", spec.seed);
  return ini.str();
}

FitMethod parse_fit_method(std::string_view name) {
  if (name == "gibbs-ribp") return FitMethod::GibbsRibp;
  if (name == "gibbs-ibp") return FitMethod::GibbsIbp;
  if (name == "hybrid-vi-ribp") return FitMethod::HybridViRibp;
  if (name == "hybrid-vi-ibp") return FitMethod::HybridViIbp;
  throw std::invalid_argument("unknown fit method '" + std::string(name) +
                              "' (expected gibbs-ribp, gibbs-ibp, hybrid-vi-ribp or hybrid-vi-ibp)");
}

std::string_view to_string(FitMethod m) {
  switch (m) {
    case FitMethod::GibbsRibp: return "gibbs-ribp";
    case FitMethod::GibbsIbp: return "gibbs-ibp";
    case FitMethod::HybridViRibp: return "hybrid-vi-ribp";
    case FitMethod::HybridViIbp: return "hybrid-vi-ibp";
  }
  return "?";
}

HoldoutMask random_mask(Eigen::Index rows, Eigen::Index cols, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("holdout fraction must be in [0, 1)");
  HoldoutMask mask = HoldoutMask::Constant(rows, cols, false);
  const std::size_t total = static_cast<std::size_t>(rows * cols);
  const auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // partial Fisher-Yates
  for (std::size_t k = 0; k < held; ++k) {
    const auto pick = static_cast<std::size_t>(random::uniform_int(rng, static_cast<std::int64_t>(k), static_cast<std::int64_t>(total) - 1));
    std::swap(idx[k], idx[pick]);
    mask(static_cast<Eigen::Index>(idx[k] / cols), static_cast<Eigen::Index>(idx[k] % cols)) = true;
  }
  return mask;
}

std::vector<RestrictingDistribution> resolve_f(const std::string& f, const std::string& per_row_f,
                                               std::size_t rows, bool allow_default) {
  if (!f.empty() && !per_row_f.empty()) throw std::invalid_argument("give --f or --per-row-f, not both");
  if (!per_row_f.empty()) {
    auto out = io::read_per_row_f(per_row_f);
    if (out.size() != rows)
      throw DataError("per-row f file has " + std::to_string(out.size()) + " entries for " +
                      std::to_string(rows) + " rows");
    return out;
  }
  if (f.empty() && !allow_default) throw std::invalid_argument("--f or --per-row-f is required");
  const auto one = f.empty() ? RestrictingDistribution::unrestricted() : RestrictingDistribution::parse(f);
  return std::vector<RestrictingDistribution>(rows, one);
}

void cmd_simulate(const SimulateConfig& config) {
  const SimMethod method = parse_sim_method(config.method);
  if (!(config.alpha > 0.0) || !(config.c > 0.0)) throw std::invalid_argument("alpha and c must be positive");
  if (!config.per_row_f.empty() && method != SimMethod::Inclusion)
    throw std::invalid_argument("--per-row-f is only supported by the inclusion sampler");
  if (!conditions_on_weights(method) && config.c != 1.0)
    throw std::invalid_argument(std::string(to_string(method)) + " samples the c = 1 model only");
  if (conditions_on_weights(method) && config.truncation == 0)
    throw std::invalid_argument("truncation must be >= 1");
  prepare_out(config.out);

  const SamplerOptions opts{config.max_proposals, config.initial_truncation};
  Rng root(config.seed);
  Rng weight_rng = root.split(0);
  Rng rng = root.split(1);

  SimResult result;
  std::optional<TruncatedWeights> weights;
  if (method == SimMethod::Inclusion && !config.per_row_f.empty()) {
    const auto per_row = resolve_f("", config.per_row_f, config.rows, false);
    for (const auto& f : per_row)
      if (!f.is_unrestricted()) f.require_fits(config.truncation);
    weights = stick_breaking_weights(config.alpha, config.truncation, weight_rng, config.c);
    result = sample_inclusion(*weights, per_row, rng);
  } else {
    const auto f = RestrictingDistribution::parse(config.f);
    switch (method) {
      case SimMethod::CollapsedRejection:
        result = sample_collapsed_rejection(config.alpha, f, config.rows, rng, opts);
        break;
      case SimMethod::ExactRetrospective:
        result = sample_exact_retrospective(config.alpha, f, config.rows, rng, opts);
        break;
      default:
        if (!f.is_unrestricted()) f.require_fits(config.truncation);
        weights = stick_breaking_weights(config.alpha, config.truncation, weight_rng, config.c);
        result = method == SimMethod::Inclusion
                     ? sample_inclusion(*weights, f, config.rows, rng)
                     : sample_uncollapsed_rejection(*weights, f, config.rows, rng,
                                                    method == SimMethod::TiltedRejection, opts);
    }
  }
  if (result.weights) weights = result.weights;

  io::write_text(config.out / "config.ini", config.to_ini());
  io::write_binary(config.out / "Z.csv", result.z);
  if (weights) write_weights(config.out / "weights.csv", weights->values());
  io::write_json(config.out / "report.json", io::report_json(result.report));
  io::write_json(config.out / "timing.json", io::timing_json(result.report));
}

void cmd_benchmark(const BenchmarkCommandConfig& config) {
  config.bench.validate();
  prepare_out(config.out);
  const auto result = run_benchmark(config.bench);

  const std::string wk(to_string(config.bench.weights));
  // weights column: the construction behind the weight-conditioned methods, "none" otherwise
  auto weights_label = [&](SimMethod m) { return conditions_on_weights(m) ? wk : std::string("none"); };
  std::vector<std::vector<std::string>> rej, timing, freq;
  // median rejections per method and J
  std::map<std::pair<std::string, int>, std::vector<double>> by_cell;
  for (const auto& r : result.records) {
    const std::string m(to_string(r.method));
    rej.push_back({m, weights_label(r.method), std::to_string(r.j), std::to_string(r.replicate), std::to_string(r.proposals),
                   std::to_string(r.accepted), std::to_string(r.rejections), r.capped ? "1" : "0"});
    timing.push_back({m, weights_label(r.method), std::to_string(r.j), std::to_string(r.replicate), num(r.seconds), num(r.cpu_seconds)});
    if (!r.capped) by_cell[{m, r.j}].push_back(static_cast<double>(r.rejections));
  }
  for (const auto& p : result.frequencies)
    freq.push_back({std::string(to_string(p.method)), weights_label(p.method), std::to_string(p.j), p.truncation, std::to_string(p.rank),
                    num(p.mean), num(p.se), std::to_string(p.replicates)});

  io::write_text(config.out / "config.ini", config.to_ini());
  io::write_table(config.out / "rejections.csv",
                  {"method", "weights", "J", "replicate", "proposals", "accepted", "rejections", "capped"}, rej);
  io::write_table(config.out / "timing.csv", {"method", "weights", "J", "replicate", "seconds", "cpu_seconds"}, timing);
  io::write_table(config.out / "frequencies.csv",
                  {"method", "weights", "J", "truncation", "rank", "mean", "se", "replicates"}, freq);

  ordered_json summary = ordered_json::array();
  for (auto& [key, v] : by_cell) {
    summary.push_back({{"method", key.first},
                       {"J", key.second},
                       {"completed", v.size()},
                       {"median_rejections", stats::median(v)},
                       {"mean_rejections", stats::mean(v)}});
  }
  io::write_json(config.out / "summary.json", summary);
}

void cmd_fit(const FitConfig& config) {
  const FitMethod method = parse_fit_method(config.method);
  const bool ibp = method == FitMethod::GibbsIbp || method == FitMethod::HybridViIbp;
  const bool gibbs = method == FitMethod::GibbsRibp || method == FitMethod::GibbsIbp;
  if (config.data.empty()) throw std::invalid_argument("--data is required");
  if (config.thin == 0) throw std::invalid_argument("--thin must be >= 1");
  if (!config.mask.empty() && config.holdout > 0.0)
    throw std::invalid_argument("give --holdout or --mask, not both");

  const Eigen::MatrixXd x = io::read_matrix(config.data);
  if (x.rows() == 0 || x.cols() == 0) throw DataError("data file " + config.data.string() + " has no entries");
  if (!x.allFinite()) throw DataError("data file " + config.data.string() + " has non-finite entries");
  const auto rows = static_cast<std::size_t>(x.rows());

  auto f = resolve_f(config.f, config.per_row_f, rows, ibp);
  if (ibp) {
    for (const auto& fn : f)
      if (!fn.is_unrestricted())
        throw std::invalid_argument(std::string(to_string(method)) + " needs an unrestricted f, got '" +
                                    fn.to_spec() + "'");
  }

  Rng root(config.seed);
  std::optional<HoldoutMask> mask;
  if (!config.mask.empty()) {
    mask = io::read_mask(config.mask, x.rows(), x.cols());
  } else if (config.holdout > 0.0) {
    Rng mask_rng = root.split(2);
    mask = random_mask(x.rows(), x.cols(), config.holdout, mask_rng);
  }
  prepare_out(config.out);
  Rng rng = root.split(1);

  const Timer timer;
  ordered_json summary;
  summary["method"] = std::string(to_string(method));
  summary["rows"] = rows;
  summary["dims"] = x.cols();
  summary["held_out_entries"] = mask ? static_cast<std::size_t>(mask->count()) : std::size_t{0};

  std::vector<std::vector<std::string>> trace_rows, z_rows, w_rows, a_rows;
  if (gibbs) {
    ChainConfig cc;
    cc.alpha = config.alpha;
    cc.c = config.c;
    cc.truncation = config.truncation;
    cc.f = std::move(f);
    cc.sigma_A2 = config.sigma_a2;
    cc.sigma_n2 = config.sigma_n2;
    cc.iterations = config.iterations;
    cc.thin = config.thin;
    if (config.burn_in >= 0) cc.burn_in = static_cast<std::size_t>(config.burn_in);
    cc.holdout = mask;
    const auto res = run_chain(cc, x, rng);

    for (const auto& t : res.trace)
      trace_rows.push_back({std::to_string(t.iteration), num(t.log_joint), num(t.heldout_nll),
                            std::to_string(t.rows_accepted), t.weights_accepted ? "1" : "0"});
    for (const auto& s : res.samples) {
      append_sparse(z_rows, s.iteration, s.z);
      for (std::size_t i = 0; i < s.weights.size(); ++i)
        w_rows.push_back({std::to_string(s.iteration), std::to_string(i), num(s.weights[i])});
      for (Eigen::Index i = 0; i < s.A.rows(); ++i)
        for (Eigen::Index d = 0; d < s.A.cols(); ++d)
          a_rows.push_back({std::to_string(s.iteration), std::to_string(i), std::to_string(d), num(s.A(i, d))});
    }
    io::write_table(config.out / "trace.csv",
                    {"iteration", "log_joint", "heldout_nll", "rows_accepted", "weights_accepted"}, trace_rows);
    io::write_table(config.out / "samples_A.csv", {"iteration", "feature", "dim", "value"}, a_rows);

    summary["iterations"] = config.iterations;
    summary["samples"] = res.samples.size();
    summary["heldout_nll"] = nan_or(res.heldout_nll);
    if (!res.samples.empty()) {
      const auto& last = res.samples.back();
      std::vector<int> active;
      for (int m : last.z.column_counts()) active.push_back(m);
      summary["final_row_counts"] = std::vector<int>(last.z.row_counts().begin(), last.z.row_counts().end());
      summary["final_column_counts"] = active;
    }
  } else {
    HybridConfig hc;
    hc.alpha = config.alpha;
    hc.c = config.c;
    hc.truncation = config.truncation;
    hc.f = std::move(f);
    hc.sigma_A2 = config.sigma_a2;
    hc.sigma_n2 = config.sigma_n2;
    hc.iterations = config.iterations;
    hc.resample_every = config.resample_every;
    hc.tolerance = config.tolerance;
    hc.holdout = mask;
    const auto res = hybrid_fit(hc, x, rng);

    for (const auto& t : res.trace)
      trace_rows.push_back({std::to_string(t.sweep), std::to_string(t.segment), num(t.elbo), num(t.heldout_nll),
                            t.weights_accepted ? "1" : "0"});
    for (const auto& s : res.samples) {
      append_sparse(z_rows, s.sweep, s.z);
      for (std::size_t i = 0; i < s.weights.size(); ++i)
        w_rows.push_back({std::to_string(s.sweep), std::to_string(i), num(s.weights[i])});
    }
    io::write_table(config.out / "trace.csv", {"sweep", "segment", "elbo", "heldout_nll", "weights_accepted"},
                    trace_rows);
    io::write_matrix(config.out / "nu.csv", res.state.nu, "feature");
    io::write_matrix(config.out / "phi.csv", res.state.phi, "dim");

    summary["sweeps"] = res.sweeps;
    summary["segments"] = res.samples.size();
    summary["elbo"] = elbo(res.state);
    summary["heldout_nll"] = nan_or(res.heldout_nll);
    summary["active_counts"] = active_counts(res.state);
  }
  io::write_text(config.out / "config.ini", config.to_ini());
  io::write_table(config.out / "samples_z.csv", {"iteration", "row", "col"}, z_rows);
  io::write_table(config.out / "samples_weights.csv", {"iteration", "feature", "weight"}, w_rows);
  if (mask) io::write_mask(config.out / "mask.csv", *mask);
  io::write_json(config.out / "summary.json", summary);
  io::write_json(config.out / "timing.json", {{"seconds", timer.seconds()}, {"cpu_seconds", timer.cpu_seconds()}});
}

void cmd_synth(const SynthCommandConfig& config) {
  config.spec.validate();
  prepare_out(config.out);
  Rng rng(config.spec.seed);
  const auto data = generate(config.spec, rng);

  io::write_text(config.out / "config.ini", config.to_ini());
  io::write_matrix(config.out / "X.csv", data.X, "x");
  io::write_binary(config.out / "Z_true.csv", data.z);
  io::write_matrix(config.out / "A_true.csv", data.A, "dim");
  auto fj = io::per_row_f_json(data.f);
  fj["scenario"] = std::string(to_string(config.spec.scenario));
  fj["baseline_alpha"] = baseline_alpha(config.spec);
  io::write_json(config.out / "f_spec.json", fj);
  io::write_labels(config.out / "labels.csv", data.labels);
}

}  // namespace ribp
