// vdm: fit vulnerability discovery models and track their goodness of fit.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"
#include "run_config.hpp"
#include "vdm/errors.hpp"

namespace {

using vdm::cli::RunConfig;

struct Flags {
  std::optional<std::string> config, corpus, releases, series, as_of, datasets, models, beta,
      omega, out, metric, reference, alternative, model, params, noise_kind, emit,
      entropy_pool, quality_pool;
  std::optional<int> start_msr, workers, max_iter, multistart, horizon, releases_count;
  std::optional<double> tol, alpha, noise;
  std::optional<std::uint64_t> seed;
};

void add_shared(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override it");
  app->add_option("--corpus", f.corpus, "Corpus file (one JSON record per line)");
  app->add_option("--releases", f.releases, "Releases file (JSON array)");
  app->add_option("--series", f.series, "Series CSV used instead of corpus + releases");
  app->add_option("--as-of", f.as_of, "Data collection date YYYY-MM-DD");
  app->add_option("--datasets", f.datasets, "Comma-separated dataset kinds");
  app->add_option("--models", f.models, "Comma-separated model ids");
  app->add_option("--start-msr", f.start_msr, "First observation month (default 6)");
  app->add_option("--beta", f.beta, "Comma-separated entropy beta values");
  app->add_option("--omega", f.omega, "Comma-separated quality omega values");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--workers", f.workers, "Worker threads");
  app->add_option("--max-iter", f.max_iter, "Fitter iteration cap");
  app->add_option("--tol", f.tol, "Relative SSE tolerance");
  app->add_option("--multistart", f.multistart, "Multistart grid points per parameter");
}

void apply(const Flags& f, RunConfig& c) {
  using vdm::cli::parse_dataset_list;
  using vdm::cli::parse_model_list;
  using vdm::cli::parse_number_list;
  if (f.config) vdm::cli::load_config_file(c, *f.config);
  nlohmann::json overrides = nlohmann::json::object();
  auto put = [&](const char* key, const auto& opt) {
    if (opt) overrides[key] = *opt;
  };
  put("corpus", f.corpus);
  put("releases", f.releases);
  put("series", f.series);
  put("as_of", f.as_of);
  put("datasets", f.datasets);
  put("models", f.models);
  put("start_msr", f.start_msr);
  put("beta", f.beta);
  put("omega", f.omega);
  put("out", f.out);
  put("seed", f.seed);
  put("workers", f.workers);
  put("max_iter", f.max_iter);
  put("tol", f.tol);
  put("multistart", f.multistart);
  put("metric", f.metric);
  put("reference", f.reference);
  put("alternative", f.alternative);
  put("alpha", f.alpha);
  put("model", f.model);
  put("params", f.params);
  put("horizon", f.horizon);
  put("noise_kind", f.noise_kind);
  put("noise", f.noise);
  put("emit", f.emit);
  put("releases_count", f.releases_count);
  put("entropy_pool", f.entropy_pool);
  put("quality_pool", f.quality_pool);
  // Flag paths are relative to the working directory.
  vdm::cli::apply_config_json(c, overrides, {});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit vulnerability discovery models and track goodness-of-fit over time"};
  app.require_subcommand(1);
  Flags flags;

  auto* import_cmd = app.add_subcommand("import", "Validate a corpus and export monthly series");
  auto* fit_cmd = app.add_subcommand("fit", "Fit every model to every series and test the fit");
  auto* track_cmd = app.add_subcommand("track", "Rolling monthly goodness-of-fit states");
  auto* entropy_cmd = app.add_subcommand("entropy", "Goodness-of-fit entropy series");
  auto* quality_cmd = app.add_subcommand("quality", "Goodness-of-fit quality series");
  auto* compare_cmd = app.add_subcommand("compare", "Kruskal-Wallis and pairwise Mann-Whitney");
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate synthetic series or corpora");

  for (auto* cmd : {import_cmd, fit_cmd, track_cmd, entropy_cmd, quality_cmd, compare_cmd,
                    simulate_cmd}) {
    add_shared(cmd, flags);
  }
  entropy_cmd->add_option("--pool-by", flags.entropy_pool, "dataset (default) or model");
  quality_cmd->add_option("--pool-by", flags.quality_pool, "model (default) or dataset");
  compare_cmd->add_option("--metric", flags.metric, "entropy (default) or quality");
  compare_cmd->add_option("--reference", flags.reference, "Group tested against all others");
  compare_cmd->add_option("--alternative", flags.alternative, "greater, less or two_sided");
  compare_cmd->add_option("--alpha", flags.alpha, "Family-wise significance level");
  compare_cmd->add_option("--pool-by", flags.entropy_pool, "Entropy pooling if it must be computed");
  simulate_cmd->add_option("--model", flags.model, "Ground-truth model id");
  simulate_cmd->add_option("--params", flags.params, "Comma-separated parameters");
  simulate_cmd->add_option("--horizon", flags.horizon, "Months to generate");
  simulate_cmd->add_option("--noise-kind", flags.noise_kind,
                           "none, multiplicative or additive_rounded");
  simulate_cmd->add_option("--noise", flags.noise, "Noise magnitude");
  simulate_cmd->add_option("--emit", flags.emit, "series or corpus");
  simulate_cmd->add_option("--releases-count", flags.releases_count,
                           "Releases in a synthetic corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    apply(flags, config);
    config.validate();
    if (import_cmd->parsed()) vdm::cli::cmd_import(config, std::cerr);
    if (fit_cmd->parsed()) vdm::cli::cmd_fit(config, std::cerr);
    if (track_cmd->parsed()) vdm::cli::cmd_track(config, std::cerr);
    if (entropy_cmd->parsed()) vdm::cli::cmd_entropy(config, std::cerr);
    if (quality_cmd->parsed()) vdm::cli::cmd_quality(config, std::cerr);
    if (compare_cmd->parsed()) vdm::cli::cmd_compare(config, std::cerr, std::cout);
    if (simulate_cmd->parsed()) vdm::cli::cmd_simulate(config, std::cerr);
  } catch (const vdm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
