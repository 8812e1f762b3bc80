#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "vdm/datasets.hpp"
#include "vdm/errors.hpp"
#include "vdm/gof.hpp"
#include "vdm/metrics.hpp"
#include "vdm/series_io.hpp"
#include "vdm/simulate.hpp"
#include "vdm/stats.hpp"

namespace vdm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kStatesFile = "states.csv";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.12g}", v);
}

std::string join(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += num(values[i]);
  }
  return out;
}

json meta(const RunConfig& c) {
  return {{"config_hash", c.hash()},
          {"dof_convention", std::string(kDofConvention)},
          {"beta", c.betas},
          {"omega", c.omegas},
          {"start_msr", c.start_msr}};
}

void write_meta_lines(std::ostream& out, const RunConfig& c) {
  out << "# config_hash=" << c.hash() << '\n'
      << "# dof_convention=" << kDofConvention << '\n'
      << "# beta=" << join(c.betas, ';') << '\n'
      << "# omega=" << join(c.omegas, ';') << '\n'
      << "# start_msr=" << c.start_msr << '\n';
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  std::ofstream out(c.out_dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (c.out_dir / name).string());
  return out;
}

void write_json(const RunConfig& c, const std::string& name, const json& doc) {
  auto out = open_out(c, name);
  out << doc.dump(2) << '\n';
}

// Runs job(i) for i in [0, n) on up to `workers` threads. Results must be
// stored by index so output does not depend on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string curve_key(const ObservationSeries& s) {
  return s.product + " " + s.version + " " + std::string(to_string(s.dataset));
}

struct FitRow {
  const ObservationSeries* series = nullptr;
  ModelId model{};
  FitResult result;
  bool converged = false;
  double sse = 0.0;
  std::string error;
};

json fit_result_json(const FitRow& row) {
  return {{"product", row.series->product},
          {"version", row.series->version},
          {"dataset", std::string(to_string(row.series->dataset))},
          {"model", std::string(to_string(row.model))},
          {"params", row.result.params.values},
          {"chi2", row.result.chi_square},
          {"dof", row.result.dof},
          {"p_value", row.result.p_value},
          {"classification", std::string(to_string(row.result.classification))},
          {"valid", row.result.valid},
          {"converged", row.converged},
          {"sse", row.sse},
          {"error", row.error}};
}

// ---- state file ---------------------------------------------------------

struct StateRow {
  std::string product, version, dataset, model;
  int msr = 0;
  GofState state = GofState::NotFit;
};

std::vector<StateRow> read_states(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<StateRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() < 6) throw ParseError(line_no, "states row needs at least 6 fields");
    const auto state = parse_gof_state(f[5]);
    if (!state) throw ParseError(line_no, "unknown state '" + f[5] + "'");
    StateRow r{f[0], f[1], f[2], f[3], 0, *state};
    try {
      r.msr = std::stoi(f[4]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad msr '" + f[4] + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Groups state rows into one matrix per pooling key.
std::map<std::string, StateMatrix> pool_states(const std::vector<StateRow>& rows, PoolBy pool,
                                               int first_msr) {
  std::map<std::string, std::map<std::string, std::vector<std::optional<GofState>>>> grouped;
  for (const auto& r : rows) {
    if (r.msr < first_msr) continue;
    const std::string group = pool == PoolBy::Dataset ? r.dataset : r.model;
    auto& row =
        grouped[group][r.product + "|" + r.version + "|" + r.dataset + "|" + r.model];
    const auto col = static_cast<std::size_t>(r.msr - first_msr);
    if (row.size() <= col) row.resize(col + 1);
    row[col] = r.state;
  }
  std::map<std::string, StateMatrix> out;
  for (auto& [group, curves] : grouped) {
    StateMatrix m;
    m.first_msr = first_msr;
    for (auto& [key, row] : curves) m.rows.push_back(std::move(row));
    out.emplace(group, std::move(m));
  }
  return out;
}

void ensure_states(const RunConfig& c, std::ostream& log) {
  if (!fs::exists(c.out_dir / kStatesFile)) {
    log << "no " << kStatesFile << " in " << c.out_dir.string() << "; running track first\n";
    cmd_track(c, log);
  }
}

std::string metric_file(const std::string& metric, double weight) {
  return fmt::format("{}_{}-{}.csv", metric, metric == "entropy" ? "beta" : "omega",
                     num(weight));
}

json series_summary(const std::string& group, double weight, const char* weight_name,
                    const MetricSeries& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"group", group},
          {weight_name, weight},
          {"points", s.points.size()},
          {"grand_median", s.points.empty() ? json(nullptr) : json(s.grand_median)},
          {"first_half_median", opt(s.first_half_median)},
          {"second_half_median", opt(s.second_half_median)}};
}

void run_metric(const RunConfig& c, std::ostream& log, bool entropy) {
  ensure_states(c, log);
  const auto rows = read_states(c.out_dir / kStatesFile);
  const auto pools = pool_states(rows, entropy ? c.entropy_pool : c.quality_pool, c.start_msr);
  const std::string metric = entropy ? "entropy" : "quality";
  const char* weight_name = entropy ? "beta" : "omega";

  json summary = {{"meta", meta(c)},
                  {"metric", metric},
                  {"pool_by", std::string(to_string(entropy ? c.entropy_pool : c.quality_pool))},
                  {"results", json::array()}};
  for (double w : entropy ? c.betas : c.omegas) {
    auto out = open_out(c, metric_file(metric, w));
    write_meta_lines(out, c);
    out << "# " << weight_name << '=' << num(w) << '\n';
    out << "group,msr,value\n";
    for (const auto& [group, matrix] : pools) {
      const auto series = entropy ? aggregate_entropy(matrix, w) : aggregate_quality(matrix, w);
      for (const auto& p : series.points) {
        out << csv_field(group) << ',' << p.msr << ',' << num(p.value) << '\n';
      }
      summary["results"].push_back(series_summary(group, w, weight_name, series));
    }
  }
  write_json(c, metric + "_summary.json", summary);
  log << metric << ": " << pools.size() << " groups\n";
}

std::map<std::string, std::vector<double>> read_metric_groups(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::map<std::string, std::vector<double>> groups;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw ParseError(line_no, "expected group,msr,value");
    try {
      groups[f[0]].push_back(std::stod(f[2]));
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad value '" + f[2] + "'");
    }
  }
  return groups;
}

json test_json(const stats::TestResult& r) {
  return {{"statistic", r.statistic},
          {"p_value", r.p_value},
          {"method", r.method},
          {"warnings", r.warnings}};
}

}  // namespace

std::vector<ObservationSeries> load_series(const RunConfig& c, std::ostream& log) {
  const std::set<DatasetKind> wanted(c.datasets.begin(), c.datasets.end());
  std::vector<ObservationSeries> out;
  if (!c.series_path.empty()) {
    std::ifstream in(c.series_path);
    if (!in) throw Error("cannot open series file " + c.series_path.string());
    for (auto& s : read_series_csv(in)) {
      if (wanted.count(s.dataset)) out.push_back(std::move(s));
    }
    return out;
  }
  if (c.corpus_path.empty() || c.releases_path.empty()) {
    throw ConfigError("need --series, or both --corpus and --releases");
  }
  const Corpus corpus = import_corpus(c.corpus_path.string());
  for (const auto& w : corpus.warnings()) log << "warning: " << w << '\n';
  const auto releases = load_releases(c.releases_path.string());
  Date as_of{};
  if (c.as_of) {
    as_of = *c.as_of;
  } else {
    const auto latest = latest_publication(corpus);
    if (!latest) throw Error("corpus is empty and no --as-of given");
    as_of = Date{latest->year() / latest->month() / std::chrono::last};
  }
  const DatasetSelector selector(corpus);
  for (const auto& release : releases) {
    for (auto kind : c.datasets) {
      try {
        const auto vulns = selector.select(kind, release);
        out.push_back(build_series(vulns, release, kind, as_of));
      } catch (const EmptyWindow& e) {
        log << "warning: " << release.product << ' ' << release.version << ' '
            << to_string(kind) << ": " << e.what() << '\n';
      }
    }
  }
  return out;
}

void cmd_import(const RunConfig& c, std::ostream& log) {
  const auto series = load_series(c, log);
  auto out = open_out(c, "series.csv");
  write_meta_lines(out, c);
  write_series_csv(out, series);

  json summary = {{"meta", meta(c)}, {"series", json::array()}};
  if (!c.corpus_path.empty()) {
    const Corpus corpus = import_corpus(c.corpus_path.string());
    std::map<std::string, int> kinds;
    for (const auto& r : corpus.records()) ++kinds[std::string(to_string(r.kind))];
    summary["records"] = corpus.size();
    summary["records_by_kind"] = kinds;
    summary["link_edges"] = link_bugs_to_nvd(corpus).size();
    summary["warnings"] = corpus.warnings();
  }
  for (const auto& s : series) {
    summary["series"].push_back({{"product", s.product},
                                 {"version", s.version},
                                 {"dataset", std::string(to_string(s.dataset))},
                                 {"months", s.size()},
                                 {"total", s.max_count()}});
  }
  write_json(c, "import_summary.json", summary);
  log << "import: " << series.size() << " series\n";
}

void cmd_fit(const RunConfig& c, std::ostream& log) {
  c.validate();
  const auto series = load_series(c, log);
  std::vector<FitRow> rows;
  for (const auto& s : series) {
    for (auto m : c.models) rows.push_back({&s, m, {}, false, 0.0, {}});
  }
  parallel_for(rows.size(), c.workers, [&](std::size_t i) {
    auto& row = rows[i];
    row.result.model = row.model;
    row.result.params = ParamVector(row.model, std::vector<double>(param_count(row.model), 0.0));
    try {
      const auto outcome = fit(*row.series, row.model, c.fit);
      row.converged = outcome.converged;
      row.sse = outcome.sse;
      row.result = test_fit(*row.series, outcome);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  auto csv = open_out(c, "fits.csv");
  write_meta_lines(csv, c);
  csv << "product,version,dataset,model,params,chi2,dof,p_value,classification,valid,"
         "converged,sse,error\n";
  json fits = {{"meta", meta(c)}, {"fits", json::array()}};
  std::map<ModelId, StateCounts> by_model;
  std::map<std::pair<DatasetKind, ModelId>, StateCounts> by_dataset_model;
  for (const auto& row : rows) {
    const auto& r = row.result;
    csv << csv_field(row.series->product) << ',' << csv_field(row.series->version) << ','
        << to_string(row.series->dataset) << ',' << to_string(row.model) << ','
        << join(r.params.values, ';') << ',' << num(r.chi_square) << ',' << r.dof << ','
        << num(r.p_value) << ',' << to_string(r.classification) << ','
        << (r.valid ? "true" : "false") << ',' << (row.converged ? "true" : "false") << ','
        << num(row.sse) << ',' << csv_field(row.error) << '\n';
    fits["fits"].push_back(fit_result_json(row));
    const GofState state = row.error.empty() ? state_of(r) : GofState::NotFit;
    by_model[row.model].add(state);
    by_dataset_model[{row.series->dataset, row.model}].add(state);
    if (!row.error.empty()) {
      log << "warning: " << curve_key(*row.series) << ' ' << to_string(row.model) << ": "
          << row.error << '\n';
    }
  }
  write_json(c, "fits.json", fits);

  auto table = open_out(c, "fit_summary.csv");
  write_meta_lines(table, c);
  table << "model,GoodFit,Inconclusive,NotFit,total\n";
  json summary = {{"meta", meta(c)}, {"by_model", json::array()}, {"by_dataset", json::array()}};
  for (auto m : c.models) {
    const auto& k = by_model[m];
    table << to_string(m) << ',' << k.fit << ',' << k.inconclusive << ',' << k.not_fit << ','
          << k.total() << '\n';
    summary["by_model"].push_back({{"model", std::string(to_string(m))},
                                   {"GoodFit", k.fit},
                                   {"Inconclusive", k.inconclusive},
                                   {"NotFit", k.not_fit}});
  }
  for (const auto& [key, k] : by_dataset_model) {
    summary["by_dataset"].push_back({{"dataset", std::string(to_string(key.first))},
                                     {"model", std::string(to_string(key.second))},
                                     {"GoodFit", k.fit},
                                     {"Inconclusive", k.inconclusive},
                                     {"NotFit", k.not_fit}});
  }
  write_json(c, "fit_summary.json", summary);
  log << "fit: " << rows.size() << " fits\n";
}

void cmd_track(const RunConfig& c, std::ostream& log) {
  c.validate();
  const auto series = load_series(c, log);
  struct Job {
    const ObservationSeries* series;
    ModelId model;
    std::vector<RollingEntry> entries;
  };
  std::vector<Job> jobs;
  for (const auto& s : series) {
    for (auto m : c.models) jobs.push_back({&s, m, {}});
  }
  parallel_for(jobs.size(), c.workers, [&](std::size_t i) {
    jobs[i].entries = rolling_gof(*jobs[i].series, jobs[i].model, c.start_msr, c.fit);
  });

  auto out = open_out(c, kStatesFile);
  write_meta_lines(out, c);
  out << "product,version,dataset,model,msr,state,p_value,valid,error\n";
  std::size_t cells = 0;
  for (const auto& job : jobs) {
    for (const auto& e : job.entries) {
      out << csv_field(job.series->product) << ',' << csv_field(job.series->version) << ','
          << to_string(job.series->dataset) << ',' << to_string(job.model) << ',' << e.msr
          << ',' << to_string(e.state()) << ',' << num(e.result.p_value) << ','
          << (e.result.valid ? "true" : "false") << ',' << csv_field(e.error.value_or("")) << '\n';
      ++cells;
    }
  }
  log << "track: " << jobs.size() << " curves, " << cells << " monthly fits\n";
}

void cmd_entropy(const RunConfig& c, std::ostream& log) {
  c.validate();
  run_metric(c, log, true);
}

void cmd_quality(const RunConfig& c, std::ostream& log) {
  c.validate();
  run_metric(c, log, false);
}

void cmd_compare(const RunConfig& c, std::ostream& log, std::ostream& report) {
  c.validate();
  if (c.compare_metric != "entropy" && c.compare_metric != "quality") {
    throw ConfigError("compare metric must be entropy or quality");
  }
  const bool entropy = c.compare_metric == "entropy";
  const double weight = entropy ? c.betas.front() : c.omegas.front();
  const auto path = c.out_dir / metric_file(c.compare_metric, weight);
  if (!fs::exists(path)) run_metric(c, log, entropy);
  const auto groups = read_metric_groups(path);
  if (groups.size() < 2) throw Error("compare needs at least two metric groups");

  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;
  for (const auto& [name, values] : groups) {
    names.push_back(name);
    samples.push_back(values);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (c.reference_group) {
    const auto it = std::find(names.begin(), names.end(), *c.reference_group);
    if (it == names.end()) throw ConfigError("reference group '" + *c.reference_group + "' not found");
    const auto ref = static_cast<std::size_t>(it - names.begin());
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j != ref) pairs.emplace_back(ref, j);
    }
  } else {
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) pairs.emplace_back(i, j);
    }
  }
  const double corrected = stats::bonferroni(c.alpha, static_cast<int>(pairs.size()));
  const auto kw = stats::kruskal_wallis(samples);

  json doc = {{"meta", meta(c)},
              {"metric", c.compare_metric},
              {entropy ? "beta" : "omega", weight},
              {"groups", names},
              {"alpha", c.alpha},
              {"corrected_alpha", corrected},
              {"kruskal_wallis", test_json(kw)},
              {"pairwise", json::array()}};
  std::string text;
  text += fmt::format("metric {} ({}={}) over {} groups\n", c.compare_metric,
                      entropy ? "beta" : "omega", num(weight), names.size());
  text += fmt::format("Kruskal-Wallis H={} p={} -> {}\n", num(kw.statistic), num(kw.p_value),
                      kw.p_value < c.alpha ? "reject equal distributions" : "accept equal distributions");
  text += fmt::format("Bonferroni: alpha'={}/{}={}\n", num(c.alpha), pairs.size(), num(corrected));
  for (const auto& [i, j] : pairs) {
    const auto r = stats::mann_whitney_u(samples[i], samples[j], c.alternative);
    const bool reject = r.p_value < corrected;
    json entry = test_json(r);
    entry["a"] = names[i];
    entry["b"] = names[j];
    entry["alternative"] = stats::to_string(c.alternative);
    entry["continuity_correction"] = r.method != "exact";
    entry["reject_null"] = reject;
    doc["pairwise"].push_back(std::move(entry));
    text += fmt::format("Mann-Whitney {} vs {} ({}) U={} p={} -> {}\n", names[i], names[j],
                        stats::to_string(c.alternative), num(r.statistic), num(r.p_value),
                        reject ? "reject H0" : "accept H0");
  }
  write_json(c, "compare.json", doc);
  auto out = open_out(c, "compare.txt");
  out << "# config_hash=" << c.hash() << '\n' << text;
  report << text;
}

void cmd_simulate(const RunConfig& c, std::ostream& log) {
  c.validate();
  const ParamVector params(c.sim_model, c.sim_params);
  const NoiseSpec noise{c.noise_kind, c.noise, c.seed};
  if (c.emit == "series") {
    const auto series = generate(params, c.horizon, noise);
    auto out = open_out(c, "series.csv");
    write_meta_lines(out, c);
    write_series_csv(out, std::span(&series, 1));
    log << "simulate: " << series.size() << " months written\n";
    return;
  }
  const auto world = generate_world({params, c.horizon, noise, c.sim_releases, "synthetic"});
  {
    auto out = open_out(c, "corpus.jsonl");
    write_corpus(out, world.corpus);
  }
  {
    auto out = open_out(c, "releases.json");
    write_releases(out, world.releases);
  }
  {
    auto out = open_out(c, "truth_series.csv");
    write_meta_lines(out, c);
    write_series_csv(out, world.truth);
  }
  const Date as_of = world.as_of;
  write_json(c, "config.json",
             {{"corpus", "corpus.jsonl"},
              {"releases", "releases.json"},
              {"as_of", format_date(as_of)},
              {"seed", c.seed}});
  log << "simulate: " << world.corpus.size() << " records, " << world.releases.size()
      << " releases\n";
}

}  // namespace vdm::cli
