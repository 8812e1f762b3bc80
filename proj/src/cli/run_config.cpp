#include "run_config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "vdm/errors.hpp"

namespace vdm::cli {
namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::vector<std::string> names(const std::vector<T>& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.emplace_back(to_string(i));
  return out;
}

// A JSON value may be a list or a comma-separated string.
std::string as_csv(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (!v.is_array()) throw ConfigError("expected a list");
  std::string out;
  for (const auto& item : v) {
    if (!out.empty()) out += ',';
    out += item.is_string() ? item.get<std::string>() : item.dump();
  }
  return out;
}

}  // namespace

std::string_view to_string(PoolBy p) { return p == PoolBy::Dataset ? "dataset" : "model"; }

std::vector<DatasetKind> parse_dataset_list(const std::string& csv) {
  std::vector<DatasetKind> out;
  for (const auto& name : split_list(csv)) {
    const auto k = parse_dataset_kind(name);
    if (!k) throw ConfigError("unknown dataset kind '" + name + "'");
    out.push_back(*k);
  }
  return out;
}

std::vector<ModelId> parse_model_list(const std::string& csv) {
  std::vector<ModelId> out;
  for (const auto& name : split_list(csv)) {
    const auto m = parse_model_id(name);
    if (!m) throw ConfigError("unknown model '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_list(csv)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

void RunConfig::validate() const {
  fit.validate();
  if (datasets.empty()) throw ConfigError("select at least one dataset kind");
  if (models.empty()) throw ConfigError("select at least one model");
  if (start_msr < 1) throw ConfigError("start MSR must be >= 1");
  for (double b : betas) {
    if (!(b >= 1.0)) throw ConfigError("beta values must be >= 1");
  }
  for (double w : omegas) {
    if (!(w >= 1.0)) throw ConfigError("omega values must be >= 1");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (sim_params.size() != param_count(sim_model)) {
    throw ConfigError(fmt::format("{} takes {} parameters, got {}", to_string(sim_model),
                                  param_count(sim_model), sim_params.size()));
  }
  if (emit != "series" && emit != "corpus") throw ConfigError("emit must be series or corpus");
  if (sim_releases < 1) throw ConfigError("releases must be >= 1");
}

json RunConfig::canonical() const {
  json j;
  j["as_of"] = as_of ? format_date(*as_of) : "";
  j["datasets"] = names(datasets);
  j["models"] = names(models);
  j["start_msr"] = start_msr;
  j["beta"] = betas;
  j["omega"] = omegas;
  j["max_iter"] = fit.max_iterations;
  j["tol"] = fit.relative_sse_tolerance;
  j["damping_init"] = fit.damping_init;
  j["damping_factor"] = fit.damping_factor;
  j["multistart"] = fit.multistart_grid_size;
  j["seed"] = seed;
  j["entropy_pool"] = to_string(entropy_pool);
  j["quality_pool"] = to_string(quality_pool);
  j["metric"] = compare_metric;
  j["reference"] = reference_group.value_or("");
  j["alternative"] = stats::to_string(alternative);
  j["alpha"] = alpha;
  j["model"] = to_string(sim_model);
  j["params"] = sim_params;
  j["horizon"] = horizon;
  j["noise_kind"] = to_string(noise_kind);
  j["noise"] = noise;
  j["emit"] = emit;
  j["releases_count"] = sim_releases;
  return j;
}

std::string RunConfig::hash() const { return fmt::format("{:016x}", fnv1a(canonical().dump())); }

void apply_config_json(RunConfig& c, const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  auto path = [&](const json& v) {
    std::filesystem::path p = v.get<std::string>();
    return p.is_relative() ? base_dir / p : p;
  };
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "corpus") c.corpus_path = path(v);
      else if (key == "releases") c.releases_path = path(v);
      else if (key == "series") c.series_path = path(v);
      else if (key == "out") c.out_dir = path(v);
      else if (key == "as_of") {
        const auto d = parse_date(v.get<std::string>());
        if (!d) throw ConfigError("as_of must be YYYY-MM-DD");
        c.as_of = *d;
      } else if (key == "datasets") c.datasets = parse_dataset_list(as_csv(v));
      else if (key == "models") c.models = parse_model_list(as_csv(v));
      else if (key == "start_msr") c.start_msr = v.get<int>();
      else if (key == "beta") c.betas = parse_number_list(as_csv(v));
      else if (key == "omega") c.omegas = parse_number_list(as_csv(v));
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "workers") c.workers = v.get<int>();
      else if (key == "max_iter") c.fit.max_iterations = v.get<int>();
      else if (key == "tol") c.fit.relative_sse_tolerance = v.get<double>();
      else if (key == "multistart") c.fit.multistart_grid_size = v.get<int>();
      else if (key == "damping_init") c.fit.damping_init = v.get<double>();
      else if (key == "damping_factor") c.fit.damping_factor = v.get<double>();
      else if (key == "fit") {
        // nested section: {"max_iter":..., "tol":..., "multistart":...}
        apply_config_json(c, v, base_dir);
      } else if (key == "entropy_pool" || key == "quality_pool") {
        const auto s = v.get<std::string>();
        if (s != "dataset" && s != "model") throw ConfigError(key + " must be dataset or model");
        (key == "entropy_pool" ? c.entropy_pool : c.quality_pool) =
            s == "dataset" ? PoolBy::Dataset : PoolBy::Model;
      } else if (key == "metric") c.compare_metric = v.get<std::string>();
      else if (key == "reference") c.reference_group = v.get<std::string>();
      else if (key == "alternative") {
        const auto s = v.get<std::string>();
        if (s == "greater") c.alternative = stats::Alternative::Greater;
        else if (s == "less") c.alternative = stats::Alternative::Less;
        else if (s == "two_sided") c.alternative = stats::Alternative::TwoSided;
        else throw ConfigError("alternative must be greater, less or two_sided");
      } else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "model") {
        const auto m = parse_model_id(v.get<std::string>());
        if (!m) throw ConfigError("unknown model");
        c.sim_model = *m;
      } else if (key == "params") c.sim_params = parse_number_list(as_csv(v));
      else if (key == "horizon") c.horizon = v.get<int>();
      else if (key == "noise_kind") {
        const auto k = parse_noise_kind(v.get<std::string>());
        if (!k) throw ConfigError("noise_kind must be none, multiplicative or additive_rounded");
        c.noise_kind = *k;
      } else if (key == "noise") c.noise = v.get<double>();
      else if (key == "emit") c.emit = v.get<std::string>();
      else if (key == "releases_count") c.sim_releases = v.get<int>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  apply_config_json(config, doc, path.parent_path());
}

}  // namespace vdm::cli
