#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdm/calendar.hpp"
#include "vdm/fitter.hpp"
#include "vdm/models.hpp"
#include "vdm/series.hpp"
#include "vdm/simulate.hpp"
#include "vdm/stats.hpp"

namespace vdm::cli {

enum class PoolBy { Dataset, Model };

std::string_view to_string(PoolBy p);

struct RunConfig {
  // inputs
  std::filesystem::path corpus_path;
  std::filesystem::path releases_path;
  std::filesystem::path series_path;  // alternative to corpus + releases
  std::optional<Date> as_of;

  std::vector<DatasetKind> datasets{kAllDatasetKinds.begin(), kAllDatasetKinds.end()};
  std::vector<ModelId> models{kAllModels.begin(), kAllModels.end()};
  int start_msr = 6;
  std::vector<double> betas{1.0, 2.0};
  std::vector<double> omegas{1.0, 2.0};
  FitOptions fit;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  int workers = 1;

  PoolBy entropy_pool = PoolBy::Dataset;
  PoolBy quality_pool = PoolBy::Model;

  // compare
  std::string compare_metric = "entropy";
  std::optional<std::string> reference_group;
  stats::Alternative alternative = stats::Alternative::Greater;
  double alpha = 0.05;

  // simulate
  ModelId sim_model = ModelId::RE;
  std::vector<double> sim_params{100.0, 0.05};
  int horizon = 60;
  NoiseKind noise_kind = NoiseKind::Multiplicative;
  double noise = 0.02;
  std::string emit = "series";  // or "corpus"
  int sim_releases = 3;

  /// Throws ConfigError on an unusable combination.
  void validate() const;

  /// Non-path settings in canonical form; the config hash covers exactly this.
  nlohmann::json canonical() const;
  std::string hash() const;
};

/// Applies keys from a JSON config object. Relative paths resolve against
/// base_dir. Unknown keys raise ConfigError.
void apply_config_json(RunConfig& config, const nlohmann::json& doc,
                       const std::filesystem::path& base_dir);

void load_config_file(RunConfig& config, const std::filesystem::path& path);

std::vector<DatasetKind> parse_dataset_list(const std::string& csv);
std::vector<ModelId> parse_model_list(const std::string& csv);
std::vector<double> parse_number_list(const std::string& csv);

}  // namespace vdm::cli
