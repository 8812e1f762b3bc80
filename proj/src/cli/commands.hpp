#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "vdm/series.hpp"

namespace vdm::cli {

// Every command writes its files under config.out_dir, reports progress and
// warnings to `log`, and throws vdm::Error on fatal problems. Failures of
// individual (series, model) jobs are recorded in the outputs instead.

/// series.csv for every release x dataset, plus import_summary.json.
void cmd_import(const RunConfig& config, std::ostream& log);

/// fits.csv, fits.json, fit_summary.csv, fit_summary.json.
void cmd_fit(const RunConfig& config, std::ostream& log);

/// states.csv: one row per (release, dataset, model, msr).
void cmd_track(const RunConfig& config, std::ostream& log);

/// entropy_beta-<b>.csv per beta and entropy_summary.json.
void cmd_entropy(const RunConfig& config, std::ostream& log);

/// quality_omega-<w>.csv per omega and quality_summary.json.
void cmd_quality(const RunConfig& config, std::ostream& log);

/// compare.json and compare.txt; the text report is echoed to `report`.
void cmd_compare(const RunConfig& config, std::ostream& log, std::ostream& report);

/// series.csv, or corpus.jsonl + releases.json + truth_series.csv +
/// config.json when config.emit == "corpus".
void cmd_simulate(const RunConfig& config, std::ostream& log);

/// Series selected by the config: read from series_path, or built from the
/// corpus and releases files.
std::vector<ObservationSeries> load_series(const RunConfig& config, std::ostream& log);

}  // namespace vdm::cli
