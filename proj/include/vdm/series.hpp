#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vdm {

/// The five vulnerability dataset definitions.
enum class DatasetKind { NVD, NVD_Bug, NVD_Advice, NVD_Nbug, Advice_Nbug };

inline constexpr std::array<DatasetKind, 5> kAllDatasetKinds = {
    DatasetKind::NVD, DatasetKind::NVD_Bug, DatasetKind::NVD_Advice,
    DatasetKind::NVD_Nbug, DatasetKind::Advice_Nbug};

/// Serialized as "NVD", "NVD.Bug", "NVD.Advice", "NVD.Nbug", "Advice.Nbug".
std::string_view to_string(DatasetKind kind);
std::optional<DatasetKind> parse_dataset_kind(std::string_view text);

/// A (time, value) sample used by the fitter and the goodness-of-fit test.
struct Observation {
  double t = 0.0;
  double value = 0.0;
};

using CurveData = std::vector<Observation>;

struct SeriesPoint {
  int msr = 0;
  std::int64_t cumulative = 0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Cumulative vulnerability counts per month since release for one
/// (release, dataset) pair. msr runs 1, 2, 3, ... and counts never decrease.
struct ObservationSeries {
  std::string product;
  std::string version;
  DatasetKind dataset = DatasetKind::NVD;
  std::vector<SeriesPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::int64_t max_count() const {
    return points.empty() ? 0 : points.back().cumulative;
  }

  /// Points with msr <= last_msr.
  ObservationSeries prefix(int last_msr) const;

  CurveData to_curve() const;

  friend bool operator==(const ObservationSeries&,
                         const ObservationSeries&) = default;
};

/// Throws vdm::Error describing the first violated series invariant.
void validate(const ObservationSeries& series);

}  // namespace vdm
