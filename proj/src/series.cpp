#include "vdm/series.hpp"

#include <string>

#include "vdm/errors.hpp"

namespace vdm {

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::NVD: return "NVD";
    case DatasetKind::NVD_Bug: return "NVD.Bug";
    case DatasetKind::NVD_Advice: return "NVD.Advice";
    case DatasetKind::NVD_Nbug: return "NVD.Nbug";
    case DatasetKind::Advice_Nbug: return "Advice.Nbug";
  }
  return "?";
}

std::optional<DatasetKind> parse_dataset_kind(std::string_view text) {
  for (auto k : kAllDatasetKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

ObservationSeries ObservationSeries::prefix(int last_msr) const {
  ObservationSeries out{product, version, dataset, {}};
  for (const auto& p : points) {
    if (p.msr > last_msr) break;
    out.points.push_back(p);
  }
  return out;
}

CurveData ObservationSeries::to_curve() const {
  CurveData curve;
  curve.reserve(points.size());
  for (const auto& p : points) {
    curve.push_back({static_cast<double>(p.msr), static_cast<double>(p.cumulative)});
  }
  return curve;
}

void validate(const ObservationSeries& series) {
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    if (p.msr != static_cast<int>(i) + 1) {
      throw Error("series msr must run 1,2,3,...; found " + std::to_string(p.msr) +
                  " at position " + std::to_string(i));
    }
    if (p.cumulative < 0) throw Error("negative cumulative count");
    if (i > 0 && p.cumulative < series.points[i - 1].cumulative) {
      throw Error("cumulative count decreases at msr " + std::to_string(p.msr));
    }
  }
}

}  // namespace vdm
