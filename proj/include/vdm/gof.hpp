#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "vdm/fitter.hpp"
#include "vdm/models.hpp"
#include "vdm/series.hpp"

namespace vdm {

/// Three-way reading of a chi-square p-value:
/// NotFit [0, 0.05), Inconclusive [0.05, 0.95), GoodFit [0.95, 1].
enum class Classification { GoodFit, Inconclusive, NotFit };

std::string_view to_string(Classification c);
std::optional<Classification> parse_classification(std::string_view text);

inline constexpr double kNotFitBelow = 0.05;
inline constexpr double kGoodFitFrom = 0.95;

/// Degrees of freedom used throughout: observations minus fitted parameters.
inline constexpr std::string_view kDofConvention = "n - param_count";

struct FitResult {
  ModelId model = ModelId::LN;
  ParamVector params;
  double chi_square = 0.0;
  int dof = 1;
  double p_value = 0.0;
  Classification classification = Classification::NotFit;
  bool valid = false;
};

/// Sum of (O - E)^2 / E. Throws InvalidExpected if some E <= 0.
double chi_square_statistic(std::span<const double> observed,
                            std::span<const double> expected);

double p_value(double chi_square, int dof);

Classification classify(double p);

/// Expected values from the fitted model at every observed t, dof = n - k,
/// then statistic, p-value and classification. Expected values <= 0 give
/// valid = false and NotFit. Input order does not matter.
FitResult test_fit(CurveData data, const FitOutcome& outcome);
FitResult test_fit(const ObservationSeries& series, const FitOutcome& outcome);

}  // namespace vdm
