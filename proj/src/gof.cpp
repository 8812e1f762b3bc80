#include "vdm/gof.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vdm/errors.hpp"
#include "vdm/stats.hpp"

namespace vdm {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::GoodFit: return "GoodFit";
    case Classification::Inconclusive: return "Inconclusive";
    case Classification::NotFit: return "NotFit";
  }
  return "?";
}

std::optional<Classification> parse_classification(std::string_view text) {
  for (auto c : {Classification::GoodFit, Classification::Inconclusive,
                 Classification::NotFit}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

double chi_square_statistic(std::span<const double> observed,
                            std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw Error("chi-square needs equal-length, non-empty inputs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected[i];
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw InvalidExpected("expected value at index " + std::to_string(i) +
                            " is not positive");
    }
    const double d = observed[i] - e;
    total += d * d / e;
  }
  return total;
}

double p_value(double chi_square, int dof) {
  if (dof < 1) throw DomainError("dof must be positive");
  return stats::chi_square_survival(chi_square, static_cast<double>(dof));
}

Classification classify(double p) {
  if (p < kNotFitBelow) return Classification::NotFit;
  if (p < kGoodFitFrom) return Classification::Inconclusive;
  return Classification::GoodFit;
}

FitResult test_fit(CurveData data, const FitOutcome& outcome) {
  const ModelId model = outcome.params.model;
  const std::size_t k = param_count(model);
  if (data.size() <= k) {
    throw InsufficientData("goodness-of-fit needs more than " + std::to_string(k) +
                           " points");
  }
  std::stable_sort(data.begin(), data.end(),
                   [](const Observation& a, const Observation& b) { return a.t < b.t; });

  FitResult result;
  result.model = model;
  result.params = outcome.params;
  result.dof = static_cast<int>(data.size() - k);

  std::vector<double> observed, expected;
  observed.reserve(data.size());
  expected.reserve(data.size());
  try {
    for (const auto& obs : data) {
      observed.push_back(obs.value);
      expected.push_back(evaluate(outcome.params, obs.t));
    }
    result.chi_square = chi_square_statistic(observed, expected);
  } catch (const InvalidExpected&) {
    return result;  // valid = false, NotFit
  } catch (const DomainError&) {
    return result;
  }
  result.p_value = p_value(result.chi_square, result.dof);
  result.classification = classify(result.p_value);
  result.valid = true;
  return result;
}

FitResult test_fit(const ObservationSeries& series, const FitOutcome& outcome) {
  return test_fit(series.to_curve(), outcome);
}

}  // namespace vdm
