#pragma once

#include <vector>

#include "vdm/models.hpp"
#include "vdm/series.hpp"

namespace vdm {

struct FitOptions {
  int max_iterations = 200;
  double relative_sse_tolerance = 1e-9;
  double damping_init = 1e-3;
  double damping_factor = 10.0;
  int multistart_grid_size = 3;

  /// Throws ConfigError unless every field is positive.
  void validate() const;
};

struct FitOutcome {
  ParamVector params;
  double sse = 0.0;
  bool converged = false;
  int iterations_used = 0;
};

/// Sum of squared residuals; +inf when the model is undefined at some t.
double sum_squared_error(const CurveData& data, const ParamVector& params);

/// Multistart damped Gauss-Newton least squares. Returns the lowest-SSE
/// outcome over all starts (ties go to the lexicographically smallest
/// parameter vector). Throws InsufficientData with fewer than
/// param_count + 1 points.
FitOutcome fit(const CurveData& data, ModelId model, const FitOptions& options = {});

/// Same as above; additionally requires a valid non-decreasing series.
FitOutcome fit(const ObservationSeries& series, ModelId model,
               const FitOptions& options = {});

/// One damped Gauss-Newton run from a single start point.
FitOutcome fit_from(const CurveData& data, const ParamVector& start,
                    const FitOptions& options = {});

/// grid_size^param_count starting points derived from the data.
std::vector<ParamVector> initial_guesses(const CurveData& data, ModelId model,
                                         int grid_size);

/// Strict weak order used to pick among multistart outcomes.
bool better_outcome(const FitOutcome& a, const FitOutcome& b);

}  // namespace vdm
