#pragma once

// Rolling goodness-of-fit over months since release, the three-state
// transition model, goodness-of-fit entropy and quality.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdm/fitter.hpp"
#include "vdm/gof.hpp"

namespace vdm {

enum class GofState { Fit, Inconclusive, NotFit };

std::string_view to_string(GofState s);
std::optional<GofState> parse_gof_state(std::string_view text);

/// Invalid fits count as NotFit.
GofState state_of(const FitResult& result);

enum class TransitionKind { Unchanged, SmallJump, BigJump };

std::string_view to_string(TransitionKind k);

/// Unchanged when equal, BigJump between Fit and NotFit, SmallJump otherwise.
TransitionKind classify_transition(GofState prev, GofState next);

struct RollingEntry {
  int msr = 0;
  FitResult result;
  /// Set when the fit for this month failed outright.
  std::optional<std::string> error;

  GofState state() const;
};

inline constexpr int kDefaultStartMsr = 6;

/// Fits and tests the prefix msr <= m for every m from start_msr to the end
/// of the series. A failure at one month is recorded and the sweep goes on.
std::vector<RollingEntry> rolling_gof(const ObservationSeries& series, ModelId model,
                                      int start_msr = kDefaultStartMsr,
                                      const FitOptions& options = {});

struct TransitionCounts {
  int unchanged = 0;
  int small_jump = 0;
  int big_jump = 0;

  int total() const { return unchanged + small_jump + big_jump; }
  void add(TransitionKind k);
};

TransitionCounts count_transitions(std::span<const TransitionKind> transitions);

/// (s + beta b) / (u + s + beta b). Throws EmptyStep when no transitions.
double entropy_at(const TransitionCounts& counts, double beta);
double entropy_at(std::span<const TransitionKind> transitions, double beta);

struct StateCounts {
  int fit = 0;
  int inconclusive = 0;
  int not_fit = 0;

  int total() const { return fit + inconclusive + not_fit; }
  void add(GofState s);
};

/// (F + I / omega) / (F + I + NF). Throws EmptyStep when all counts are 0.
double quality_at(const StateCounts& counts, double omega);

/// Rows are curves, columns are consecutive MSR values starting at
/// first_msr. Missing cells are nullopt.
struct StateMatrix {
  int first_msr = kDefaultStartMsr;
  std::vector<std::vector<std::optional<GofState>>> rows;

  int columns() const;
};

struct MetricPoint {
  int msr = 0;
  double value = 0.0;
};

struct MetricSeries {
  std::vector<MetricPoint> points;
  double grand_median = 0.0;
  std::optional<double> first_half_median;
  std::optional<double> second_half_median;
};

/// Medians over all points, over msr in [start, mid] and over (mid, end],
/// mid = floor((start + end) / 2) with start/end the first and last msr.
void attach_medians(MetricSeries& series);

/// Entropy at each column t >= 1 from transitions t-1 -> t pooled over all
/// rows with both cells present. Columns without transitions are skipped.
MetricSeries aggregate_entropy(const StateMatrix& states, double beta);

/// Quality at each column from the pooled states present in it.
MetricSeries aggregate_quality(const StateMatrix& states, double omega);

}  // namespace vdm
