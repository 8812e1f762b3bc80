#include "vdm/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "vdm/errors.hpp"
#include "vdm/stats.hpp"

namespace vdm {

std::string_view to_string(GofState s) {
  switch (s) {
    case GofState::Fit: return "Fit";
    case GofState::Inconclusive: return "Inconclusive";
    case GofState::NotFit: return "NotFit";
  }
  return "?";
}

std::optional<GofState> parse_gof_state(std::string_view text) {
  for (auto s : {GofState::Fit, GofState::Inconclusive, GofState::NotFit}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

GofState state_of(const FitResult& result) {
  if (!result.valid) return GofState::NotFit;
  switch (result.classification) {
    case Classification::GoodFit: return GofState::Fit;
    case Classification::Inconclusive: return GofState::Inconclusive;
    case Classification::NotFit: return GofState::NotFit;
  }
  return GofState::NotFit;
}

std::string_view to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::Unchanged: return "unchanged";
    case TransitionKind::SmallJump: return "small_jump";
    case TransitionKind::BigJump: return "big_jump";
  }
  return "?";
}

TransitionKind classify_transition(GofState prev, GofState next) {
  if (prev == next) return TransitionKind::Unchanged;
  const bool fit_notfit = (prev == GofState::Fit && next == GofState::NotFit) ||
                          (prev == GofState::NotFit && next == GofState::Fit);
  return fit_notfit ? TransitionKind::BigJump : TransitionKind::SmallJump;
}

GofState RollingEntry::state() const {
  return error ? GofState::NotFit : state_of(result);
}

std::vector<RollingEntry> rolling_gof(const ObservationSeries& series, ModelId model,
                                      int start_msr, const FitOptions& options) {
  std::vector<RollingEntry> out;
  if (series.empty()) return out;
  const int last = series.points.back().msr;
  for (int m = std::max(start_msr, 1); m <= last; ++m) {
    RollingEntry entry;
    entry.msr = m;
    entry.result.model = model;
    try {
      const auto prefix = series.prefix(m);
      const auto outcome = fit(prefix, model, options);
      entry.result = test_fit(prefix, outcome);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

void TransitionCounts::add(TransitionKind k) {
  switch (k) {
    case TransitionKind::Unchanged: ++unchanged; break;
    case TransitionKind::SmallJump: ++small_jump; break;
    case TransitionKind::BigJump: ++big_jump; break;
  }
}

TransitionCounts count_transitions(std::span<const TransitionKind> transitions) {
  TransitionCounts c;
  for (auto k : transitions) c.add(k);
  return c;
}

double entropy_at(const TransitionCounts& c, double beta) {
  if (c.total() == 0) throw EmptyStep("entropy needs at least one transition");
  if (!(beta >= 1.0)) throw DomainError("beta must be >= 1");
  const double jumps = c.small_jump + beta * c.big_jump;
  return jumps / (c.unchanged + jumps);
}

double entropy_at(std::span<const TransitionKind> transitions, double beta) {
  return entropy_at(count_transitions(transitions), beta);
}

void StateCounts::add(GofState s) {
  switch (s) {
    case GofState::Fit: ++fit; break;
    case GofState::Inconclusive: ++inconclusive; break;
    case GofState::NotFit: ++not_fit; break;
  }
}

double quality_at(const StateCounts& c, double omega) {
  if (c.fit < 0 || c.inconclusive < 0 || c.not_fit < 0) {
    throw DomainError("state counts must be non-negative");
  }
  if (c.total() == 0) throw EmptyStep("quality needs at least one fit");
  if (!(omega >= 1.0)) throw DomainError("omega must be >= 1");
  return (c.fit + c.inconclusive / omega) / c.total();
}

int StateMatrix::columns() const {
  std::size_t n = 0;
  for (const auto& row : rows) n = std::max(n, row.size());
  return static_cast<int>(n);
}

void attach_medians(MetricSeries& series) {
  series.first_half_median.reset();
  series.second_half_median.reset();
  if (series.points.empty()) {
    series.grand_median = std::nan("");
    return;
  }
  std::vector<double> all, first, second;
  const int start = series.points.front().msr;
  const int end = series.points.back().msr;
  const int mid = static_cast<int>(std::floor((start + end) / 2.0));
  for (const auto& p : series.points) {
    all.push_back(p.value);
    (p.msr <= mid ? first : second).push_back(p.value);
  }
  series.grand_median = stats::median(all);
  if (!first.empty()) series.first_half_median = stats::median(first);
  if (!second.empty()) series.second_half_median = stats::median(second);
}

MetricSeries aggregate_entropy(const StateMatrix& states, double beta) {
  MetricSeries out;
  const int cols = states.columns();
  for (int c = 1; c < cols; ++c) {
    TransitionCounts counts;
    for (const auto& row : states.rows) {
      if (static_cast<int>(row.size()) <= c || !row[c - 1] || !row[c]) continue;
      counts.add(classify_transition(*row[c - 1], *row[c]));
    }
    if (counts.total() == 0) continue;
    out.points.push_back({states.first_msr + c, entropy_at(counts, beta)});
  }
  attach_medians(out);
  return out;
}

MetricSeries aggregate_quality(const StateMatrix& states, double omega) {
  MetricSeries out;
  const int cols = states.columns();
  for (int c = 0; c < cols; ++c) {
    StateCounts counts;
    for (const auto& row : states.rows) {
      if (static_cast<int>(row.size()) > c && row[c]) counts.add(*row[c]);
    }
    if (counts.total() == 0) continue;
    out.points.push_back({states.first_msr + c, quality_at(counts, omega)});
  }
  attach_medians(out);
  return out;
}

}  // namespace vdm
