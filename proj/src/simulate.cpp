#include "vdm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "vdm/errors.hpp"

namespace vdm {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Multiplicative: return "multiplicative";
    case NoiseKind::AdditiveRounded: return "additive_rounded";
  }
  return "?";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view text) {
  for (auto k : {NoiseKind::None, NoiseKind::Multiplicative, NoiseKind::AdditiveRounded}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

CurveData sample_curve(const ParamVector& params, int horizon) {
  if (horizon < 1) throw Error("horizon must be >= 1");
  CurveData out;
  out.reserve(horizon);
  for (int m = 1; m <= horizon; ++m) {
    const auto t = static_cast<double>(m);
    out.push_back({t, evaluate(params, t)});
  }
  return out;
}

ObservationSeries generate(const ParamVector& params, int horizon, const NoiseSpec& noise) {
  if (!(noise.magnitude >= 0.0)) throw Error("noise magnitude must be >= 0");
  const auto curve = sample_curve(params, horizon);
  SplitMix64 rng(noise.seed);
  ObservationSeries series;
  series.product = "synthetic";
  series.version = std::string(to_string(params.model));
  std::int64_t running = 0;
  for (const auto& obs : curve) {
    double value = obs.value;
    if (noise.kind != NoiseKind::None) {
      const double eps = noise.magnitude * (2.0 * rng.uniform() - 1.0);
      value = noise.kind == NoiseKind::Multiplicative ? value * (1.0 + eps) : value + eps;
    }
    const auto rounded = static_cast<std::int64_t>(std::llround(std::max(value, 0.0)));
    running = std::max(running, rounded);
    series.points.push_back({static_cast<int>(obs.t), running});
  }
  return series;
}

SyntheticWorld generate_world(const SyntheticWorldSpec& spec) {
  constexpr int kReleaseSpacingMonths = 3;
  if (spec.releases < 1) throw Error("world needs at least one release");
  SplitMix64 rng(spec.noise.seed ^ 0xC0FFEE1234ULL);
  const Date base{std::chrono::year{2000}, std::chrono::January, std::chrono::day{15}};

  SyntheticWorld world;
  std::vector<SecurityRecord> records;
  for (int r = 0; r < spec.releases; ++r) {
    Release release;
    release.product = spec.product;
    release.version = fmt::format("{}.0", r + 1);
    release.release_date = add_months_clamped(base, kReleaseSpacingMonths * r);
    // All releases share the same final month.
    const int horizon = spec.horizon + kReleaseSpacingMonths * (spec.releases - 1 - r);
    NoiseSpec noise = spec.noise;
    noise.seed = spec.noise.seed + static_cast<std::uint64_t>(r);
    auto series = generate(spec.params, horizon, noise);
    series.product = release.product;
    series.version = release.version;
    series.dataset = DatasetKind::NVD;

    std::int64_t previous = 0;
    for (const auto& point : series.points) {
      const Date month = add_months_clamped(release.release_date, point.msr);
      const int month_days = static_cast<int>(
          static_cast<unsigned>(Date{month.year() / month.month() / std::chrono::last}.day()));
      const auto day_in_month = [&] {
        return Date{month.year() / month.month() /
                    std::chrono::day{static_cast<unsigned>(1 + rng.below(month_days))}};
      };
      SecurityRecord advisory;
      advisory.id = fmt::format("MFSA-{}-{:03d}", release.version, point.msr);
      advisory.kind = RecordKind::AdvisoryReport;
      advisory.published = Date{month.year() / month.month() / std::chrono::last};

      for (std::int64_t j = 0; j < point.cumulative - previous; ++j) {
        SecurityRecord nvd;
        nvd.id = fmt::format("CVE-{}-{:03d}-{:03d}", release.version, point.msr, j);
        nvd.kind = RecordKind::NvdEntry;
        nvd.published = day_in_month();
        nvd.affects = {release.version};
        std::vector<std::string> bugs;
        if (rng.uniform() < 0.8) {
          const int n_bugs = 1 + static_cast<int>(rng.below(2));
          for (int b = 0; b < n_bugs; ++b) {
            SecurityRecord bug;
            bug.id = fmt::format("BUG-{}-{:03d}-{:03d}-{}", release.version, point.msr, j, b);
            bug.kind = RecordKind::BugReport;
            bug.published = nvd.published;
            nvd.refs.insert(bug.id);
            bugs.push_back(bug.id);
            records.push_back(std::move(bug));
          }
        }
        if (rng.uniform() < 0.7) {
          advisory.refs.insert(nvd.id);
          advisory.refs.insert(bugs.begin(), bugs.end());
          if (rng.uniform() < 0.85) nvd.refs.insert(advisory.id);
          if (rng.uniform() < 0.3) {
            // Only the advisory names this bug.
            SecurityRecord bug;
            bug.id = fmt::format("BUG-{}-{:03d}-{:03d}-adv", release.version, point.msr, j);
            bug.kind = RecordKind::BugReport;
            bug.published = nvd.published;
            advisory.refs.insert(bug.id);
            records.push_back(std::move(bug));
          }
        }
        records.push_back(std::move(nvd));
      }
      if (!advisory.refs.empty()) records.push_back(std::move(advisory));
      previous = point.cumulative;
    }
    world.releases.push_back(std::move(release));
    world.truth.push_back(std::move(series));
  }
  world.corpus = Corpus(std::move(records));
  world.as_of = msr_end(world.releases.back().release_date, spec.horizon);
  return world;
}

}  // namespace vdm
