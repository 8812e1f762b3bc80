#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "vdm/datasets.hpp"
#include "vdm/models.hpp"
#include "vdm/series.hpp"

namespace vdm {

/// SplitMix64. State advances by 0x9E3779B97F4A7C15; output mixes with
/// (z ^ z>>30) * 0xBF58476D1CE4E5B9, (z ^ z>>27) * 0x94D049BB133111EB,
/// z ^ z>>31. Doubles take the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

 private:
  std::uint64_t state_;
};

enum class NoiseKind { None, Multiplicative, AdditiveRounded };

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view text);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

/// Omega(m) sampled at m = 1..horizon with no rounding or noise.
CurveData sample_curve(const ParamVector& params, int horizon);

/// Counts m = 1..horizon: Omega(m) * (1 + e_m) for multiplicative noise or
/// Omega(m) + e_m for additive noise, e_m uniform in [-magnitude, magnitude],
/// then rounded and clamped to the running maximum (never below 0).
ObservationSeries generate(const ParamVector& params, int horizon, const NoiseSpec& noise);

struct SyntheticWorldSpec {
  ParamVector params;
  int horizon = 60;
  NoiseSpec noise;
  int releases = 3;
  std::string product = "synthetic";
};

struct SyntheticWorld {
  Corpus corpus;
  std::vector<Release> releases;
  /// NVD-dataset series each release was generated from.
  std::vector<ObservationSeries> truth;
  /// End of the last generated month, shared by all releases.
  Date as_of{};
};

/// Corpus whose NVD dataset reproduces one generated series per release,
/// with bug reports and advisories attached so all five datasets are
/// populated.
SyntheticWorld generate_world(const SyntheticWorldSpec& spec);

}  // namespace vdm
