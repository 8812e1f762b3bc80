#include "vdm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vdm/errors.hpp"

namespace vdm::stats {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 100000;

void check_gamma_args(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw DomainError("incomplete gamma requires s > 0 and x >= 0");
  }
}

// Series for P(s, x); converges quickly for x < s + 1.
double lower_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Continued fraction for Q(s, x) (modified Lentz); for x >= s + 1.
double upper_fraction(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

// Number of size-k subsets of {1..n} with each possible rank sum.
std::vector<double> rank_sum_counts(int n, int k) {
  const int max_sum = n * (n + 1) / 2;
  // ways[j][s]: subsets of size j with sum s over the ranks seen so far
  std::vector<std::vector<double>> ways(k + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (int r = 1; r <= n; ++r) {
    for (int j = std::min(r, k); j >= 1; --j) {
      for (int s = max_sum; s >= r; --s) ways[j][s] += ways[j - 1][s - r];
    }
  }
  return ways[k];
}

}  // namespace

double regularized_lower_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return std::clamp(lower_series(s, x), 0.0, 1.0);
  return std::clamp(1.0 - upper_fraction(s, x), 0.0, 1.0);
}

double regularized_upper_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) return std::clamp(1.0 - lower_series(s, x), 0.0, 1.0);
  return std::clamp(upper_fraction(s, x), 0.0, 1.0);
}

double chi_square_survival(double statistic, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi-square dof must be positive");
  if (!(statistic >= 0.0)) throw DomainError("chi-square statistic must be >= 0");
  return regularized_upper_gamma(dof / 2.0, statistic / 2.0);
}

double normal_survival(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

RankedSample rank(std::span<const double> values) {
  RankedSample out{{values.begin(), values.end()}, std::vector<double>(values.size())};
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j share the average of ranks i+1..j+1
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t q = i; q <= j; ++q) out.ranks[order[q]] = avg;
    i = j + 1;
  }
  return out;
}

double tie_term(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::string to_string(Alternative alt) {
  switch (alt) {
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
    case Alternative::TwoSided: return "two_sided";
  }
  return "?";
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative) {
  if (a.empty() || b.empty()) throw Error("Mann-Whitney U needs two non-empty samples");
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranked = rank(pooled);
  const double rank_sum_a =
      std::accumulate(ranked.ranks.begin(), ranked.ranks.begin() + a.size(), 0.0);
  const double u = rank_sum_a - na * (na + 1.0) / 2.0;
  const double ties = tie_term(pooled);

  TestResult out;
  out.statistic = u;
  const int n = static_cast<int>(pooled.size());
  if (n <= 12 && ties == 0.0) {
    out.method = "exact";
    const int ka = static_cast<int>(a.size());
    const auto counts = rank_sum_counts(n, ka);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const double offset = na * (na + 1.0) / 2.0;
    double le = 0.0, ge = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      const double us = static_cast<double>(s) - offset;
      if (counts[s] == 0.0) continue;
      if (us <= u) le += counts[s];
      if (us >= u) ge += counts[s];
    }
    switch (alternative) {
      case Alternative::Greater: out.p_value = ge / total; break;
      case Alternative::Less: out.p_value = le / total; break;
      case Alternative::TwoSided:
        out.p_value = std::min(1.0, 2.0 * std::min(le, ge) / total);
        break;
    }
    return out;
  }

  out.method = "normal approximation (tie and continuity corrected)";
  const double mean = na * nb / 2.0;
  const double nn = na + nb;
  const double var = na * nb / 12.0 * ((nn + 1.0) - ties / (nn * (nn - 1.0)));
  if (!(var > 0.0)) {
    out.p_value = 1.0;
    out.warnings.push_back("all values tied; p-value set to 1");
    return out;
  }
  const double sd = std::sqrt(var);
  switch (alternative) {
    case Alternative::Greater:
      out.p_value = normal_survival((u - mean - 0.5) / sd);
      break;
    case Alternative::Less:
      out.p_value = 1.0 - normal_survival((u - mean + 0.5) / sd);
      break;
    case Alternative::TwoSided:
      out.p_value = std::min(1.0, 2.0 * normal_survival((std::abs(u - mean) - 0.5) / sd));
      break;
  }
  out.p_value = std::clamp(out.p_value, 0.0, 1.0);
  return out;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error("Kruskal-Wallis needs at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw Error("Kruskal-Wallis groups must be non-empty");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const auto ranked = rank(pooled);
  const auto n = static_cast<double>(pooled.size());

  TestResult out;
  out.method = "chi-square approximation (tie corrected)";
  double sum_term = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    const double r = std::accumulate(ranked.ranks.begin() + offset,
                                     ranked.ranks.begin() + offset + g.size(), 0.0);
    sum_term += r * r / static_cast<double>(g.size());
    offset += g.size();
    if (g.size() < 5) {
      out.warnings.push_back("group of size " + std::to_string(g.size()) +
                             " < 5; chi-square approximation may be inaccurate");
    }
  }
  const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);
  if (!(correction > 0.0)) {
    out.statistic = 0.0;
    out.p_value = 1.0;
    out.warnings.push_back("all values tied; H defined as 0");
    return out;
  }
  const double h = (12.0 / (n * (n + 1.0)) * sum_term - 3.0 * (n + 1.0)) / correction;
  out.statistic = std::max(h, 0.0);
  out.p_value = chi_square_survival(out.statistic, static_cast<double>(groups.size() - 1));
  return out;
}

double bonferroni(double alpha, int n_tests) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (n_tests < 1) throw DomainError("Bonferroni needs at least one test");
  return alpha / n_tests;
}

}  // namespace vdm::stats
