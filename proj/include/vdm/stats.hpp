#pragma once

#include <span>
#include <string>
#include <vector>

namespace vdm::stats {

/// Regularized lower incomplete gamma P(s, x). Series expansion below
/// x = s + 1, Lentz continued fraction above.
double regularized_lower_gamma(double s, double x);

/// Q(s, x) = 1 - P(s, x), computed without cancellation.
double regularized_upper_gamma(double s, double x);

/// Upper tail of the chi-square distribution.
double chi_square_survival(double statistic, double dof);

double normal_survival(double z);

/// Values with average ranks (1-based) under ties.
struct RankedSample {
  std::vector<double> values;
  std::vector<double> ranks;
};

RankedSample rank(std::span<const double> values);

/// Sum over tie groups of (t^3 - t).
double tie_term(std::span<const double> values);

double median(std::vector<double> values);

enum class Alternative { Greater, Less, TwoSided };

std::string to_string(Alternative alt);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string method;
  std::vector<std::string> warnings;
};

/// U is the statistic of sample a (number of pairs with a > b, ties
/// counted 1/2). "greater" tests whether a tends to exceed b.
/// Exact null distribution when n_a + n_b <= 12 and there are no ties,
/// otherwise normal approximation with tie and continuity corrections.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative);

/// Kruskal-Wallis H with tie correction, chi-square(groups - 1) p-value.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

double bonferroni(double alpha, int n_tests);

}  // namespace vdm::stats
