#include "vdm/fitter.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vdm/errors.hpp"

namespace vdm {
namespace {

// Damping beyond this means no descent step exists at working precision.
constexpr double kMaxDamping = 1e20;
// A step only counts toward convergence once no parameter moves by more
// than this fraction of its magnitude, so the result is a fixed point.
constexpr double kStepTolerance = 1e-11;

constexpr double kRateLow = 1e-3;
constexpr double kRateHigh = 1.0;

std::vector<double> linspace(double lo, double hi, int n) {
  if (n == 1) return {(lo + hi) / 2.0};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  auto exps = linspace(std::log10(lo), std::log10(hi), n);
  for (double& e : exps) e = std::pow(10.0, e);
  return exps;
}

// Seed first, then symmetric offsets of growing size around it.
std::vector<double> around(double seed, int n) {
  const double scale = std::max(std::abs(seed), 1.0);
  std::vector<double> out{seed};
  for (int j = 1; static_cast<int>(out.size()) < n; ++j) {
    const double step = 0.5 * ((j + 1) / 2) * scale;
    out.push_back(j % 2 == 1 ? seed + step : seed - step);
  }
  return out;
}

// Least-squares coefficients for a model that is linear in its parameters.
std::vector<double> linear_regression(const CurveData& data, ModelId model) {
  const std::size_t k = param_count(model);
  const ParamVector probe(model, std::vector<double>(k, 0.0));
  Eigen::MatrixXd basis(data.size(), k);
  Eigen::VectorXd y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto g = gradient(probe, data[i].t);
    for (std::size_t j = 0; j < k; ++j) basis(i, j) = g[j];
    y(i) = data[i].value;
  }
  Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(y);
  std::vector<double> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = std::isfinite(coef(j)) ? coef(j) : 0.0;
  return out;
}

void cartesian(const std::vector<std::vector<double>>& axes, ModelId model,
               std::vector<ParamVector>& out) {
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::vector<double> v(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) v[a] = axes[a][idx[a]];
    out.push_back(project_to_domain(ParamVector(model, std::move(v))));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
      if (a == 0) return;
    }
    if (axes.empty()) return;
  }
}

}  // namespace

void FitOptions::validate() const {
  if (max_iterations <= 0 || !(relative_sse_tolerance > 0.0) ||
      !(damping_init > 0.0) || !(damping_factor > 1.0) || multistart_grid_size < 1) {
    throw ConfigError(
        "fit options must be positive (damping_factor > 1, multistart >= 1)");
  }
}

double sum_squared_error(const CurveData& data, const ParamVector& params) {
  double sse = 0.0;
  try {
    for (const auto& obs : data) {
      const double r = obs.value - evaluate(params, obs.t);
      sse += r * r;
    }
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
  return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

std::vector<ParamVector> initial_guesses(const CurveData& data, ModelId model,
                                         int grid_size) {
  grid_size = std::max(grid_size, 1);
  double max_count = 0.0;
  for (const auto& obs : data) max_count = std::max(max_count, obs.value);
  const double asymptote = std::max(max_count, 1.0);

  std::vector<std::vector<double>> axes;
  switch (model) {
    case ModelId::AML:
      axes = {logspace(kRateLow, kRateHigh, grid_size),
              linspace(asymptote, 3.0 * asymptote, grid_size),
              logspace(kRateLow, kRateHigh, grid_size)};
      break;
    case ModelId::LP:
    case ModelId::RE:
      axes = {linspace(asymptote, 3.0 * asymptote, grid_size),
              logspace(kRateLow, kRateHigh, grid_size)};
      break;
    case ModelId::AT:
    case ModelId::LN:
    case ModelId::RQ: {
      for (double c : linear_regression(data, model)) axes.push_back(around(c, grid_size));
      break;
    }
  }
  std::vector<ParamVector> out;
  cartesian(axes, model, out);
  return out;
}

FitOutcome fit_from(const CurveData& data, const ParamVector& start,
                    const FitOptions& options) {
  options.validate();
  const std::size_t n = data.size();
  const std::size_t k = start.size();

  FitOutcome out;
  out.params = project_to_domain(start);
  out.sse = sum_squared_error(data, out.params);
  if (!std::isfinite(out.sse)) return out;

  double damping = options.damping_init;
  Eigen::MatrixXd jac(n, k);
  Eigen::VectorXd resid(n);

  auto linearize = [&](const ParamVector& p) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto g = gradient(p, data[i].t);
      for (std::size_t j = 0; j < k; ++j) jac(i, j) = g[j];
      resid(i) = data[i].value - evaluate(p, data[i].t);
    }
  };
  linearize(out.params);

  while (out.iterations_used < options.max_iterations) {
    ++out.iterations_used;
    if (out.sse == 0.0) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;

    bool accepted = false;
    while (!accepted && damping <= kMaxDamping) {
      Eigen::MatrixXd lhs = jtj;
      for (std::size_t j = 0; j < k; ++j) {
        lhs(j, j) += damping * std::max(jtj(j, j), 1e-300);
      }
      const Eigen::VectorXd step = lhs.ldlt().solve(jtr);
      if (!step.allFinite()) {
        damping *= options.damping_factor;
        continue;
      }
      ParamVector candidate = out.params;
      for (std::size_t j = 0; j < k; ++j) candidate[j] += step(j);
      candidate = project_to_domain(std::move(candidate));
      const double sse = sum_squared_error(data, candidate);
      if (sse < out.sse) {
        const double rel = (out.sse - sse) / out.sse;
        bool small_step = true;
        for (std::size_t j = 0; j < k; ++j) {
          if (std::fabs(candidate[j] - out.params[j]) > kStepTolerance * std::fabs(out.params[j])) {
            small_step = false;
          }
        }
        out.params = std::move(candidate);
        out.sse = sse;
        damping = std::max(damping / options.damping_factor, 1e-300);
        accepted = true;
        linearize(out.params);
        if (rel < options.relative_sse_tolerance && small_step) out.converged = true;
      } else {
        damping *= options.damping_factor;
      }
    }
    if (!accepted) {
      // Local minimum to working precision.
      out.converged = true;
    }
    if (out.converged) break;
  }
  return out;
}

bool better_outcome(const FitOutcome& a, const FitOutcome& b) {
  if (a.sse != b.sse) {
    if (std::isnan(b.sse)) return !std::isnan(a.sse);
    if (std::isnan(a.sse)) return false;
    return a.sse < b.sse;
  }
  return std::lexicographical_compare(a.params.values.begin(), a.params.values.end(),
                                      b.params.values.begin(), b.params.values.end());
}

FitOutcome fit(const CurveData& data, ModelId model, const FitOptions& options) {
  options.validate();
  const std::size_t k = param_count(model);
  if (data.size() < k + 1) {
    throw InsufficientData(std::string(to_string(model)) + " needs at least " +
                           std::to_string(k + 1) + " points, got " +
                           std::to_string(data.size()));
  }
  std::optional<FitOutcome> best;
  for (const auto& start : initial_guesses(data, model, options.multistart_grid_size)) {
    FitOutcome candidate = fit_from(data, start, options);
    if (!best || better_outcome(candidate, *best)) best = std::move(candidate);
  }
  return *best;
}

FitOutcome fit(const ObservationSeries& series, ModelId model, const FitOptions& options) {
  validate(series);
  return fit(series.to_curve(), model, options);
}

}  // namespace vdm
