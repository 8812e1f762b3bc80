#include "vdm/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vdm/errors.hpp"

namespace vdm {
namespace {

// Smallest value a strictly positive parameter is projected to.
constexpr double kPositiveFloor = 1e-12;

const std::array<ModelSpec, 6>& specs() {
  static const std::array<ModelSpec, 6> table = {{
      {ModelId::AML, "AML", {"A", "B", "C"}},
      {ModelId::AT, "AT", {"k", "C"}},
      {ModelId::LN, "LN", {"A", "B"}},
      {ModelId::LP, "LP", {"beta0", "beta1"}},
      {ModelId::RE, "RE", {"N", "lambda"}},
      {ModelId::RQ, "RQ", {"A", "B"}},
  }};
  return table;
}

void check_args(const ParamVector& p, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("time must be finite and > 0, got " + std::to_string(t));
  }
  if (p.values.size() != param_count(p.model)) {
    throw DomainError(std::string(to_string(p.model)) + " expects " +
                      std::to_string(param_count(p.model)) + " parameters");
  }
  for (double v : p.values) {
    if (!std::isfinite(v)) throw DomainError("non-finite parameter");
  }
}

double aml_denominator(double a, double b, double c, double t) {
  const double d = b * c * std::exp(-a * b * t) + 1.0;
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("AML denominator B*C*exp(-A*B*t)+1 is not positive");
  }
  return d;
}

double lp_argument(double b1, double t) {
  const double arg = 1.0 + b1 * t;
  if (!(arg > 0.0)) throw DomainError("LP log argument 1+beta1*t is not positive");
  return arg;
}

}  // namespace

const ModelSpec& model_spec(ModelId id) {
  return specs()[static_cast<std::size_t>(id)];
}

std::size_t param_count(ModelId id) { return model_spec(id).param_count(); }

std::string_view to_string(ModelId id) { return model_spec(id).name; }

std::optional<ModelId> parse_model_id(std::string_view text) {
  for (const auto& s : specs()) {
    if (s.name == text) return s.id;
  }
  return std::nullopt;
}

ParamVector::ParamVector(ModelId m, std::vector<double> v)
    : model(m), values(std::move(v)) {}

double evaluate(const ParamVector& p, double t) {
  check_args(p, t);
  const auto& v = p.values;
  switch (p.model) {
    case ModelId::AML:
      return v[1] / aml_denominator(v[0], v[1], v[2], t);
    case ModelId::AT:
      return v[0] * std::log(t) + v[1];
    case ModelId::LN:
      return v[0] * t + v[1];
    case ModelId::LP:
      return v[0] * std::log(lp_argument(v[1], t));
    case ModelId::RE:
      return v[0] * -std::expm1(-v[1] * t);
    case ModelId::RQ:
      return v[0] * t * t / 2.0 + v[1] * t;
  }
  throw DomainError("unknown model");
}

std::vector<double> gradient(const ParamVector& p, double t) {
  check_args(p, t);
  const auto& v = p.values;
  switch (p.model) {
    case ModelId::AML: {
      const double a = v[0], b = v[1], c = v[2];
      const double d = aml_denominator(a, b, c, t);
      if (b > 0.0 && c > 0.0) {
        // Work with logs so that exp(-A*B*t) underflowing does not take the
        // whole derivative with it when the product is still representable.
        const double log_e = std::log(b) + std::log(c) - a * b * t;
        const double log_d = log_e > 0.0 ? log_e + std::log1p(std::exp(-log_e))
                                         : std::log1p(std::exp(log_e));
        const double lb = std::log(b);
        const double abt_e_over_d2 = a * t > 0.0
            ? std::exp(std::log(a * b * t) + log_e - 2.0 * log_d)
            : a * b * t * std::exp(log_e - 2.0 * log_d);
        return {std::exp(2.0 * lb + std::log(t) + log_e - 2.0 * log_d),
                std::exp(-2.0 * log_d) + abt_e_over_d2,
                -std::exp(2.0 * lb - a * b * t - 2.0 * log_d)};
      }
      const double e = d - 1.0;
      const double d2 = d * d;
      return {b * b * t * e / d2, (1.0 + a * b * t * e) / d2,
              -b * b * std::exp(-a * b * t) / d2};
    }
    case ModelId::AT:
      return {std::log(t), 1.0};
    case ModelId::LN:
      return {t, 1.0};
    case ModelId::LP: {
      const double arg = lp_argument(v[1], t);
      return {std::log(arg), v[0] * t / arg};
    }
    case ModelId::RE:
      return {-std::expm1(-v[1] * t), v[0] * t * std::exp(-v[1] * t)};
    case ModelId::RQ:
      return {t * t / 2.0, t};
  }
  throw DomainError("unknown model");
}

std::vector<Interval> default_domain(ModelId id) {
  const Interval free{};
  const Interval positive{0.0, std::numeric_limits<double>::infinity(), true};
  switch (id) {
    case ModelId::AML:
      return {positive, positive, positive};
    case ModelId::LP:
    case ModelId::RE:
      return {positive, positive};
    case ModelId::AT:
    case ModelId::LN:
    case ModelId::RQ:
      return {free, free};
  }
  return {};
}

bool in_domain(const ParamVector& params) {
  const auto box = default_domain(params.model);
  if (box.size() != params.size()) return false;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!std::isfinite(params[i]) || !box[i].contains(params[i])) return false;
  }
  return true;
}

ParamVector project_to_domain(ParamVector params) {
  const auto box = default_domain(params.model);
  for (std::size_t i = 0; i < box.size() && i < params.size(); ++i) {
    double lo = box[i].lower;
    if (box[i].lower_open) lo = std::max(lo + kPositiveFloor, kPositiveFloor);
    params[i] = std::clamp(params[i], lo, box[i].upper);
  }
  return params;
}

}  // namespace vdm
