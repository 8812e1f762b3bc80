#pragma once

// The six vulnerability discovery model (VDM) curve families.
//
//   AML  Omega(t) = B / (B C exp(-A B t) + 1)
//   AT   Omega(t) = k ln(t) + C              (k stands for K/gamma)
//   LN   Omega(t) = A t + B
//   LP   Omega(t) = b0 ln(1 + b1 t)
//   RE   Omega(t) = N (1 - exp(-lambda t))
//   RQ   Omega(t) = A t^2 / 2 + B t
//
// t is measured in months since release and must be strictly positive.

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vdm {

enum class ModelId { AML, AT, LN, LP, RE, RQ };

inline constexpr std::array<ModelId, 6> kAllModels = {
    ModelId::AML, ModelId::AT, ModelId::LN,
    ModelId::LP,  ModelId::RE, ModelId::RQ};

struct ModelSpec {
  ModelId id;
  std::string_view name;
  std::vector<std::string_view> param_names;

  std::size_t param_count() const { return param_names.size(); }
};

const ModelSpec& model_spec(ModelId id);
std::size_t param_count(ModelId id);

std::string_view to_string(ModelId id);
std::optional<ModelId> parse_model_id(std::string_view text);

/// Fitted or ground-truth parameters of one model, in param_names order.
struct ParamVector {
  ModelId model = ModelId::LN;
  std::vector<double> values;

  ParamVector() = default;
  ParamVector(ModelId m, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Omega(t). Throws DomainError if t <= 0, if a parameter is non-finite or
/// the formula is undefined (AML denominator <= 0, LP log argument <= 0).
double evaluate(const ParamVector& params, double t);

/// Partial derivatives of Omega(t) in param_names order.
std::vector<double> gradient(const ParamVector& params, double t);

struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_open = false;

  bool contains(double v) const {
    return (lower_open ? v > lower : v >= lower) && v <= upper;
  }
};

/// Parameter box used by the fitter; evaluate() does not enforce it.
std::vector<Interval> default_domain(ModelId id);

bool in_domain(const ParamVector& params);

/// Clamps every value into the default domain. Open lower bounds map to a
/// small positive floor.
ParamVector project_to_domain(ParamVector params);

}  // namespace vdm
