#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tca/condition.hpp"
#include "tca/model.hpp"
#include "tca/system.hpp"

namespace tca {

using AnyModel = std::variant<VarmaModel, ReducedVar>;

// What to decompose. For a reduced-form VAR the shock is the internal
// instrument, which must be the first variable; it is normalised so that
// `normalize_var` (default: the instrument) moves by `normalize_value` on
// impact. For a structural model, `normalize_var` (optional) sets the shock
// size xi the same way; otherwise xi = normalize_value.
struct AnalysisSpec {
  std::vector<std::string> order;
  std::string shock;
  std::string normalize_var;
  double normalize_value = 1.0;
  std::size_t horizon = 0;
  SystemOptions system;
  EffectOptions effects;
};

struct PreparedShock {
  ShockSystem system;
  std::size_t shock_index = 0;  // column of Omega in the structural model
  double xi = 1.0;
  // Scale applied to the first Cholesky column (reduced form only).
  double instrument_scale = 1.0;
};

[[nodiscard]] std::vector<std::string> variable_names(const AnyModel& model);
[[nodiscard]] TransmissionOrdering make_ordering(const std::vector<std::string>& var_names,
                                                 const std::vector<std::string>& order);

[[nodiscard]] PreparedShock prepare_shock(const VarmaModel& model, const AnalysisSpec& spec);
// frozen_scale: reuse a fixed multiple of the first Cholesky column instead of
// re-deriving the normalisation from this model's covariance.
[[nodiscard]] PreparedShock prepare_shock(const ReducedVar& var, const AnalysisSpec& spec,
                                          std::optional<double> frozen_scale = std::nullopt);
[[nodiscard]] PreparedShock prepare_shock(const AnyModel& model, const AnalysisSpec& spec);

[[nodiscard]] EffectTable run_condition(const PreparedShock& shock, std::string_view condition,
                                        const AnalysisSpec& spec);

}  // namespace tca
