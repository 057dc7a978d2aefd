#include "tca/workflow.hpp"

#include <algorithm>
#include <cmath>

#include "tca/error.hpp"

namespace tca {

namespace {

std::vector<std::string> names_or_default(const std::vector<std::string>& names, std::size_t k) {
  if (names.size() == k) return names;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("y" + std::to_string(i + 1));
  return out;
}

std::size_t find_name(const std::vector<std::string>& names, const std::string& name,
                      const char* what) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

std::vector<std::string> variable_names(const AnyModel& model) {
  return std::visit([](const auto& m) { return names_or_default(m.var_names, m.k()); }, model);
}

TransmissionOrdering make_ordering(const std::vector<std::string>& var_names,
                                   const std::vector<std::string>& order) {
  return TransmissionOrdering::from_names(var_names, order);
}

PreparedShock prepare_shock(const VarmaModel& model, const AnalysisSpec& spec) {
  model.validate();
  const std::size_t k = model.k();
  const auto names = names_or_default(model.var_names, k);
  const TransmissionOrdering ordering = make_ordering(names, spec.order);

  std::size_t shock = 0;
  if (!spec.shock.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < k && !found; ++i) {
      if (model.shock_label(i) == spec.shock) {
        shock = i;
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::InvalidArgument, "unknown shock '" + spec.shock + "'");
  }

  const SystemsForm sf = make_systems_form(model, ordering, spec.horizon, spec.system);
  PreparedShock out;
  out.system = shock_system(sf, shock);
  out.shock_index = shock;
  out.xi = spec.normalize_value;
  if (!spec.normalize_var.empty()) {
    const std::size_t pos = ordering.perm.position_of(find_name(names, spec.normalize_var, "variable"));
    const double base = out.system.phi_col()[pos];
    if (!(std::abs(base) > kZeroImpactTolerance)) {
      throw Error(ErrorCode::ZeroImpact, "shock '" + out.system.shock_label + "' does not move '" +
                                             spec.normalize_var + "' on impact");
    }
    out.xi = spec.normalize_value / base;
  }
  return out;
}

PreparedShock prepare_shock(const ReducedVar& var, const AnalysisSpec& spec,
                            std::optional<double> frozen_scale) {
  var.validate();
  const std::size_t k = var.k();
  const auto names = names_or_default(var.var_names, k);
  if (!spec.shock.empty() && spec.shock != names.front()) {
    throw Error(ErrorCode::InvalidArgument,
                "for a reduced-form model the shock is the internal instrument, which must be the "
                "first variable ('" + names.front() + "'), got '" + spec.shock + "'");
  }
  const TransmissionOrdering ordering = make_ordering(names, spec.order);
  const std::size_t normalize_on =
      spec.normalize_var.empty() ? 0 : find_name(names, spec.normalize_var, "variable");
  const std::string label = names.front();

  StructuralShockColumn col;
  double scale = 0.0;
  if (frozen_scale) {
    scale = *frozen_scale;
    col = first_cholesky_column(var, 0, scale, label);
  } else {
    col = identify_internal_instrument(var, 1, normalize_on, spec.normalize_value, 0, label);
    scale = col.impact / first_cholesky_column(var, 0, 1.0, label).phi[normalize_on];
  }
  check_system_size(k, spec.horizon, spec.system);
  const CholeskyForm cf = cholesky_form(var, ordering);
  PreparedShock out;
  out.system = reconstruct_from_single_shock(cf, col.impact_column(k), spec.horizon, label,
                                             spec.system);
  out.xi = 1.0;
  out.instrument_scale = scale;
  return out;
}

PreparedShock prepare_shock(const AnyModel& model, const AnalysisSpec& spec) {
  return std::visit([&](const auto& m) { return prepare_shock(m, spec); }, model);
}

EffectTable run_condition(const PreparedShock& shock, std::string_view condition,
                          const AnalysisSpec& spec) {
  const TransmissionCondition cond =
      parse_condition(condition, shock.system.ordering.labels, shock.system.h);
  EffectOptions opts = spec.effects;
  opts.xi = shock.xi;
  return transmission_effect(shock.system, cond, opts);
}

}  // namespace tca
