#include "tca/tca.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "tca/error.hpp"
#include "tca/graph.hpp"
#include "tca/inference.hpp"
#include "tca/io.hpp"
#include "tca/workflow.hpp"

struct tca_data {
  tca::DataTable table;
};

struct tca_model {
  tca::AnyModel model;
  std::vector<std::string> names;
};

struct tca_analysis {
  tca::AnyModel model;
  tca::AnalysisSpec spec;
  bool freeze_normalization = false;
};

struct tca_effects {
  tca::EffectTable table;
  bool has_bands = false;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t discarded = 0;
};

namespace {

thread_local std::string g_last_error;

template <class F>
tca_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return TCA_OK;
  } catch (const tca::Error& e) {
    g_last_error = e.what();
    return static_cast<tca_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TCA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TCA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return TCA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw tca::Error(tca::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_names(const char* csv) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (const char* p = csv; *p != '\0'; ++p) {
    if (*p == ',') flush();
    else cur += *p;
  }
  flush();
  return out;
}

double cell(const tca_effects* e, const std::vector<double>& v, std::size_t position, std::size_t t) {
  if (e == nullptr || position >= e->table.k || t > e->table.h) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const std::size_t m = t * e->table.k + position;
  return m < v.size() ? v[m] : std::numeric_limits<double>::quiet_NaN();
}

std::string path_listing(const tca::Matrix& b, std::span<const double> omega_col,
                         std::size_t shock, std::size_t target) {
  const auto paths = tca::enumerate_paths(b, omega_col, shock, target);
  const double total = tca::total_path_effect(paths, 1.0);
  std::string out;
  double cum = 0.0;
  for (const auto& p : paths) {
    cum += p.coefficient;
    out += tca::format_path(p);
    out += " share = ";
    out += total != 0.0 ? tca::format_number(cum / total) : std::string("nan");
    out += '\n';
  }
  return out;
}

}  // namespace

extern "C" {

const char* tca_last_error(void) { return g_last_error.c_str(); }

const char* tca_status_name(tca_status status) {
  if (status == TCA_OK) return "Ok";
  if (status == TCA_ERR_INTERNAL) return "Internal";
  if (status >= TCA_ERR_INVALID_ARGUMENT && status <= TCA_ERR_IO) {
    return tca::error_code_name(static_cast<tca::ErrorCode>(static_cast<int>(status)));
  }
  return "Unknown";
}

const char* tca_version(void) { return "0.1.0"; }

void tca_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------- data

tca_status tca_data_read_csv(const char* path, tca_data** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto d = std::make_unique<tca_data>();
    d->table = tca::read_csv(path);
    *out = d.release();
  });
}

tca_status tca_data_from_values(size_t rows, size_t cols, const double* row_major,
                                const char* const* names, tca_data** out) {
  return guarded([&] {
    require(out != nullptr && (row_major != nullptr || rows * cols == 0), "null argument");
    *out = nullptr;
    auto d = std::make_unique<tca_data>();
    d->table.values = tca::Matrix::from_row_major(
        rows, cols, std::vector<double>(row_major, row_major + rows * cols));
    for (std::size_t c = 0; c < cols; ++c) {
      d->table.names.push_back(names != nullptr ? names[c] : "y" + std::to_string(c + 1));
    }
    *out = d.release();
  });
}

size_t tca_data_rows(const tca_data* data) { return data ? data->table.values.rows() : 0; }
size_t tca_data_cols(const tca_data* data) { return data ? data->table.values.cols() : 0; }

const char* tca_data_name(const tca_data* data, size_t col) {
  if (data == nullptr || col >= data->table.names.size()) return nullptr;
  return data->table.names[col].c_str();
}

void tca_data_free(tca_data* data) { delete data; }

// ---------------------------------------------------------------- models

namespace {

tca_model* wrap_model(tca::AnyModel m) {
  auto out = std::make_unique<tca_model>();
  out->names = tca::variable_names(m);
  out->model = std::move(m);
  return out.release();
}

}  // namespace

tca_status tca_model_estimate(const tca_data* data, size_t lags, int include_intercept,
                              tca_model** out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = wrap_model(tca::estimate_var_ols(data->table.values, lags, include_intercept != 0,
                                            data->table.names));
  });
}

tca_status tca_model_load(const char* path, tca_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = wrap_model(tca::load_model(path));
  });
}

tca_status tca_model_save(const tca_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "null argument");
    tca::save_model(path, model->model);
  });
}

tca_status tca_model_from_varma(size_t k, const double* a0, size_t ell, const double* ar, size_t q,
                                const double* ma, const char* const* names,
                                const char* const* shock_names, tca_model** out) {
  return guarded([&] {
    require(out != nullptr && a0 != nullptr, "null argument");
    require(ell == 0 || ar != nullptr, "null AR coefficients");
    require(q == 0 || ma != nullptr, "null MA coefficients");
    *out = nullptr;
    const std::size_t kk = k * k;
    tca::VarmaModel m;
    m.a0 = tca::Matrix::from_row_major(k, k, std::vector<double>(a0, a0 + kk));
    for (std::size_t i = 0; i < ell; ++i) {
      m.ar.push_back(tca::Matrix::from_row_major(
          k, k, std::vector<double>(ar + i * kk, ar + (i + 1) * kk)));
    }
    for (std::size_t j = 0; j < q; ++j) {
      m.ma.push_back(tca::Matrix::from_row_major(
          k, k, std::vector<double>(ma + j * kk, ma + (j + 1) * kk)));
    }
    for (std::size_t i = 0; names != nullptr && i < k; ++i) m.var_names.emplace_back(names[i]);
    for (std::size_t i = 0; shock_names != nullptr && i < k; ++i) {
      m.shock_names.emplace_back(shock_names[i]);
    }
    m.validate();
    *out = wrap_model(std::move(m));
  });
}

tca_model_kind tca_model_get_kind(const tca_model* model) {
  return model != nullptr && std::holds_alternative<tca::VarmaModel>(model->model)
             ? TCA_MODEL_VARMA
             : TCA_MODEL_REDUCED_VAR;
}

size_t tca_model_k(const tca_model* model) { return model ? model->names.size() : 0; }

size_t tca_model_lags(const tca_model* model) {
  if (model == nullptr) return 0;
  if (const auto* v = std::get_if<tca::ReducedVar>(&model->model)) return v->p;
  return std::get<tca::VarmaModel>(model->model).ell();
}

size_t tca_model_nobs(const tca_model* model) {
  if (model == nullptr) return 0;
  if (const auto* v = std::get_if<tca::ReducedVar>(&model->model)) return v->nobs;
  return 0;
}

const char* tca_model_var_name(const tca_model* model, size_t i) {
  if (model == nullptr || i >= model->names.size()) return nullptr;
  return model->names[i].c_str();
}

tca_status tca_model_log_det_sigma(const tca_model* model, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto* v = std::get_if<tca::ReducedVar>(&model->model);
    require(v != nullptr, "log det of the residual covariance needs a reduced-form VAR");
    *out = tca::log_det_spd(v->sigma_u);
  });
}

void tca_model_free(tca_model* model) { delete model; }

// ---------------------------------------------------------------- analysis

tca_status tca_analysis_create(const tca_model* model, tca_analysis** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto a = std::make_unique<tca_analysis>();
    a->model = model->model;
    *out = a.release();
  });
}

tca_status tca_analysis_set_order(tca_analysis* a, const char* order) {
  return guarded([&] {
    require(a != nullptr && order != nullptr, "null argument");
    a->spec.order = split_names(order);
    (void)tca::make_ordering(tca::variable_names(a->model), a->spec.order);
  });
}

tca_status tca_analysis_set_shock(tca_analysis* a, const char* shock) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    a->spec.shock = shock != nullptr ? shock : "";
  });
}

tca_status tca_analysis_set_normalize(tca_analysis* a, const char* var, double value) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    require(std::isfinite(value), "normalisation value must be finite");
    a->spec.normalize_var = var != nullptr ? var : "";
    a->spec.normalize_value = value;
  });
}

tca_status tca_analysis_set_horizon(tca_analysis* a, size_t h) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    a->spec.horizon = h;
  });
}

tca_status tca_analysis_set_allow_large(tca_analysis* a, int allow) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    a->spec.system.allow_large = allow != 0;
  });
}

tca_status tca_analysis_set_threads(tca_analysis* a, unsigned threads) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    a->spec.effects.threads = threads;
  });
}

tca_status tca_analysis_set_expansion(tca_analysis* a, tca_expansion method) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    require(method == TCA_EXPANSION_INCLUSION_EXCLUSION || method == TCA_EXPANSION_DISJOINT_DNF,
            "unknown expansion method");
    a->spec.effects.method = method == TCA_EXPANSION_DISJOINT_DNF
                                 ? tca::ExpansionMethod::DisjointDnf
                                 : tca::ExpansionMethod::InclusionExclusion;
  });
}

tca_status tca_analysis_set_freeze_normalization(tca_analysis* a, int freeze) {
  return guarded([&] {
    require(a != nullptr, "null argument");
    a->freeze_normalization = freeze != 0;
  });
}

void tca_analysis_free(tca_analysis* a) { delete a; }

tca_status tca_analysis_effects(const tca_analysis* a, const char* condition, tca_effects** out) {
  return guarded([&] {
    require(a != nullptr && condition != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const tca::PreparedShock shock = tca::prepare_shock(a->model, a->spec);
    auto e = std::make_unique<tca_effects>();
    e->table = tca::run_condition(shock, condition, a->spec);
    *out = e.release();
  });
}

tca_status tca_analysis_bootstrap(const tca_analysis* a, const tca_data* data,
                                  const char* const* conditions, size_t n_conditions, size_t reps,
                                  uint64_t seed, double level, tca_effects** out) {
  return guarded([&] {
    require(a != nullptr && data != nullptr && conditions != nullptr && out != nullptr,
            "null argument");
    for (std::size_t i = 0; i < n_conditions; ++i) out[i] = nullptr;
    const auto* var = std::get_if<tca::ReducedVar>(&a->model);
    require(var != nullptr, "the bootstrap needs a reduced-form VAR model");
    const auto model_names = tca::variable_names(a->model);
    if (model_names != data->table.names) {
      throw tca::Error(tca::ErrorCode::InvalidArgument,
                       "data columns do not match the model's variables");
    }
    std::vector<std::string> conds;
    for (std::size_t i = 0; i < n_conditions; ++i) {
      require(conditions[i] != nullptr, "null condition");
      conds.emplace_back(conditions[i]);
    }
    tca::BootstrapSpec spec;
    spec.replications = reps;
    spec.seed = seed;
    spec.level = level;
    spec.threads = a->spec.effects.threads;
    spec.freeze_normalization = a->freeze_normalization;
    tca::VarSpec vs;
    vs.lags = var->p;
    vs.include_intercept = var->has_intercept;
    auto bands = tca::bootstrap_effects(data->table.values, data->table.names, vs, a->spec, conds, spec);
    std::vector<std::unique_ptr<tca_effects>> made;
    for (auto& b : bands) {
      auto e = std::make_unique<tca_effects>();
      e->table = std::move(b.point);
      e->has_bands = true;
      e->lower = std::move(b.channel_lower);
      e->upper = std::move(b.channel_upper);
      e->discarded = b.discarded;
      made.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < made.size(); ++i) out[i] = made[i].release();
  });
}

tca_status tca_analysis_paths(const tca_analysis* a, const char* target, int all_shocks,
                              char** out_text) {
  return guarded([&] {
    require(a != nullptr && out_text != nullptr, "null argument");
    *out_text = nullptr;
    const auto names = tca::variable_names(a->model);
    const auto ordering = tca::make_ordering(names, a->spec.order);
    const std::size_t n = (a->spec.horizon + 1) * names.size();

    std::vector<std::size_t> targets;
    if (target != nullptr) {
      const auto cond = tca::parse_condition(target, ordering.labels, a->spec.horizon);
      require(cond.root.kind == tca::Expr::Kind::Var, "target must be a single variable");
      targets.push_back(cond.root.index);
    } else {
      for (std::size_t m = 0; m < n; ++m) targets.push_back(m);
    }

    std::string text;
    if (all_shocks != 0) {
      tca::VarmaModel structural;
      if (const auto* v = std::get_if<tca::VarmaModel>(&a->model)) structural = *v;
      else structural = tca::recursive_structural_model(std::get<tca::ReducedVar>(a->model), ordering);
      const auto sf = tca::make_systems_form(structural, ordering, a->spec.horizon, a->spec.system);
      for (std::size_t s = 0; s < sf.k; ++s) {
        const auto col = sf.omega.col(s);
        for (std::size_t m : targets) text += path_listing(sf.b, col, s, m);
      }
    } else {
      const tca::PreparedShock shock = tca::prepare_shock(a->model, a->spec);
      for (std::size_t m : targets) {
        text += path_listing(shock.system.b, shock.system.omega_col, shock.shock_index, m);
      }
    }
    *out_text = dup_string(text);
  });
}

// ---------------------------------------------------------------- effects

size_t tca_effects_k(const tca_effects* e) { return e ? e->table.k : 0; }
size_t tca_effects_horizon(const tca_effects* e) { return e ? e->table.h : 0; }

const char* tca_effects_label(const tca_effects* e, size_t position) {
  if (e == nullptr || position >= e->table.labels.size()) return nullptr;
  return e->table.labels[position].c_str();
}

double tca_effects_total(const tca_effects* e, size_t position, size_t t) {
  return e ? cell(e, e->table.total, position, t) : std::numeric_limits<double>::quiet_NaN();
}
double tca_effects_channel(const tca_effects* e, size_t position, size_t t) {
  return e ? cell(e, e->table.channel, position, t) : std::numeric_limits<double>::quiet_NaN();
}
double tca_effects_complement(const tca_effects* e, size_t position, size_t t) {
  return e ? cell(e, e->table.complement, position, t) : std::numeric_limits<double>::quiet_NaN();
}
int tca_effects_has_bands(const tca_effects* e) { return e && e->has_bands ? 1 : 0; }
double tca_effects_lower(const tca_effects* e, size_t position, size_t t) {
  return e ? cell(e, e->lower, position, t) : std::numeric_limits<double>::quiet_NaN();
}
double tca_effects_upper(const tca_effects* e, size_t position, size_t t) {
  return e ? cell(e, e->upper, position, t) : std::numeric_limits<double>::quiet_NaN();
}
size_t tca_effects_discarded_draws(const tca_effects* e) { return e ? e->discarded : 0; }

double tca_effects_max_gap(const tca_effects* e) {
  return e ? tca::decomposition_gap(e->table) : std::numeric_limits<double>::quiet_NaN();
}

tca_status tca_effects_write_csv(const tca_effects* e, const char* path) {
  return guarded([&] {
    require(e != nullptr && path != nullptr, "null argument");
    tca::write_effects_csv(path, e->table, e->has_bands ? &e->lower : nullptr,
                           e->has_bands ? &e->upper : nullptr);
  });
}

tca_status tca_effects_to_csv(const tca_effects* e, char** out_text) {
  return guarded([&] {
    require(e != nullptr && out_text != nullptr, "null argument");
    *out_text = nullptr;
    *out_text = dup_string(tca::format_effects_csv(e->table, e->has_bands ? &e->lower : nullptr,
                                                   e->has_bands ? &e->upper : nullptr));
  });
}

tca_status tca_effects_partition_gap(const tca_effects* const* list, size_t n, double* out_gap) {
  return guarded([&] {
    require(list != nullptr && out_gap != nullptr && n > 0, "null argument");
    const auto& first = list[0]->table;
    double worst = 0.0;
    for (std::size_t m = 0; m < first.size(); ++m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        require(list[i] != nullptr && list[i]->table.size() == first.size(),
                "effect tables differ in shape");
        sum += list[i]->table.channel[m];
      }
      worst = std::max(worst, std::abs(sum - first.total[m]) / std::max(1.0, std::abs(first.total[m])));
    }
    *out_gap = worst;
  });
}

void tca_effects_free(tca_effects* e) { delete e; }

tca_status tca_verify_csv(const char* path, double tol, size_t* rows, size_t* failures,
                          double* worst) {
  return guarded([&] {
    require(path != nullptr, "null argument");
    const auto rep = tca::verify_effects_csv(path, tol);
    if (rows) *rows = rep.rows;
    if (failures) *failures = rep.failures;
    if (worst) *worst = rep.worst;
    if (rep.failures > 0) {
      throw tca::Error(tca::ErrorCode::DecompositionViolated,
                       std::to_string(rep.failures) + " of " + std::to_string(rep.rows) +
                           " rows break channel + complement = total (first at line " +
                           std::to_string(rep.first_failure) + ")");
    }
  });
}

}  // extern "C"
