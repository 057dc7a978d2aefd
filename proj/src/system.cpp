#include "tca/system.hpp"

#include <algorithm>
#include <string>

#include "tca/error.hpp"

namespace tca {

namespace {

std::vector<std::string> default_names(std::size_t k) {
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back("y" + std::to_string(i + 1));
  return out;
}

Matrix diag_inverse(const Matrix& l) {
  Matrix d(l.rows(), l.cols());
  for (std::size_t i = 0; i < l.rows(); ++i) d(i, i) = 1.0 / l(i, i);
  return d;
}

void check_ordering(const TransmissionOrdering& ordering, std::size_t k) {
  if (ordering.k() != k) {
    throw Error(ErrorCode::DimensionMismatch,
                "ordering has " + std::to_string(ordering.k()) + " variables, model has " +
                    std::to_string(k));
  }
}

// Rows of a block-lower-triangular Toeplitz operator: diagonal block `diag`,
// lag-i block `lags[i-1]`.
Matrix block_toeplitz(const Matrix& diag, const std::vector<Matrix>& lags, std::size_t k,
                      std::size_t h) {
  const std::size_t n = (h + 1) * k;
  Matrix out(n, n);
  for (std::size_t t = 0; t <= h; ++t) {
    out.set_block(t * k, t * k, diag);
    for (std::size_t i = 1; i <= std::min(t, lags.size()); ++i) {
      out.set_block(t * k, (t - i) * k, lags[i - 1]);
    }
  }
  return out;
}

}  // namespace

TransmissionOrdering TransmissionOrdering::identity(const std::vector<std::string>& var_names) {
  TransmissionOrdering o;
  o.perm = Permutation::identity(var_names.size());
  o.labels = var_names;
  return o;
}

TransmissionOrdering TransmissionOrdering::identity(std::size_t k) {
  return identity(default_names(k));
}

TransmissionOrdering TransmissionOrdering::from_names(const std::vector<std::string>& var_names,
                                                      const std::vector<std::string>& order) {
  const std::size_t k = var_names.size();
  std::vector<std::size_t> map;
  std::vector<bool> used(k, false);
  for (const auto& name : order) {
    const auto it = std::find(var_names.begin(), var_names.end(), name);
    if (it == var_names.end()) {
      throw Error(ErrorCode::InvalidArgument, "unknown variable in ordering: '" + name + "'");
    }
    const auto idx = static_cast<std::size_t>(it - var_names.begin());
    if (used[idx]) {
      throw Error(ErrorCode::InvalidArgument, "variable listed twice in ordering: '" + name + "'");
    }
    used[idx] = true;
    map.push_back(idx);
  }
  for (std::size_t i = 0; i < k; ++i)
    if (!used[i]) map.push_back(i);
  TransmissionOrdering o;
  o.perm = Permutation(map);
  for (std::size_t r = 0; r < k; ++r) o.labels.push_back(var_names[map[r]]);
  return o;
}

void check_system_size(std::size_t k, std::size_t h, const SystemOptions& options) {
  if (options.allow_large) return;
  if (h > kSoftMaxHorizon || k > kSoftMaxVariables) {
    throw Error(ErrorCode::InvalidArgument,
                "system of K=" + std::to_string(k) + ", h=" + std::to_string(h) +
                    " exceeds the soft cap (h <= " + std::to_string(kSoftMaxHorizon) +
                    ", K <= " + std::to_string(kSoftMaxVariables) +
                    "); enable allow_large to override");
  }
}

CholeskyForm cholesky_form(const VarmaModel& model, const TransmissionOrdering& ordering,
                           const SystemOptions& options) {
  model.validate();
  const std::size_t k = model.k();
  check_ordering(ordering, k);
  const Matrix a0_star = ordering.perm.permute_columns(model.a0);
  const QlFactors ql = ql_decompose(a0_star, options.singular_tol);
  const Matrix qt = ql.q.transpose();

  CholeskyForm cf;
  cf.k = k;
  cf.l = ql.l;
  cf.ordering = ordering;
  for (const Matrix& a : model.ar) cf.ar.push_back(qt * ordering.perm.permute_columns(a));
  for (const Matrix& psi : model.ma) cf.ma.push_back(qt * psi * ql.q);
  return cf;
}

CholeskyForm cholesky_form(const ReducedVar& var, const TransmissionOrdering& ordering) {
  var.validate();
  const std::size_t k = var.k();
  check_ordering(ordering, k);
  const Matrix sigma_star = ordering.perm.conjugate(var.sigma_u);
  const Matrix p = cholesky_lower(sigma_star);
  CholeskyForm cf;
  cf.k = k;
  cf.l = solve_lower(p, Matrix::identity(k));
  // Exact zeros above the diagonal.
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) cf.l(i, j) = 0.0;
  cf.ordering = ordering;
  for (const Matrix& a : var.coefs) cf.ar.push_back(cf.l * ordering.perm.conjugate(a));
  return cf;
}

VarmaModel recursive_structural_model(const ReducedVar& var, const TransmissionOrdering& ordering) {
  const CholeskyForm cf = cholesky_form(var, ordering);
  const Matrix t = ordering.perm.matrix();
  const Matrix lt = cf.l * t;
  VarmaModel m;
  m.var_names = var.var_names;
  m.a0 = lt;
  for (const Matrix& a : var.coefs) m.ar.push_back(lt * a);
  for (std::size_t r = 0; r < var.k(); ++r) {
    m.shock_names.push_back("chol_" + ordering.labels[r]);
  }
  return m;
}

Matrix systems_b(const CholeskyForm& cf, std::size_t h) {
  const std::size_t k = cf.k;
  const Matrix d = diag_inverse(cf.l);
  Matrix diag = Matrix::identity(k) - d * cf.l;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) diag(i, j) = 0.0;
  std::vector<Matrix> lags;
  lags.reserve(cf.ar.size());
  for (const Matrix& a : cf.ar) lags.push_back(d * a);
  return block_toeplitz(diag, lags, k, h);
}

SystemsForm make_systems_form(const VarmaModel& model, const TransmissionOrdering& ordering,
                              std::size_t h, const SystemOptions& options) {
  check_system_size(model.k(), h, options);
  model.validate();
  const std::size_t k = model.k();
  check_ordering(ordering, k);
  const Matrix a0_star = ordering.perm.permute_columns(model.a0);
  const QlFactors ql = ql_decompose(a0_star, options.singular_tol);
  const Matrix qt = ql.q.transpose();
  const Matrix d = diag_inverse(ql.l);
  const Matrix dqt = d * qt;

  CholeskyForm cf;
  cf.k = k;
  cf.l = ql.l;
  for (const Matrix& a : model.ar) cf.ar.push_back(qt * ordering.perm.permute_columns(a));

  SystemsForm sf;
  sf.k = k;
  sf.h = h;
  sf.ordering = ordering;
  sf.b = systems_b(cf, h);
  std::vector<Matrix> ma_blocks;
  for (const Matrix& psi : model.ma) ma_blocks.push_back(dqt * psi);
  sf.omega = block_toeplitz(dqt, ma_blocks, k, h);
  for (std::size_t i = 0; i < k; ++i) sf.shock_labels.push_back(model.shock_label(i));
  return sf;
}

Matrix irf_total(const SystemsForm& sf) { return solve_unit_lower(sf.b, sf.omega); }

Matrix cholesky_irfs(const CholeskyForm& cf, std::size_t h, const SystemOptions& options) {
  check_system_size(cf.k, h, options);
  const Matrix d = diag_inverse(cf.l);
  std::vector<Matrix> ma_blocks;
  for (const Matrix& psi : cf.ma) ma_blocks.push_back(d * psi);
  const Matrix omega_tilde = block_toeplitz(d, ma_blocks, cf.k, h);
  return solve_unit_lower(systems_b(cf, h), omega_tilde);
}

Matrix cholesky_irfs(const VarmaModel& model, const TransmissionOrdering& ordering, std::size_t h,
                     const SystemOptions& options) {
  return cholesky_irfs(cholesky_form(model, ordering, options), h, options);
}

Matrix cholesky_irfs(const ReducedVar& var, const TransmissionOrdering& ordering, std::size_t h,
                     const SystemOptions& options) {
  return cholesky_irfs(cholesky_form(var, ordering), h, options);
}

IrfSet make_irf_set(const VarmaModel& model, const TransmissionOrdering& ordering, std::size_t h,
                    const SystemOptions& options) {
  IrfSet out;
  out.phi = irf_total(make_systems_form(model, ordering, h, options));
  out.phi_tilde = cholesky_irfs(model, ordering, h, options);
  out.ordering = ordering;
  return out;
}

std::vector<double> ShockSystem::phi_col() const {
  const Matrix x = solve_unit_lower(b, Matrix::column(omega_col));
  return x.col(0);
}

ShockSystem shock_system(const SystemsForm& sf, std::size_t shock) {
  if (shock >= sf.k) {
    throw Error(ErrorCode::InvalidArgument, "shock index " + std::to_string(shock + 1) +
                                                " out of range 1.." + std::to_string(sf.k));
  }
  ShockSystem s;
  s.k = sf.k;
  s.h = sf.h;
  s.b = sf.b;
  s.omega_col = sf.omega.col(shock);
  s.ordering = sf.ordering;
  s.shock_label = shock < sf.shock_labels.size() ? sf.shock_labels[shock]
                                                 : "eps" + std::to_string(shock + 1);
  return s;
}

ShockSystem reconstruct_from_single_shock(const CholeskyForm& cf, std::span<const double> impact,
                                          std::size_t h, std::string label,
                                          const SystemOptions& options) {
  const std::size_t k = cf.k;
  if (impact.size() != k) {
    throw Error(ErrorCode::InconsistentNormalization,
                "impact column has " + std::to_string(impact.size()) + " entries, expected " +
                    std::to_string(k));
  }
  check_system_size(k, h, options);
  const std::vector<double> ordered = cf.ordering.perm.apply(impact);
  // Q'_{.,i} = L (A0*)^{-1}_{.,i}
  const std::vector<double> q = cf.l * std::span<const double>(ordered);

  ShockSystem s;
  s.k = k;
  s.h = h;
  s.b = systems_b(cf, h);
  s.ordering = cf.ordering;
  s.shock_label = std::move(label);
  s.omega_col.assign((h + 1) * k, 0.0);
  for (std::size_t r = 0; r < k; ++r) s.omega_col[r] = q[r] / cf.l(r, r);
  for (std::size_t j = 1; j <= std::min(h, cf.ma.size()); ++j) {
    const std::vector<double> v = cf.ma[j - 1] * std::span<const double>(q);
    for (std::size_t r = 0; r < k; ++r) s.omega_col[j * k + r] = v[r] / cf.l(r, r);
  }
  return s;
}

std::vector<double> to_data_order(std::span<const double> system_col,
                                  const TransmissionOrdering& ordering) {
  const std::size_t k = ordering.k();
  if (k == 0 || system_col.size() % k != 0) {
    throw Error(ErrorCode::DimensionMismatch, "column length is not a multiple of K");
  }
  std::vector<double> out(system_col.size());
  for (std::size_t t = 0; t < system_col.size() / k; ++t)
    for (std::size_t r = 0; r < k; ++r) out[t * k + ordering.perm.at(r)] = system_col[t * k + r];
  return out;
}

}  // namespace tca
