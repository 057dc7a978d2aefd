#include "tca/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tca/error.hpp"

namespace tca {

namespace {

constexpr double kRankTolerance = 1e-10;

void require_k_by_k(const Matrix& m, std::size_t k, const std::string& what) {
  if (m.rows() != k || m.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch,
                what + " must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (!m.all_finite()) {
    throw Error(ErrorCode::InvalidArgument, what + " has non-finite entries");
  }
}

}  // namespace

std::string VarmaModel::shock_label(std::size_t i) const {
  if (i < shock_names.size()) return shock_names[i];
  return "eps" + std::to_string(i + 1);
}

void VarmaModel::validate() const {
  const std::size_t n = k();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "model has no variables");
  require_k_by_k(a0, n, "A0");
  for (std::size_t i = 0; i < ar.size(); ++i) require_k_by_k(ar[i], n, "A" + std::to_string(i + 1));
  for (std::size_t j = 0; j < ma.size(); ++j) require_k_by_k(ma[j], n, "Psi" + std::to_string(j + 1));
  if (!var_names.empty() && var_names.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "var_names must have K entries");
  }
  if (!shock_names.empty() && shock_names.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "shock_names must have K entries");
  }
  // Assumption on A0: nonsingular. QL reports it with the scale-relative check.
  (void)ql_decompose(a0);
}

void ReducedVar::validate() const {
  const std::size_t n = k();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "model has no variables");
  require_k_by_k(sigma_u, n, "sigma_u");
  if (coefs.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(p) + " lag matrices");
  }
  for (std::size_t i = 0; i < coefs.size(); ++i) require_k_by_k(coefs[i], n, "coefs[" + std::to_string(i) + "]");
  if (intercept.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "intercept must have K entries");
  }
  if (!var_names.empty() && var_names.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "var_names must have K entries");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(sigma_u(i, j) - sigma_u(j, i)) >
          1e-10 * std::max(1.0, sigma_u.max_abs())) {
        throw Error(ErrorCode::InvalidArgument, "sigma_u is not symmetric");
      }
}

ReducedVar estimate_var_ols(const Matrix& data, std::size_t p, bool include_intercept,
                            std::vector<std::string> names) {
  const std::size_t t_total = data.rows();
  const std::size_t k = data.cols();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "data has no columns");
  if (!data.all_finite()) throw Error(ErrorCode::InvalidArgument, "data has missing or non-finite values");
  const std::size_t n_int = include_intercept ? 1 : 0;
  const std::size_t n_reg = n_int + k * p;
  if (t_total <= p + n_reg) {
    throw Error(ErrorCode::InvalidArgument,
                "too few observations (" + std::to_string(t_total) + ") for a VAR(" +
                    std::to_string(p) + ") in " + std::to_string(k) + " variables");
  }
  if (!names.empty() && names.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "names must match data columns");
  }
  const std::size_t n_eff = t_total - p;

  Matrix x(n_eff, std::max<std::size_t>(n_reg, 0));
  Matrix y(n_eff, k);
  for (std::size_t r = 0; r < n_eff; ++r) {
    const std::size_t t = r + p;
    if (include_intercept) x(r, 0) = 1.0;
    for (std::size_t lag = 1; lag <= p; ++lag)
      for (std::size_t v = 0; v < k; ++v) x(r, n_int + (lag - 1) * k + v) = data(t - lag, v);
    for (std::size_t v = 0; v < k; ++v) y(r, v) = data(t, v);
  }

  ReducedVar out;
  out.var_names = std::move(names);
  out.p = p;
  out.has_intercept = include_intercept;
  out.intercept.assign(k, 0.0);
  out.nobs = t_total;
  out.data = data;

  Matrix beta(n_reg, k);
  Matrix xtx_inv(n_reg, n_reg);
  if (n_reg > 0) {
    const HouseholderQr qr(x);
    if (!(qr.diagonal_ratio() > kRankTolerance)) {
      throw Error(ErrorCode::RankDeficientRegressors,
                  "regressor cross-product is numerically singular");
    }
    beta = qr.solve(y);
    const Matrix r_inv = solve_upper(qr.r(), Matrix::identity(n_reg));
    xtx_inv = r_inv * r_inv.transpose();
  }

  Matrix resid = y;
  if (n_reg > 0) resid -= x * beta;
  out.residuals = resid;

  const std::size_t dof = n_eff - n_reg;
  Matrix sigma = resid.transpose() * resid;
  sigma *= 1.0 / static_cast<double>(dof);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double avg = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = avg;
      sigma(j, i) = avg;
    }
  out.sigma_u = sigma;

  if (include_intercept)
    for (std::size_t v = 0; v < k; ++v) out.intercept[v] = beta(0, v);
  for (std::size_t lag = 1; lag <= p; ++lag) {
    Matrix a(k, k);
    Matrix se(k, k);
    for (std::size_t eq = 0; eq < k; ++eq)
      for (std::size_t v = 0; v < k; ++v) {
        const std::size_t row = n_int + (lag - 1) * k + v;
        a(eq, v) = beta(row, eq);
        se(eq, v) = std::sqrt(std::max(0.0, sigma(eq, eq) * xtx_inv(row, row)));
      }
    out.coefs.push_back(std::move(a));
    out.coef_std_errors.push_back(std::move(se));
  }
  return out;
}

std::vector<Matrix> reduced_ma_coefficients(const std::vector<Matrix>& coefs, std::size_t k,
                                            std::size_t h) {
  std::vector<Matrix> theta;
  theta.reserve(h + 1);
  theta.push_back(Matrix::identity(k));
  for (std::size_t s = 1; s <= h; ++s) {
    Matrix acc(k, k);
    for (std::size_t i = 1; i <= std::min(s, coefs.size()); ++i) acc += coefs[i - 1] * theta[s - i];
    theta.push_back(std::move(acc));
  }
  return theta;
}

StructuralShockColumn first_cholesky_column(const ReducedVar& var, std::size_t horizon,
                                            double scale, std::string label) {
  const std::size_t k = var.k();
  const Matrix chol = cholesky_lower(var.sigma_u);
  const std::vector<double> impact = chol.col(0);
  const auto theta = reduced_ma_coefficients(var.coefs, k, horizon);
  StructuralShockColumn out;
  out.label = std::move(label);
  out.phi.assign((horizon + 1) * k, 0.0);
  for (std::size_t t = 0; t <= horizon; ++t) {
    const std::vector<double> resp = theta[t] * std::span<const double>(impact);
    for (std::size_t v = 0; v < k; ++v) out.phi[t * k + v] = scale * resp[v];
  }
  out.impact = scale * impact[0];
  return out;
}

StructuralShockColumn identify_internal_instrument(const ReducedVar& var,
                                                   std::size_t instrument_position,
                                                   std::size_t normalize_on, double impact,
                                                   std::size_t horizon, std::string label) {
  if (instrument_position != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "the internal instrument must be ordered first (position 1), got position " +
                    std::to_string(instrument_position));
  }
  const std::size_t k = var.k();
  if (normalize_on >= k) {
    throw Error(ErrorCode::InvalidArgument, "normalisation variable out of range");
  }
  StructuralShockColumn unit = first_cholesky_column(var, horizon, 1.0, std::move(label));
  const double base = unit.phi[normalize_on];
  const double scale_ref = std::sqrt(std::max(var.sigma_u(0, 0), 0.0));
  if (!(std::abs(base) > kZeroImpactTolerance * std::max(1.0, scale_ref))) {
    throw Error(ErrorCode::ZeroImpact,
                "impact response of the normalisation variable is zero; normalisation undefined");
  }
  const double scale = impact / base;
  for (double& v : unit.phi) v *= scale;
  unit.normalize_on = normalize_on;
  unit.impact = impact;
  // Pin the normalised entry exactly.
  unit.phi[normalize_on] = impact;
  return unit;
}

LocalProjectionResult estimate_lp_irfs(const Matrix& data, std::size_t shock_var,
                                       std::span<const std::size_t> ordered_before,
                                       std::size_t max_horizon, std::size_t lags) {
  const std::size_t t_total = data.rows();
  const std::size_t k = data.cols();
  if (shock_var >= k) throw Error(ErrorCode::InvalidArgument, "shock variable out of range");
  for (std::size_t c : ordered_before) {
    if (c >= k || c == shock_var) {
      throw Error(ErrorCode::InvalidArgument, "invalid contemporaneous control index");
    }
  }
  if (!data.all_finite()) throw Error(ErrorCode::InvalidArgument, "data has missing values");

  const std::size_t n_plain = 2 + lags * k;
  const std::size_t n_ctrl = n_plain + ordered_before.size();
  if (t_total < max_horizon + lags + 1 || t_total - max_horizon - lags <= n_ctrl) {
    throw Error(ErrorCode::InvalidArgument, "too few observations for the requested local projections");
  }

  LocalProjectionResult out;
  out.horizons = max_horizon;
  out.k = k;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.beta.assign((max_horizon + 1) * k, nan);
  out.gamma.assign((max_horizon + 1) * k, nan);

  for (std::size_t h = 0; h <= max_horizon; ++h) {
    const std::size_t n = t_total - h - lags;
    Matrix x_plain(n, n_plain);
    Matrix x_ctrl(n, n_ctrl);
    Matrix y(n, k);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t t = r + lags;
      x_plain(r, 0) = 1.0;
      x_plain(r, 1) = data(t, shock_var);
      for (std::size_t l = 1; l <= lags; ++l)
        for (std::size_t v = 0; v < k; ++v) x_plain(r, 2 + (l - 1) * k + v) = data(t - l, v);
      for (std::size_t c = 0; c < n_plain; ++c) x_ctrl(r, c) = x_plain(r, c);
      for (std::size_t c = 0; c < ordered_before.size(); ++c)
        x_ctrl(r, n_plain + c) = data(t, ordered_before[c]);
      for (std::size_t v = 0; v < k; ++v) y(r, v) = data(t + h, v);
    }
    const HouseholderQr qr_plain(x_plain);
    const HouseholderQr qr_ctrl(x_ctrl);
    if (!(qr_plain.diagonal_ratio() > kRankTolerance) ||
        !(qr_ctrl.diagonal_ratio() > kRankTolerance)) {
      out.flagged_horizons.push_back(h);
      continue;
    }
    const Matrix b_plain = qr_plain.solve(y);
    const Matrix b_ctrl = qr_ctrl.solve(y);
    for (std::size_t v = 0; v < k; ++v) {
      out.beta[h * k + v] = b_plain(1, v);
      out.gamma[h * k + v] = b_ctrl(1, v);
    }
  }
  return out;
}

Matrix generate_var_path(std::span<const double> intercept, const std::vector<Matrix>& coefs,
                         const Matrix& initial, const Matrix& innovations) {
  const std::size_t p = coefs.size();
  const std::size_t k = innovations.cols();
  if (initial.rows() != p || (p > 0 && initial.cols() != k) || intercept.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "generate_var_path: inconsistent shapes");
  }
  const std::size_t n = innovations.rows();
  Matrix y(p + n, k);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t v = 0; v < k; ++v) y(r, v) = initial(r, v);
  for (std::size_t t = p; t < p + n; ++t) {
    for (std::size_t eq = 0; eq < k; ++eq) {
      double s = intercept[eq] + innovations(t - p, eq);
      for (std::size_t lag = 1; lag <= p; ++lag) {
        const auto a = coefs[lag - 1].row(eq);
        const auto prev = y.row(t - lag);
        for (std::size_t v = 0; v < k; ++v) s += a[v] * prev[v];
      }
      y(t, eq) = s;
    }
  }
  return y;
}

}  // namespace tca
