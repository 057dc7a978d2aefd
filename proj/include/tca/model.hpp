#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tca/linalg.hpp"

namespace tca {

// Structural VARMA:  A0 y_t = sum_i A_i y_{t-i} + sum_j Psi_j e_{t-j} + e_t
struct VarmaModel {
  std::vector<std::string> var_names;
  std::vector<std::string> shock_names;  // empty: "eps1".."epsK"
  Matrix a0;
  std::vector<Matrix> ar;
  std::vector<Matrix> ma;

  [[nodiscard]] std::size_t k() const noexcept { return a0.rows(); }
  [[nodiscard]] std::size_t ell() const noexcept { return ar.size(); }
  [[nodiscard]] std::size_t q() const noexcept { return ma.size(); }
  [[nodiscard]] std::string shock_label(std::size_t i) const;

  // Shapes, finiteness and a nonsingular A0. Throws on violation.
  void validate() const;
};

// Reduced-form VAR:  y_t = c + sum_i A_i y_{t-i} + u_t,  Var(u_t) = sigma_u
struct ReducedVar {
  std::vector<std::string> var_names;
  std::size_t p = 0;
  bool has_intercept = true;
  std::vector<double> intercept;   // K, zeros when has_intercept is false
  std::vector<Matrix> coefs;       // p matrices, K x K
  Matrix sigma_u;                  // K x K
  std::size_t nobs = 0;            // rows of the data used in estimation

  // Only populated by estimate_var_ols.
  Matrix residuals;                // (nobs - p) x K
  Matrix data;                     // nobs x K
  std::vector<Matrix> coef_std_errors;

  [[nodiscard]] std::size_t k() const noexcept { return sigma_u.rows(); }
  void validate() const;
};

// Impulse responses of one identified structural shock, data order,
// entry index = horizon * K + variable.
struct StructuralShockColumn {
  std::string label;
  std::vector<double> phi;
  std::size_t normalize_on = 0;
  double impact = 1.0;

  [[nodiscard]] std::span<const double> impact_column(std::size_t k) const {
    return std::span<const double>(phi).first(k);
  }
};

[[nodiscard]] ReducedVar estimate_var_ols(const Matrix& data, std::size_t p,
                                          bool include_intercept = true,
                                          std::vector<std::string> names = {});

// Theta_0 = I, Theta_h = sum_{i=1}^{min(h,p)} A_i Theta_{h-i}.
[[nodiscard]] std::vector<Matrix> reduced_ma_coefficients(const std::vector<Matrix>& coefs,
                                                          std::size_t k, std::size_t h);

inline constexpr double kZeroImpactTolerance = 1e-12;

// The instrument must be the first variable. The structural column is the
// response to the first Cholesky shock of sigma_u, rescaled so that
// variable `normalize_on` moves by `impact` on impact.
[[nodiscard]] StructuralShockColumn identify_internal_instrument(
    const ReducedVar& var, std::size_t instrument_position, std::size_t normalize_on,
    double impact, std::size_t horizon, std::string label = "instrument");

// Same recipe without the rescaling step fixed by the data: multiplies the
// first Cholesky column by `scale`. Used when a normalisation is frozen.
[[nodiscard]] StructuralShockColumn first_cholesky_column(const ReducedVar& var,
                                                          std::size_t horizon,
                                                          double scale,
                                                          std::string label);

struct LocalProjectionResult {
  std::size_t horizons = 0;                  // H, grid is 0..H
  std::size_t k = 0;
  // (H+1) x K; NaN where the horizon was rank deficient.
  std::vector<double> beta;                  // lags-only regressions
  std::vector<double> gamma;                 // adding contemporaneous controls
  std::vector<std::size_t> flagged_horizons;

  [[nodiscard]] double beta_at(std::size_t h, std::size_t i) const { return beta[h * k + i]; }
  [[nodiscard]] double gamma_at(std::size_t h, std::size_t i) const { return gamma[h * k + i]; }
};

inline constexpr std::size_t kDefaultLpLags = 4;

// Per horizon h and target i:
//   y_{i,t+h} = a + beta  y_{s,t} + lags(y)                         (beta)
//   y_{i,t+h} = a + gamma y_{s,t} + sum_{c in before} d_c y_{c,t} + lags(y)  (gamma)
[[nodiscard]] LocalProjectionResult estimate_lp_irfs(const Matrix& data, std::size_t shock_var,
                                                     std::span<const std::size_t> ordered_before,
                                                     std::size_t max_horizon,
                                                     std::size_t lags = kDefaultLpLags);

// Recursively generates y_t = c + sum A_i y_{t-i} + u_t. The first p rows of
// the result are `initial`; innovations supply the remaining rows.
[[nodiscard]] Matrix generate_var_path(std::span<const double> intercept,
                                       const std::vector<Matrix>& coefs,
                                       const Matrix& initial, const Matrix& innovations);

}  // namespace tca
