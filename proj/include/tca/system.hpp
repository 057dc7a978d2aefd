#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tca/linalg.hpp"
#include "tca/model.hpp"

namespace tca {

// Transmission matrix T. Position r (0-based) holds original variable perm.at(r).
struct TransmissionOrdering {
  Permutation perm;
  std::vector<std::string> labels;  // labels in transmission order

  [[nodiscard]] std::size_t k() const noexcept { return perm.size(); }

  static TransmissionOrdering identity(const std::vector<std::string>& var_names);
  static TransmissionOrdering identity(std::size_t k);
  // `order` lists variable names; unlisted variables follow in model order.
  static TransmissionOrdering from_names(const std::vector<std::string>& var_names,
                                         const std::vector<std::string>& order);
};

inline constexpr std::size_t kSoftMaxHorizon = 200;
inline constexpr std::size_t kSoftMaxVariables = 20;

struct SystemOptions {
  bool allow_large = false;
  double singular_tol = kDefaultSingularTolerance;
};

// Throws InvalidArgument past the soft cap unless allow_large is set.
void check_system_size(std::size_t k, std::size_t h, const SystemOptions& options);

// x = B x + Omega e on the stacked grid x = (y*_t, ..., y*_{t+h}).
// Index m = t * K + r (0-based here; 1-based in the DSL and file formats).
// Omega columns are indexed by t * K + shock, shocks in model order.
struct SystemsForm {
  std::size_t k = 0;
  std::size_t h = 0;
  Matrix b;
  Matrix omega;
  TransmissionOrdering ordering;
  std::vector<std::string> shock_labels;

  [[nodiscard]] std::size_t size() const noexcept { return (h + 1) * k; }
  [[nodiscard]] std::size_t index(std::size_t t, std::size_t r) const noexcept { return t * k + r; }
};

// Structural quantities after the orthogonal rotation Q' is applied:
//   L y*_t = sum_i Abar_i y*_{t-i} + sum_j Psibar_j eta_{t-j} + eta_t.
struct CholeskyForm {
  std::size_t k = 0;
  Matrix l;                    // lower triangular, positive diagonal
  std::vector<Matrix> ar;      // Abar_i
  std::vector<Matrix> ma;      // Psibar_j
  TransmissionOrdering ordering;
};

[[nodiscard]] CholeskyForm cholesky_form(const VarmaModel& model,
                                         const TransmissionOrdering& ordering,
                                         const SystemOptions& options = {});
[[nodiscard]] CholeskyForm cholesky_form(const ReducedVar& var,
                                         const TransmissionOrdering& ordering);

// The recursive structural model whose shocks are the Cholesky shocks of the
// reduced form under `ordering` (A0 = L T, A_i = L T A_red,i).
[[nodiscard]] VarmaModel recursive_structural_model(const ReducedVar& var,
                                                    const TransmissionOrdering& ordering);

[[nodiscard]] SystemsForm make_systems_form(const VarmaModel& model,
                                            const TransmissionOrdering& ordering,
                                            std::size_t h, const SystemOptions& options = {});

// B only; it depends on (L, Abar) and nothing else.
[[nodiscard]] Matrix systems_b(const CholeskyForm& cf, std::size_t h);

// Phi = (I - B)^{-1} Omega.
[[nodiscard]] Matrix irf_total(const SystemsForm& sf);

// PhiTilde = (I - B)^{-1} OmegaTilde with diagonal blocks D and lag blocks D Psibar_j.
[[nodiscard]] Matrix cholesky_irfs(const CholeskyForm& cf, std::size_t h,
                                   const SystemOptions& options = {});
[[nodiscard]] Matrix cholesky_irfs(const VarmaModel& model, const TransmissionOrdering& ordering,
                                   std::size_t h, const SystemOptions& options = {});
[[nodiscard]] Matrix cholesky_irfs(const ReducedVar& var, const TransmissionOrdering& ordering,
                                   std::size_t h, const SystemOptions& options = {});

struct IrfSet {
  Matrix phi;
  Matrix phi_tilde;
  TransmissionOrdering ordering;
};

[[nodiscard]] IrfSet make_irf_set(const VarmaModel& model, const TransmissionOrdering& ordering,
                                  std::size_t h, const SystemOptions& options = {});

// Everything needed to decompose the effects of one shock.
struct ShockSystem {
  std::size_t k = 0;
  std::size_t h = 0;
  Matrix b;
  std::vector<double> omega_col;
  TransmissionOrdering ordering;
  std::string shock_label;

  [[nodiscard]] std::size_t size() const noexcept { return (h + 1) * k; }
  // (I - B)^{-1} omega_col
  [[nodiscard]] std::vector<double> phi_col() const;
};

[[nodiscard]] ShockSystem shock_system(const SystemsForm& sf, std::size_t shock);

// Rebuilds (B, Omega column) from the Cholesky form and the structural impact
// column of the shock (data order, length K).
[[nodiscard]] ShockSystem reconstruct_from_single_shock(const CholeskyForm& cf,
                                                        std::span<const double> impact,
                                                        std::size_t h, std::string label,
                                                        const SystemOptions& options = {});

// Column of Phi for one shock, regrouped by data order: entry t * K + v.
[[nodiscard]] std::vector<double> to_data_order(std::span<const double> system_col,
                                                const TransmissionOrdering& ordering);

}  // namespace tca
