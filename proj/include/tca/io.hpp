#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tca/condition.hpp"
#include "tca/linalg.hpp"
#include "tca/workflow.hpp"

namespace tca {

struct DataTable {
  std::vector<std::string> names;
  Matrix values;  // rows = time
};

// Header row of names, then one comma-separated row of numbers per period.
[[nodiscard]] DataTable parse_csv(std::string_view text);
[[nodiscard]] DataTable read_csv(const std::string& path);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// Model files are JSON, either a structural VARMA
//   {K, var_names, shock_names?, ell, q, A0, A: [...], Psi: [...]}
// or a reduced-form VAR
//   {K, var_names, nobs, reduced: {p, has_intercept, intercept, coefs: [...], sigma_u}}.
// Matrices are nested rows or a flat row-major array.
[[nodiscard]] AnyModel parse_model(std::string_view json_text);
[[nodiscard]] AnyModel load_model(const std::string& path);
[[nodiscard]] std::string model_to_json(const AnyModel& model);
void save_model(const std::string& path, const AnyModel& model);

// "%.17g"
[[nodiscard]] std::string format_number(double v);

inline constexpr double kDecompositionTolerance = 1e-8;

// variable,horizon,total,channel,complement[,lower,upper]; rows by variable in
// transmission order, then horizon. Throws DecompositionViolated if a row
// breaks channel + complement = total.
[[nodiscard]] std::string format_effects_csv(const EffectTable& table,
                                             const std::vector<double>* lower = nullptr,
                                             const std::vector<double>* upper = nullptr);
void write_effects_csv(const std::string& path, const EffectTable& table,
                       const std::vector<double>* lower = nullptr,
                       const std::vector<double>* upper = nullptr);

struct VerifyReport {
  std::size_t rows = 0;
  std::size_t failures = 0;
  double worst = 0.0;            // max |channel + complement - total| / max(1, |total|)
  std::size_t first_failure = 0; // 1-based line number, 0 if none
};

[[nodiscard]] VerifyReport verify_effects_text(std::string_view csv,
                                               double tol = kDecompositionTolerance);
[[nodiscard]] VerifyReport verify_effects_csv(const std::string& path,
                                              double tol = kDecompositionTolerance);

}  // namespace tca
