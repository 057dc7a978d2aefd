#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tca/linalg.hpp"
#include "tca/system.hpp"

namespace tca {

// Boolean formula over system variables. Var indices are 0-based system
// indices; And/Or are n-ary and keep operand order.
struct Expr {
  enum class Kind { True, False, Var, Not, And, Or };

  Kind kind = Kind::True;
  std::size_t index = 0;
  std::vector<Expr> args;

  static Expr truth() { return {}; }
  static Expr falsity() { return {Kind::False, 0, {}}; }
  static Expr var(std::size_t m) { return {Kind::Var, m, {}}; }
  static Expr negate(Expr e) { return {Kind::Not, 0, {std::move(e)}}; }
  static Expr all_of(std::vector<Expr> args) { return {Kind::And, 0, std::move(args)}; }
  static Expr any_of(std::vector<Expr> args) { return {Kind::Or, 0, std::move(args)}; }

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct TransmissionCondition {
  Expr root;
  std::string text;
};

// Grammar:
//   expr  := or
//   or    := and ('|' and)*
//   and   := unary ('&' unary)*
//   unary := '!' unary | atom
//   atom  := IDENT '_' UINT | 'x' UINT | 'true' | 'false' | '(' expr ')'
// `labels` are the variable names in transmission order; name_t resolves to
// t * K + position. Raw x<m> is 1-based.
[[nodiscard]] TransmissionCondition parse_condition(std::string_view text,
                                                    const std::vector<std::string>& labels,
                                                    std::size_t h);

// Canonical text using raw x<m> atoms; reparses to the same tree.
[[nodiscard]] std::string to_string(const Expr& e);

// "name_t0 | name_t0+1 | ... | name_t1"
[[nodiscard]] std::string any_horizon(std::string_view name, std::size_t first, std::size_t last);

// coefficient * Q(AND required AND NOT forbidden); both sets sorted, disjoint.
struct ConjunctionTerm {
  std::int64_t coefficient = 1;
  std::vector<std::size_t> required;
  std::vector<std::size_t> forbidden;

  friend bool operator==(const ConjunctionTerm&, const ConjunctionTerm&) = default;
};

enum class ExpansionMethod {
  InclusionExclusion,  // Or via Q(a|b) = Q(a) + Q(b) - Q(a&b)
  DisjointDnf,         // DNF, then sum of disjoint products
};

inline constexpr std::size_t kDefaultTermCap = 1'000'000;

// Terms sorted by (required, forbidden); identical terms merged; zero and
// contradictory terms dropped.
[[nodiscard]] std::vector<ConjunctionTerm> expand_terms(
    const Expr& cond, ExpansionMethod method = ExpansionMethod::InclusionExclusion,
    std::size_t cap = kDefaultTermCap);

// Explicit edge deletion for one term: returns (Bbar, Omegabar).
struct DeletedSystem {
  Matrix b;
  std::vector<double> omega_col;
};
[[nodiscard]] DeletedSystem delete_edges(const Matrix& b, std::span<const double> omega_col,
                                         const ConjunctionTerm& term);

// xi (I - Bbar)^{-1} Omegabar for every target at once, with the per-target
// literal rule applied: a target j gets 0 if some required k > j or if
// k = j is forbidden; a required k = j is satisfied; forbidden k > j is
// vacuous. The term's coefficient is not applied.
[[nodiscard]] std::vector<double> effect_by_edge_deletion(const Matrix& b,
                                                       std::span<const double> omega_col,
                                                       const ConjunctionTerm& term,
                                                       double xi = 1.0);

struct EffectTable {
  std::string shock_label;
  std::string condition;
  std::size_t k = 0;
  std::size_t h = 0;
  std::vector<std::string> labels;  // transmission order
  double xi = 1.0;
  // Indexed by system index m = t * K + r.
  std::vector<double> total;
  std::vector<double> channel;
  std::vector<double> complement;

  [[nodiscard]] std::size_t size() const noexcept { return total.size(); }
};

struct EffectOptions {
  double xi = 1.0;
  ExpansionMethod method = ExpansionMethod::InclusionExclusion;
  std::size_t term_cap = kDefaultTermCap;
  unsigned threads = 1;  // 0: default_thread_count()
};

[[nodiscard]] EffectTable transmission_effect(const ShockSystem& sys,
                                              const TransmissionCondition& cond,
                                              const EffectOptions& options = {});

inline constexpr std::size_t kMaxForbiddenRecursion = 20;

// Channel effect from IRFs alone. phi_col is the shock's structural IRF column
// and phi_tilde the Cholesky IRF matrix, both in system indexing; only the
// ratios phi_tilde(s, r) / phi_tilde(r, r) are used. Exact for VAR models;
// MA terms let a Cholesky shock bypass its own variable at later horizons.
[[nodiscard]] EffectTable effect_from_irfs(std::span<const double> phi_col,
                                           const Matrix& phi_tilde,
                                           const TransmissionCondition& cond,
                                           std::size_t k, const EffectOptions& options = {});

// Largest |channel + complement - total| relative to max(1, |total|).
[[nodiscard]] double decomposition_gap(const EffectTable& table);

}  // namespace tca
