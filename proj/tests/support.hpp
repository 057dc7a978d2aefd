#pragma once

// Independent oracles and random instance generators shared by the tests.
// Nothing here calls the library's solvers or its path/condition machinery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "tca/condition.hpp"
#include "tca/linalg.hpp"
#include "tca/model.hpp"
#include "tca/system.hpp"

namespace tca::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(rng, -scale, scale);
  return m;
}

// Gauss-Jordan with partial pivoting.
inline Matrix gj_inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix w = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(w(r, c)) > std::abs(w(piv, c))) piv = r;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(w(c, j), w(piv, j));
      std::swap(inv(c, j), inv(piv, j));
    }
    const double d = w(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      w(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = w(r, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        w(r, j) -= f * w(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

// Cholesky-Banachiewicz, lower factor.
inline Matrix naive_cholesky(const Matrix& s) {
  const std::size_t n = s.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = s(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = i == j ? std::sqrt(sum) : sum / l(j, j);
    }
  return l;
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Random structural VARMA with a well-conditioned A0.
inline VarmaModel random_varma(Rng& rng, std::size_t k, std::size_t ell, std::size_t q) {
  VarmaModel m;
  m.a0 = Matrix::identity(k) + random_matrix(rng, k, k, 0.6);
  for (std::size_t i = 0; i < ell; ++i) m.ar.push_back(random_matrix(rng, k, k, 0.5));
  for (std::size_t j = 0; j < q; ++j) m.ma.push_back(random_matrix(rng, k, k, 0.5));
  for (std::size_t i = 0; i < k; ++i) m.var_names.push_back("v" + std::to_string(i + 1));
  return m;
}

inline Permutation random_permutation(Rng& rng, std::size_t k) {
  std::vector<std::size_t> map(k);
  for (std::size_t i = 0; i < k; ++i) map[i] = i;
  std::shuffle(map.begin(), map.end(), rng);
  return Permutation(map);
}

inline TransmissionOrdering ordering_of(const Permutation& p, const std::vector<std::string>& names) {
  TransmissionOrdering o;
  o.perm = p;
  for (std::size_t r = 0; r < p.size(); ++r) o.labels.push_back(names[p.at(r)]);
  return o;
}

// Shuffles positions in [lo, hi) of an ordering map, leaving others in place.
inline Permutation shuffle_block(Rng& rng, const Permutation& p, std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> map = p.map();
  if (hi > lo + 1) std::shuffle(map.begin() + static_cast<std::ptrdiff_t>(lo),
                                map.begin() + static_cast<std::ptrdiff_t>(hi), rng);
  return Permutation(map);
}

// Response of y (data order) at horizons 0..h to a unit structural shock i at
// time 0, by direct recursion A0 y_t = sum A_i y_{t-i} + Psi_t e_i.
inline std::vector<std::vector<double>> simulate_structural_irf(const VarmaModel& m, std::size_t i,
                                                                std::size_t h) {
  const std::size_t k = m.k();
  const Matrix a0inv = gj_inverse(m.a0);
  std::vector<std::vector<double>> y(h + 1, std::vector<double>(k, 0.0));
  for (std::size_t t = 0; t <= h; ++t) {
    std::vector<double> rhs(k, 0.0);
    for (std::size_t lag = 1; lag <= std::min(t, m.ar.size()); ++lag)
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) rhs[r] += m.ar[lag - 1](r, c) * y[t - lag][c];
    if (t == 0) rhs[i] += 1.0;
    else if (t <= m.ma.size())
      for (std::size_t r = 0; r < k; ++r) rhs[r] += m.ma[t - 1](r, i);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) y[t][r] += a0inv(r, c) * rhs[c];
  }
  return y;
}

// Cholesky-shock IRFs in transmission order for a structural model: the
// reduced innovation u* = (A0 T')^{-1} e has covariance S; shock r enters as
// e_0 = A0 T' chol(S) e_r.
inline std::vector<std::vector<double>> simulate_cholesky_irf(const VarmaModel& m,
                                                              const Permutation& perm,
                                                              std::size_t r, std::size_t h) {
  const std::size_t k = m.k();
  const Matrix a0s = perm.permute_columns(m.a0);
  const Matrix a0s_inv = gj_inverse(a0s);
  const Matrix p = naive_cholesky(a0s_inv * a0s_inv.transpose());
  const Matrix eps0_m = a0s * p;
  std::vector<double> eps0(k);
  for (std::size_t i = 0; i < k; ++i) eps0[i] = eps0_m(i, r);
  std::vector<std::vector<double>> y(h + 1, std::vector<double>(k, 0.0));
  for (std::size_t t = 0; t <= h; ++t) {
    std::vector<double> rhs(k, 0.0);
    for (std::size_t lag = 1; lag <= std::min(t, m.ar.size()); ++lag) {
      const Matrix as = perm.permute_columns(m.ar[lag - 1]);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t c = 0; c < k; ++c) rhs[a] += as(a, c) * y[t - lag][c];
    }
    if (t == 0) {
      for (std::size_t a = 0; a < k; ++a) rhs[a] += eps0[a];
    } else if (t <= m.ma.size()) {
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t c = 0; c < k; ++c) rhs[a] += m.ma[t - 1](a, c) * eps0[c];
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t c = 0; c < k; ++c) y[t][a] += a0s_inv(a, c) * rhs[c];
  }
  return y;
}

// Brute-force path sums: every strictly increasing node chain is generated
// from subsets, no graph search.
struct BrutePath {
  std::vector<std::size_t> nodes;
  double coefficient;
};

inline std::vector<BrutePath> brute_paths(const Matrix& b, const std::vector<double>& omega,
                                          std::size_t target) {
  std::vector<BrutePath> out;
  const std::size_t below = target;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << below); ++mask) {
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < below; ++v)
      if (mask & (std::uint64_t{1} << v)) nodes.push_back(v);
    nodes.push_back(target);
    double c = omega[nodes.front()];
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) c *= b(nodes[i + 1], nodes[i]);
    if (c != 0.0) out.push_back({nodes, c});
  }
  return out;
}

// Sum over all B-paths from node `from` to node `to` (unit start).
inline double brute_node_to_node(const Matrix& b, std::size_t from, std::size_t to) {
  if (to < from) return 0.0;
  if (to == from) return 1.0;
  double sum = 0.0;
  const std::size_t inner = to - from - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
    std::vector<std::size_t> nodes{from};
    for (std::size_t v = 0; v < inner; ++v)
      if (mask & (std::uint64_t{1} << v)) nodes.push_back(from + 1 + v);
    nodes.push_back(to);
    double c = 1.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) c *= b(nodes[i + 1], nodes[i]);
    sum += c;
  }
  return sum;
}

// Truth value of a condition on a path's node set.
inline bool holds(const Expr& e, const std::vector<std::size_t>& nodes) {
  switch (e.kind) {
    case Expr::Kind::True: return true;
    case Expr::Kind::False: return false;
    case Expr::Kind::Var: return std::find(nodes.begin(), nodes.end(), e.index) != nodes.end();
    case Expr::Kind::Not: return !holds(e.args.front(), nodes);
    case Expr::Kind::And:
      return std::all_of(e.args.begin(), e.args.end(), [&](const Expr& a) { return holds(a, nodes); });
    case Expr::Kind::Or:
      return std::any_of(e.args.begin(), e.args.end(), [&](const Expr& a) { return holds(a, nodes); });
  }
  return false;
}

inline Expr random_expr(Rng& rng, std::size_t n, int depth) {
  const double u = uniform(rng, 0.0, 1.0);
  if (depth <= 0 || u < 0.3) return Expr::var(uniform_index(rng, n));
  if (u < 0.45) return Expr::negate(random_expr(rng, n, depth - 1));
  std::vector<Expr> args;
  const std::size_t arity = 2 + uniform_index(rng, 2);
  for (std::size_t i = 0; i < arity; ++i) args.push_back(random_expr(rng, n, depth - 1));
  return u < 0.72 ? Expr::all_of(std::move(args)) : Expr::any_of(std::move(args));
}

// Brute-force channel effect of a condition on target j.
inline double oracle_channel(const Matrix& b, const std::vector<double>& omega, const Expr& cond,
                             std::size_t target, double xi = 1.0) {
  double sum = 0.0;
  for (const auto& p : brute_paths(b, omega, target))
    if (holds(cond, p.nodes)) sum += p.coefficient;
  return xi * sum;
}

// The three-equation model; variables (x, pi, i).
inline VarmaModel three_equation_model(double a1, double a2, double a3, double a4) {
  VarmaModel m;
  m.var_names = {"x", "pi", "i"};
  m.shock_names = {"demand", "supply", "monetary"};
  m.a0 = Matrix::from_rows({{1.0, 0.0, -a1}, {-a2, 1.0, 0.0}, {-a3, -a4, 1.0}});
  return m;
}

// Stable random reduced-form VAR.
inline ReducedVar random_reduced_var(Rng& rng, std::size_t k, std::size_t p) {
  ReducedVar v;
  v.p = p;
  v.intercept.assign(k, 0.0);
  for (std::size_t i = 0; i < p; ++i) v.coefs.push_back(random_matrix(rng, k, k, 0.4 / static_cast<double>(p * k)));
  const Matrix g = random_matrix(rng, k, k, 1.0);
  v.sigma_u = g * g.transpose() + Matrix::identity(k);
  for (std::size_t i = 0; i < k; ++i) v.var_names.push_back("v" + std::to_string(i + 1));
  return v;
}

inline Matrix standard_normals(Rng& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

// Reorder-within-block invariance checks. Each returns the largest gap
// between the original and the reordered construction at remapped indices.

inline double omega_row_reorder_gap(Rng& rng, const VarmaModel& m, std::size_t h) {
  const std::size_t k = m.k();
  const Permutation base = random_permutation(rng, k);
  const std::size_t r = uniform_index(rng, k);
  Permutation moved = shuffle_block(rng, base, 0, r);
  moved = shuffle_block(rng, moved, r + 1, k);
  const auto sf0 = make_systems_form(m, ordering_of(base, m.var_names), h);
  const auto sf1 = make_systems_form(m, ordering_of(moved, m.var_names), h);
  double gap = 0.0;
  for (std::size_t t = 0; t <= h; ++t)
    for (std::size_t n = 0; n < sf0.size(); ++n)
      gap = std::max(gap, std::abs(sf0.omega(t * k + r, n) - sf1.omega(t * k + r, n)));
  return gap;
}

inline double b_entry_reorder_gap(Rng& rng, const VarmaModel& m, std::size_t h) {
  const std::size_t k = m.k();
  const Permutation base = random_permutation(rng, k);
  const std::size_t r = uniform_index(rng, k);
  const std::size_t c = uniform_index(rng, k);
  Permutation moved = base;
  if (c < r) {
    moved = shuffle_block(rng, moved, 0, c + 1);
    moved = shuffle_block(rng, moved, c + 1, r);
    moved = shuffle_block(rng, moved, r + 1, k);
  } else {
    moved = shuffle_block(rng, moved, 0, r);
    if (c > r) moved = shuffle_block(rng, moved, r + 1, c);
    moved = shuffle_block(rng, moved, std::max(r, c) + 1, k);
  }
  const std::size_t c_new = moved.position_of(base.at(c));
  const auto sf0 = make_systems_form(m, ordering_of(base, m.var_names), h);
  const auto sf1 = make_systems_form(m, ordering_of(moved, m.var_names), h);
  double gap = 0.0;
  for (std::size_t t = 0; t <= h; ++t)
    for (std::size_t s = 0; s <= t; ++s)
      gap = std::max(gap, std::abs(sf0.b(t * k + r, s * k + c) - sf1.b(t * k + r, s * k + c_new)));
  return gap;
}

inline double cholesky_column_reorder_gap(Rng& rng, const VarmaModel& m, std::size_t h) {
  const std::size_t k = m.k();
  const Permutation base = random_permutation(rng, k);
  const std::size_t c = uniform_index(rng, k);
  Permutation moved = shuffle_block(rng, base, 0, c);
  moved = shuffle_block(rng, moved, c + 1, k);
  const Matrix p0 = cholesky_irfs(m, ordering_of(base, m.var_names), h);
  const Matrix p1 = cholesky_irfs(m, ordering_of(moved, m.var_names), h);
  double gap = 0.0;
  for (std::size_t s = 0; s <= h; ++s)
    for (std::size_t t = 0; t <= h; ++t)
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t r_new = moved.position_of(base.at(r));
        gap = std::max(gap, std::abs(p0(t * k + r, s * k + c) - p1(t * k + r_new, s * k + c)));
      }
  return gap;
}

}  // namespace tca::test
