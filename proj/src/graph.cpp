#include "tca/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "tca/error.hpp"

namespace tca {

namespace {

bool edge(double v, double tol) { return std::abs(v) > tol; }

void check_system(const Matrix& b, std::span<const double> omega_col, std::size_t target) {
  if (!b.is_square() || b.rows() != omega_col.size()) {
    throw Error(ErrorCode::DimensionMismatch, "B and the Omega column disagree in size");
  }
  if (target >= b.rows()) {
    throw Error(ErrorCode::InvalidArgument, "target x" + std::to_string(target + 1) +
                                                " outside 1.." + std::to_string(b.rows()));
  }
}

// H(k) = 2^k - 1 (0-based node n contributes H(n) in the index sum).
std::size_t h_of(std::size_t k) { return (std::size_t{1} << k) - 1; }

void check_target(std::size_t target) {
  if (target + 1 > kMaxAssignmentTarget) {
    throw Error(ErrorCode::TargetTooLarge,
                "assignment vectors are limited to targets x1..x" +
                    std::to_string(kMaxAssignmentTarget) + ", got x" + std::to_string(target + 1));
  }
}

double assignment_recurse(const Matrix& b, std::span<const double> omega_col,
                          std::span<const double> v, std::size_t j) {
  // j is 0-based; v has length 2^j.
  double out = omega_col[j] * v[h_of(j)];
  for (std::size_t k = 0; k < j; ++k) {
    const double w = b(j, k);
    if (w == 0.0) continue;
    out += w * assignment_recurse(b, omega_col, v.subspan(h_of(k), std::size_t{1} << k), k);
  }
  return out;
}

}  // namespace

double count_paths(const Matrix& b, std::span<const double> omega_col, std::size_t target,
                   double zero_tol) {
  check_system(b, omega_col, target);
  std::vector<double> count(target + 1, 0.0);
  for (std::size_t j = 0; j <= target; ++j) {
    double c = edge(omega_col[j], zero_tol) ? 1.0 : 0.0;
    for (std::size_t s = 0; s < j; ++s)
      if (edge(b(j, s), zero_tol)) c += count[s];
    count[j] = c;
  }
  return count[target];
}

std::vector<Path> enumerate_paths(const Matrix& b, std::span<const double> omega_col,
                                  std::size_t shock, std::size_t target,
                                  const PathOptions& options) {
  const double n = count_paths(b, omega_col, target, options.zero_tol);
  if (n > static_cast<double>(options.max_paths)) {
    throw Error(ErrorCode::PathExplosion,
                "x" + std::to_string(target + 1) + " is reached by about " +
                    std::to_string(static_cast<long double>(n)) + " paths, above the cap of " +
                    std::to_string(options.max_paths));
  }
  std::vector<Path> out;
  out.reserve(static_cast<std::size_t>(n));

  // Depth-first from the target backwards; nodes are collected reversed.
  std::vector<std::size_t> stack{target};
  auto emit = [&](double coef) {
    Path p;
    p.shock = shock;
    p.nodes.assign(stack.rbegin(), stack.rend());
    p.coefficient = coef;
    out.push_back(std::move(p));
  };
  auto visit = [&](auto&& self, std::size_t node, double coef) -> void {
    if (edge(omega_col[node], options.zero_tol)) emit(coef * omega_col[node]);
    for (std::size_t s = 0; s < node; ++s) {
      const double w = b(node, s);
      if (!edge(w, options.zero_tol)) continue;
      stack.push_back(s);
      self(self, s, coef * w);
      stack.pop_back();
    }
  };
  visit(visit, target, 1.0);

  std::sort(out.begin(), out.end(),
            [](const Path& a, const Path& c) { return a.nodes < c.nodes; });
  return out;
}

std::vector<Path> enumerate_paths(const SystemsForm& sf, std::size_t shock, std::size_t target,
                                  const PathOptions& options) {
  if (shock >= sf.omega.cols()) throw Error(ErrorCode::InvalidArgument, "shock out of range");
  const std::vector<double> col = sf.omega.col(shock);
  return enumerate_paths(sf.b, col, shock, target, options);
}

double total_path_effect(std::span<const Path> paths, double xi) {
  if (paths.empty()) return 0.0;
  const std::size_t shock = paths.front().shock;
  const std::size_t target = paths.front().target();
  double sum = 0.0;
  for (const Path& p : paths) {
    if (p.nodes.empty() || p.shock != shock || p.target() != target) {
      throw Error(ErrorCode::MixedEndpoints, "paths do not share origin and target");
    }
    sum += p.coefficient;
  }
  return xi * sum;
}

std::string format_path(const Path& path) {
  std::string s = "eps[" + std::to_string(path.shock + 1) + "]";
  for (std::size_t n : path.nodes) s += " -> x" + std::to_string(n + 1);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (coef = %.17g)", path.coefficient);
  return s + buf;
}

AssignmentVector AssignmentVector::zeros(std::size_t target) { return filled(target, 0.0); }

AssignmentVector AssignmentVector::filled(std::size_t target, double xi) {
  check_target(target);
  AssignmentVector a;
  a.target = target;
  a.entries.assign(std::size_t{1} << target, xi);
  return a;
}

std::size_t assignment_index(const Path& path) {
  if (path.nodes.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  check_target(path.target());
  std::size_t index = h_of(path.nodes.front());
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) index += h_of(path.nodes[i]);
  return index;
}

std::vector<std::size_t> assignment_chain(std::size_t target, std::size_t index) {
  check_target(target);
  if (index >= (std::size_t{1} << target)) {
    throw Error(ErrorCode::InvalidArgument, "assignment index out of range");
  }
  std::vector<std::size_t> reversed;
  std::size_t j = target;
  while (index != h_of(j)) {
    // Block of node k spans [H(k), H(k+1)).
    std::size_t k = 0;
    while (h_of(k + 1) <= index) ++k;
    reversed.push_back(k);
    index -= h_of(k);
    j = k;
  }
  return {reversed.rbegin(), reversed.rend()};
}

AssignmentVector assignment_from_paths(std::size_t target, std::span<const Path> paths,
                                       double xi) {
  AssignmentVector a = AssignmentVector::zeros(target);
  for (const Path& p : paths) {
    if (p.target() != target) throw Error(ErrorCode::MixedEndpoints, "path ends elsewhere");
    a.entries[assignment_index(p)] = xi;
  }
  return a;
}

double assignment_effect(const Matrix& b, std::span<const double> omega_col,
                         const AssignmentVector& assignment) {
  const std::size_t j = assignment.target;
  check_target(j);
  check_system(b, omega_col, j);
  if (assignment.entries.size() != (std::size_t{1} << j)) {
    throw Error(ErrorCode::DimensionMismatch, "assignment vector must have 2^(j-1) entries");
  }
  double xi = 0.0;
  for (double v : assignment.entries) {
    if (v == 0.0) continue;
    if (xi == 0.0) xi = v;
    if (v != xi) {
      throw Error(ErrorCode::InvalidArgument, "assignment entries must all be 0 or a common xi");
    }
  }
  return assignment_recurse(b, omega_col, assignment.entries, j);
}

double assignment_effect(const SystemsForm& sf, std::size_t shock,
                         const AssignmentVector& assignment) {
  if (shock >= sf.omega.cols()) throw Error(ErrorCode::InvalidArgument, "shock out of range");
  const std::vector<double> col = sf.omega.col(shock);
  return assignment_effect(sf.b, col, assignment);
}

}  // namespace tca
