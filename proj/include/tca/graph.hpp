#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tca/linalg.hpp"
#include "tca/system.hpp"

namespace tca {

// A path eps_shock -> x_{nodes[0]} -> ... -> x_{nodes.back()}; node indices
// are 0-based system indices and strictly increasing.
struct Path {
  std::size_t shock = 0;
  std::vector<std::size_t> nodes;
  double coefficient = 0.0;

  [[nodiscard]] std::size_t target() const { return nodes.back(); }
};

struct PathOptions {
  double zero_tol = 0.0;                  // edges with |coef| <= zero_tol are skipped
  std::size_t max_paths = 10'000'000;
};

// Exhaustive enumeration of shock -> target paths. Paths come out in
// lexicographic order of their node sequences.
[[nodiscard]] std::vector<Path> enumerate_paths(const Matrix& b, std::span<const double> omega_col,
                                                std::size_t shock, std::size_t target,
                                                const PathOptions& options = {});
[[nodiscard]] std::vector<Path> enumerate_paths(const SystemsForm& sf, std::size_t shock,
                                                std::size_t target,
                                                const PathOptions& options = {});

// Number of paths, without materialising them (double to survive overflow).
[[nodiscard]] double count_paths(const Matrix& b, std::span<const double> omega_col,
                                 std::size_t target, double zero_tol = 0.0);

// xi * sum_p prod_{edges in p} coefficient. Empty set gives 0.
[[nodiscard]] double total_path_effect(std::span<const Path> paths, double xi = 1.0);

// "eps[i] -> x12 -> x17 (coef = ...)", indices 1-based.
[[nodiscard]] std::string format_path(const Path& path);

inline constexpr std::size_t kMaxAssignmentTarget = 24;

// Entries indexed by chains into the 1-based target j = target + 1;
// length 2^(j-1), every entry 0 or xi.
struct AssignmentVector {
  std::size_t target = 0;
  std::vector<double> entries;

  static AssignmentVector zeros(std::size_t target);
  static AssignmentVector filled(std::size_t target, double xi);
};

// Position of a path inside the assignment vector of its target.
[[nodiscard]] std::size_t assignment_index(const Path& path);

// Inverse of assignment_index: the intermediate nodes (0-based, increasing)
// of the chain stored at `index` for `target`.
[[nodiscard]] std::vector<std::size_t> assignment_chain(std::size_t target, std::size_t index);

// Assignment vector switching on exactly the given paths.
[[nodiscard]] AssignmentVector assignment_from_paths(std::size_t target,
                                                     std::span<const Path> paths, double xi);

// Potential-outcome effect of the assignment on x_target.
[[nodiscard]] double assignment_effect(const Matrix& b, std::span<const double> omega_col,
                                       const AssignmentVector& assignment);
[[nodiscard]] double assignment_effect(const SystemsForm& sf, std::size_t shock,
                                       const AssignmentVector& assignment);

}  // namespace tca
