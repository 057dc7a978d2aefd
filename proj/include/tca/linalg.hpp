#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tca {

// Dense row-major matrix of doubles. Entries handed in through the factory
// functions are checked for finiteness; arithmetic results are not rechecked.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix from_row_major(std::size_t rows, std::size_t cols,
                               std::vector<double> values);
  static Matrix column(std::span<const double> values);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return values_[r * cols_ + c];
  }

  [[nodiscard]] std::span<double> row(std::size_t r) noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::vector<double> col(std::size_t c) const;
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t nr,
                             std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix operator+(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator*(double s, Matrix a);
[[nodiscard]] std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Largest absolute elementwise difference; matrices must share a shape.
[[nodiscard]] double max_abs_diff(const Matrix& a, const Matrix& b);

// Bijection on {0..K-1}. `at(r)` is the original index placed at position r,
// i.e. y*_r = y_{at(r)} for y* = T y.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return map_.size(); }
  [[nodiscard]] std::size_t at(std::size_t position) const { return map_.at(position); }
  [[nodiscard]] std::size_t position_of(std::size_t original) const;
  [[nodiscard]] const std::vector<std::size_t>& map() const noexcept { return map_; }
  [[nodiscard]] Permutation inverse() const;

  // The permutation matrix T with (T y)_r = y_{at(r)}.
  [[nodiscard]] Matrix matrix() const;
  // A T' : column r of the result is column at(r) of a.
  [[nodiscard]] Matrix permute_columns(const Matrix& a) const;
  // T a : row r of the result is row at(r) of a.
  [[nodiscard]] Matrix permute_rows(const Matrix& a) const;
  // T a T'
  [[nodiscard]] Matrix conjugate(const Matrix& a) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> v) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

// Householder QR of an m x n matrix (m >= n). Reflectors are kept so Q'b and
// least-squares solves do not need Q formed explicitly.
class HouseholderQr {
 public:
  explicit HouseholderQr(const Matrix& a);

  [[nodiscard]] std::size_t rows() const noexcept { return m_; }
  [[nodiscard]] std::size_t cols() const noexcept { return n_; }

  [[nodiscard]] Matrix r() const;        // n x n upper triangle
  [[nodiscard]] Matrix q_full() const;   // m x m orthogonal
  [[nodiscard]] Matrix apply_qt(const Matrix& b) const;

  // min |R_ii| / max |R_ii|; zero when some column is annihilated.
  [[nodiscard]] double diagonal_ratio() const noexcept;

  // argmin ||a x - b||; callers check diagonal_ratio() first.
  [[nodiscard]] Matrix solve(const Matrix& b) const;

 private:
  std::size_t m_;
  std::size_t n_;
  Matrix packed_;                          // R above the diagonal, v below
  std::vector<double> diag_;               // R_kk
  std::vector<double> beta_;               // 2 / v'v, 0 for skipped reflectors
};

struct QlFactors {
  Matrix q;  // orthogonal
  Matrix l;  // lower triangular, strictly positive diagonal
};

inline constexpr double kDefaultSingularTolerance = 1e-12;

// A = Q L via QR of A S, S the order-reversing permutation. Throws
// SingularMatrix when some |L_ii| < rel_tol * max|A|.
[[nodiscard]] QlFactors ql_decompose(const Matrix& a,
                                     double rel_tol = kDefaultSingularTolerance);

// (I - M)^{-1} rhs for strictly lower-triangular M, by forward substitution.
[[nodiscard]] Matrix solve_unit_lower(const Matrix& m, const Matrix& rhs);

[[nodiscard]] Matrix solve_lower(const Matrix& l, const Matrix& rhs);
[[nodiscard]] Matrix solve_upper(const Matrix& u, const Matrix& rhs);

// General square solve through Householder QR.
[[nodiscard]] Matrix solve(const Matrix& a, const Matrix& rhs,
                           double rel_tol = kDefaultSingularTolerance);

// Lower Cholesky factor with positive diagonal; NotPositiveDefinite otherwise.
[[nodiscard]] Matrix cholesky_lower(const Matrix& s);

// log det of a symmetric positive definite matrix.
[[nodiscard]] double log_det_spd(const Matrix& s);

[[nodiscard]] bool is_strictly_lower(const Matrix& m) noexcept;
[[nodiscard]] bool is_lower(const Matrix& m) noexcept;

}  // namespace tca
