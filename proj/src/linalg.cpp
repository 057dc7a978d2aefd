#include "tca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tca/error.hpp"

namespace tca {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "matrix entries must be finite");
    }
  }
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {
  if (!std::isfinite(fill)) {
    throw Error(ErrorCode::InvalidArgument, "matrix entries must be finite");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(nr * nc);
  for (const auto& r : rows) {
    if (r.size() != nc) {
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
    }
    values.insert(values.end(), r.begin(), r.end());
  }
  return from_row_major(nr, nc, std::move(values));
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols,
                              std::vector<double> values) {
  if (values.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(rows * cols) + " entries, got " +
                    std::to_string(values.size()));
  }
  require_finite(values);
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.values_ = std::move(values);
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return from_row_major(values.size(), 1, {values.begin(), values.end()});
}

std::vector<double> Matrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorCode::DimensionMismatch, "block out of range");
  }
  Matrix b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
    throw Error(ErrorCode::DimensionMismatch, "block out of range");
  }
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o, "matrix addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o, "matrix subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix product: " + shape(a) + " * " + shape(b));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

// ---------------------------------------------------------------------------

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) {
      throw Error(ErrorCode::InvalidArgument, "permutation is not a bijection");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = i;
  return Permutation(std::move(m));
}

std::size_t Permutation::position_of(std::size_t original) const {
  for (std::size_t r = 0; r < map_.size(); ++r)
    if (map_[r] == original) return r;
  throw Error(ErrorCode::InvalidArgument, "index not in permutation");
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t r = 0; r < map_.size(); ++r) inv[map_[r]] = r;
  return Permutation(std::move(inv));
}

Matrix Permutation::matrix() const {
  Matrix t(size(), size());
  for (std::size_t r = 0; r < size(); ++r) t(r, map_[r]) = 1.0;
  return t;
}

Matrix Permutation::permute_columns(const Matrix& a) const {
  if (a.cols() != size()) {
    throw Error(ErrorCode::DimensionMismatch, "permute_columns");
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t r = 0; r < size(); ++r) out(i, r) = a(i, map_[r]);
  return out;
}

Matrix Permutation::permute_rows(const Matrix& a) const {
  if (a.rows() != size()) {
    throw Error(ErrorCode::DimensionMismatch, "permute_rows");
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < size(); ++r)
    for (std::size_t j = 0; j < a.cols(); ++j) out(r, j) = a(map_[r], j);
  return out;
}

Matrix Permutation::conjugate(const Matrix& a) const {
  return permute_columns(permute_rows(a));
}

std::vector<double> Permutation::apply(std::span<const double> v) const {
  if (v.size() != size()) {
    throw Error(ErrorCode::DimensionMismatch, "permutation apply");
  }
  std::vector<double> out(v.size());
  for (std::size_t r = 0; r < size(); ++r) out[r] = v[map_[r]];
  return out;
}

// ---------------------------------------------------------------------------

HouseholderQr::HouseholderQr(const Matrix& a)
    : m_(a.rows()), n_(a.cols()), packed_(a), diag_(a.cols(), 0.0),
      beta_(a.cols(), 0.0) {
  if (m_ < n_) {
    throw Error(ErrorCode::DimensionMismatch, "QR needs rows >= cols");
  }
  for (std::size_t k = 0; k < n_; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k; i < m_; ++i) norm2 += packed_(i, k) * packed_(i, k);
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) {
      diag_[k] = 0.0;
      beta_[k] = 0.0;
      for (std::size_t i = k + 1; i < m_; ++i) packed_(i, k) = 0.0;
      continue;
    }
    const double x0 = packed_(k, k);
    const double alpha = x0 >= 0.0 ? -norm : norm;
    // v = x - alpha e1, stored in place with v_0 in packed_(k,k)
    packed_(k, k) = x0 - alpha;
    double vtv = 0.0;
    for (std::size_t i = k; i < m_; ++i) vtv += packed_(i, k) * packed_(i, k);
    beta_[k] = 2.0 / vtv;
    diag_[k] = alpha;
    for (std::size_t j = k + 1; j < n_; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m_; ++i) dot += packed_(i, k) * packed_(i, j);
      const double s = beta_[k] * dot;
      for (std::size_t i = k; i < m_; ++i) packed_(i, j) -= s * packed_(i, k);
    }
  }
}

Matrix HouseholderQr::r() const {
  Matrix out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    out(i, i) = diag_[i];
    for (std::size_t j = i + 1; j < n_; ++j) out(i, j) = packed_(i, j);
  }
  return out;
}

Matrix HouseholderQr::apply_qt(const Matrix& b) const {
  if (b.rows() != m_) {
    throw Error(ErrorCode::DimensionMismatch, "apply_qt");
  }
  Matrix out = b;
  for (std::size_t k = 0; k < n_; ++k) {
    if (beta_[k] == 0.0) continue;
    for (std::size_t j = 0; j < out.cols(); ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m_; ++i) dot += packed_(i, k) * out(i, j);
      const double s = beta_[k] * dot;
      for (std::size_t i = k; i < m_; ++i) out(i, j) -= s * packed_(i, k);
    }
  }
  return out;
}

Matrix HouseholderQr::q_full() const {
  // Q = H_0 H_1 ... H_{n-1}; build by applying reflectors to I in reverse.
  Matrix q = Matrix::identity(m_);
  for (std::size_t kk = n_; kk-- > 0;) {
    if (beta_[kk] == 0.0) continue;
    for (std::size_t j = 0; j < m_; ++j) {
      double dot = 0.0;
      for (std::size_t i = kk; i < m_; ++i) dot += packed_(i, kk) * q(i, j);
      const double s = beta_[kk] * dot;
      for (std::size_t i = kk; i < m_; ++i) q(i, j) -= s * packed_(i, kk);
    }
  }
  return q;
}

double HouseholderQr::diagonal_ratio() const noexcept {
  if (n_ == 0) return 1.0;
  double lo = std::abs(diag_[0]);
  double hi = lo;
  for (double d : diag_) {
    lo = std::min(lo, std::abs(d));
    hi = std::max(hi, std::abs(d));
  }
  return hi == 0.0 ? 0.0 : lo / hi;
}

Matrix HouseholderQr::solve(const Matrix& b) const {
  const Matrix qtb = apply_qt(b);
  Matrix x(n_, b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = qtb(ii, j);
      for (std::size_t k = ii + 1; k < n_; ++k) s -= packed_(ii, k) * x(k, j);
      x(ii, j) = s / diag_[ii];
    }
  }
  return x;
}

// ---------------------------------------------------------------------------

QlFactors ql_decompose(const Matrix& a, double rel_tol) {
  if (!a.is_square()) {
    throw Error(ErrorCode::DimensionMismatch, "QL needs a square matrix, got " + shape(a));
  }
  const std::size_t k = a.rows();
  // A S reverses the column order.
  Matrix as(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) as(i, j) = a(i, k - 1 - j);

  const HouseholderQr qr(as);
  const Matrix qstar = qr.q_full();
  const Matrix r = qr.r();

  QlFactors f{Matrix(k, k), Matrix(k, k)};
  // Q = Q* S, L = S R S
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      f.q(i, j) = qstar(i, k - 1 - j);
      f.l(i, j) = r(k - 1 - i, k - 1 - j);
    }

  const double tol = rel_tol * a.max_abs();
  for (std::size_t i = 0; i < k; ++i) {
    const double d = f.l(i, i);
    if (!(std::abs(d) > tol)) {
      throw Error(ErrorCode::SingularMatrix,
                  "matrix is numerically singular (|L_" + std::to_string(i + 1) +
                      std::to_string(i + 1) + "| below tolerance)");
    }
    if (d < 0.0) {
      for (std::size_t r2 = 0; r2 < k; ++r2) f.q(r2, i) = -f.q(r2, i);
      for (std::size_t c = 0; c < k; ++c) f.l(i, c) = -f.l(i, c);
    }
  }
  return f;
}

Matrix solve_unit_lower(const Matrix& m, const Matrix& rhs) {
  if (!m.is_square() || rhs.rows() != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "solve_unit_lower: " + shape(m) + " with rhs " + shape(rhs));
  }
  const std::size_t n = m.rows();
  Matrix x = rhs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto mi = m.row(i);
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double mik = mi[k];
      if (mik == 0.0) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < x.cols(); ++j) xi[j] += mik * xk[j];
    }
  }
  return x;
}

Matrix solve_lower(const Matrix& l, const Matrix& rhs) {
  if (!l.is_square() || rhs.rows() != l.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve_lower");
  }
  const std::size_t n = l.rows();
  Matrix x = rhs;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, j);
      if (l(i, i) == 0.0) throw Error(ErrorCode::SingularMatrix, "zero pivot");
      x(i, j) = s / l(i, i);
    }
  }
  return x;
}

Matrix solve_upper(const Matrix& u, const Matrix& rhs) {
  if (!u.is_square() || rhs.rows() != u.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve_upper");
  }
  const std::size_t n = u.rows();
  Matrix x = rhs;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) s -= u(ii, k) * x(k, j);
      if (u(ii, ii) == 0.0) throw Error(ErrorCode::SingularMatrix, "zero pivot");
      x(ii, j) = s / u(ii, ii);
    }
  }
  return x;
}

Matrix solve(const Matrix& a, const Matrix& rhs, double rel_tol) {
  if (!a.is_square() || rhs.rows() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve: " + shape(a) + " with rhs " + shape(rhs));
  }
  const HouseholderQr qr(a);
  if (!(qr.diagonal_ratio() > rel_tol)) {
    throw Error(ErrorCode::SingularMatrix, "matrix is numerically singular");
  }
  return qr.solve(rhs);
}

Matrix cholesky_lower(const Matrix& s) {
  if (!s.is_square()) {
    throw Error(ErrorCode::DimensionMismatch, "cholesky needs a square matrix");
  }
  const std::size_t n = s.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "matrix is not positive definite (pivot " + std::to_string(j + 1) + ")");
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

double log_det_spd(const Matrix& s) {
  const Matrix l = cholesky_lower(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

bool is_strictly_lower(const Matrix& m) noexcept {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

bool is_lower(const Matrix& m) noexcept {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

}  // namespace tca
