#include "doctest.h"

#include "support.hpp"
#include "tca/error.hpp"
#include "tca/linalg.hpp"

using namespace tca;
using namespace tca::test;

namespace {

void check_ql(const Matrix& a) {
  const auto f = ql_decompose(a);
  const std::size_t n = a.rows();
  CHECK(max_abs_diff(f.q * f.l, a) <= 1e-10 * a.max_abs());
  CHECK(max_abs_diff(f.q.transpose() * f.q, Matrix::identity(n)) <= 1e-10);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(f.l(i, i) > 0.0);
    for (std::size_t j = i + 1; j < n; ++j) CHECK(f.l(i, j) == 0.0);
  }
}

}  // namespace

TEST_CASE("matrix construction rejects non-finite entries") {
  CHECK_THROWS_AS(Matrix::from_rows({{1.0, std::nan("")}}), Error);
  CHECK_THROWS_AS(Matrix::from_rows({{1.0, 2.0}, {3.0}}), Error);
  CHECK_THROWS_AS(Matrix::from_row_major(2, 2, {1.0, 2.0, 3.0}), Error);
}

TEST_CASE("permutation must be a bijection") {
  CHECK_THROWS_AS(Permutation({0, 0, 2}), Error);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), Error);
  const Permutation p({2, 0, 1});
  CHECK(p.position_of(2) == 0);
  CHECK(p.inverse().inverse() == p);
  const std::vector<double> y{10.0, 20.0, 30.0};
  const auto ys = p.apply(y);
  CHECK(ys == std::vector<double>{30.0, 10.0, 20.0});
  const Matrix t = p.matrix();
  const auto ty = t * std::span<const double>(y);
  CHECK(ty == ys);
  const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  CHECK(p.permute_columns(a) == a * t.transpose());
  CHECK(p.permute_rows(a) == t * a);
  CHECK(p.conjugate(a) == t * a * t.transpose());
}

TEST_CASE("QL of the identity is trivial") {
  const auto f = ql_decompose(Matrix::identity(3));
  CHECK(f.q == Matrix::identity(3));
  CHECK(f.l == Matrix::identity(3));
}

TEST_CASE("QL of a lower-triangular matrix with positive diagonal") {
  const Matrix a = Matrix::from_rows({{2.0, 0.0, 0.0}, {0.3, 1.5, 0.0}, {-0.7, 0.4, 0.9}});
  const auto f = ql_decompose(a);
  CHECK(max_abs_diff(f.q, Matrix::identity(3)) <= 1e-14);
  CHECK(max_abs_diff(f.l, a) <= 1e-14);
}

TEST_CASE("QL reconstructs the non-recursive contemporaneous matrix") {
  const auto m = three_equation_model(0.2, 0.5, 0.8, 1.5);
  const auto f = ql_decompose(m.a0);
  CHECK(max_abs_diff(f.q * f.l, m.a0) <= 1e-12);
  check_ql(m.a0);
}

TEST_CASE("QL properties on random matrices") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + uniform_index(rng, 8);
    const Matrix a = random_matrix(rng, n, n, uniform(rng, 0.1, 100.0));
    check_ql(a);
  }
}

TEST_CASE("QL is bitwise deterministic") {
  Rng rng(5);
  const Matrix a = random_matrix(rng, 6, 6, 1.0);
  const auto f1 = ql_decompose(a);
  const auto f2 = ql_decompose(a);
  CHECK(f1.q == f2.q);
  CHECK(f1.l == f2.l);
}

TEST_CASE("QL flags singular input") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}});
  CHECK_THROWS_AS(ql_decompose(a), Error);
  try {
    (void)ql_decompose(a);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
}

TEST_CASE("solve_unit_lower small cases") {
  const Matrix rhs = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(solve_unit_lower(Matrix(2, 2), rhs) == rhs);
  const double m = -0.75;
  const Matrix mm = Matrix::from_rows({{0.0, 0.0}, {m, 0.0}});
  const Matrix x = solve_unit_lower(mm, Matrix::from_rows({{1.0}, {0.0}}));
  CHECK(x(0, 0) == 1.0);
  CHECK(x(1, 0) == m);
  CHECK_THROWS_AS(solve_unit_lower(Matrix(3, 3), rhs), Error);
}

TEST_CASE("solve_unit_lower against a Gauss-Jordan inverse") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix m = random_matrix(rng, 6, 6, 1.0);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i; j < 6; ++j) m(i, j) = 0.0;
    const Matrix rhs = random_matrix(rng, 6, 3, 1.0);
    const Matrix expected = gj_inverse(Matrix::identity(6) - m) * rhs;
    CHECK(max_abs_diff(solve_unit_lower(m, rhs), expected) <= 1e-10);
  }
}

TEST_CASE("general, triangular and Cholesky solves") {
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    const Matrix a = Matrix::identity(n) + random_matrix(rng, n, n, 0.5);
    const Matrix rhs = random_matrix(rng, n, 2, 1.0);
    CHECK(max_abs_diff(solve(a, rhs), gj_inverse(a) * rhs) <= 1e-10);

    const Matrix g = random_matrix(rng, n, n, 1.0);
    const Matrix s = g * g.transpose() + Matrix::identity(n);
    const Matrix l = cholesky_lower(s);
    CHECK(max_abs_diff(l, naive_cholesky(s)) <= 1e-12);
    CHECK(max_abs_diff(solve_lower(l, rhs), gj_inverse(l) * rhs) <= 1e-10);
    const Matrix u = l.transpose();
    CHECK(max_abs_diff(solve_upper(u, rhs), gj_inverse(u) * rhs) <= 1e-10);

    double logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
    CHECK(log_det_spd(s) == doctest::Approx(logdet).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cholesky_lower(Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}})), Error);
}

TEST_CASE("Householder least squares matches normal equations") {
  Rng rng(21);
  const Matrix x = random_matrix(rng, 40, 4, 1.0);
  const Matrix y = random_matrix(rng, 40, 1, 1.0);
  const HouseholderQr qr(x);
  const Matrix beta = qr.solve(y);
  const Matrix xt = x.transpose();
  const Matrix expected = gj_inverse(xt * x) * (xt * y);
  CHECK(max_abs_diff(beta, expected) <= 1e-10);
  CHECK(max_abs_diff(qr.q_full().transpose() * qr.q_full(), Matrix::identity(40)) <= 1e-10);
}
