#include "doctest.h"

#include "support.hpp"
#include "tca/condition.hpp"
#include "tca/error.hpp"
#include "tca/system.hpp"

using namespace tca;
using namespace tca::test;

namespace {

double eta_of(double a1, double a2, double a3, double a4) { return 1.0 - a1 * a2 * a4 - a1 * a3; }

void check_structure(const SystemsForm& sf, bool pure_var) {
  const std::size_t k = sf.k;
  for (std::size_t i = 0; i < sf.size(); ++i)
    for (std::size_t j = i; j < sf.size(); ++j) CHECK(sf.b(i, j) == 0.0);
  for (std::size_t bi = 0; bi <= sf.h; ++bi)
    for (std::size_t bj = 0; bj <= sf.h; ++bj) {
      if (bj < bi && !pure_var) continue;
      if (bj == bi) continue;
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) CHECK(sf.omega(bi * k + r, bj * k + c) == 0.0);
    }
}

}  // namespace

TEST_CASE("recursive three-equation model, identity ordering") {
  const double a2 = 0.5, a3 = 0.8, a4 = 1.5;
  const auto m = three_equation_model(0.0, a2, a3, a4);
  const auto sf = make_systems_form(m, TransmissionOrdering::identity(m.var_names), 0);
  const Matrix b = Matrix::from_rows({{0, 0, 0}, {a2, 0, 0}, {a3, a4, 0}});
  CHECK(max_abs_diff(sf.b, b) <= 1e-15);
  CHECK(max_abs_diff(sf.omega, Matrix::identity(3)) <= 1e-15);
  const Matrix phi = irf_total(sf);
  CHECK(phi(2, 0) == doctest::Approx(a2 * a4 + a3).epsilon(1e-14));
  CHECK(max_abs_diff(cholesky_irfs(m, sf.ordering, 0), phi) <= 1e-14);
}

TEST_CASE("non-recursive model matches the closed-form B and Omega") {
  Rng rng(1);
  std::vector<std::array<double, 4>> draws{{0.2, 0.5, 0.8, 1.5}};
  for (int i = 0; i < 50; ++i)
    draws.push_back({uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)});
  for (const auto& [a1, a2, a3, a4] : draws) {
    const double eta = eta_of(a1, a2, a3, a4);
    if (std::abs(eta) < 0.05) continue;
    const auto m = three_equation_model(a1, a2, a3, a4);
    const auto sf = make_systems_form(m, TransmissionOrdering::identity(m.var_names), 0);
    const double s1 = a1 * a1 + 1.0;
    const double s2 = a1 * a1 * (a4 * a4 + 1.0) + 1.0;
    const double w = 1.0 - a1 * (a2 * a4 + a3);
    const Matrix b = Matrix::from_rows({{0, 0, 0},
                                        {(s1 * a2 + a1 * a4 * (1.0 - a1 * a3)) / s2, 0, 0},
                                        {(a1 + a3) / s1, a4 / s1, 0}});
    const Matrix omega = Matrix::from_rows({{1.0 / w, a1 * a4 / w, a1 / w},
                                            {-a1 * a4 / s2, s1 / s2, -a1 * a1 * a4 / s2},
                                            {-a1 / s1, 0.0, 1.0 / s1}});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(rel_gap(sf.b(i, j), b(i, j)) <= 1e-12);
        CHECK(rel_gap(sf.omega(i, j), omega(i, j)) <= 1e-12);
      }
    const Matrix phi = irf_total(sf);
    CHECK(rel_gap(phi(2, 0), (a2 * a4 + a3) / eta) <= 1e-10);
    const Matrix pt = cholesky_irfs(m, sf.ordering, 0);
    CHECK(rel_gap(pt(2, 1) / pt(1, 1), a4 / s1) <= 1e-10);
  }
}

TEST_CASE("static orthonormal system") {
  VarmaModel m;
  m.a0 = Matrix::identity(3);
  const auto sf = make_systems_form(m, TransmissionOrdering::identity(3), 2);
  CHECK(sf.b == Matrix(9, 9));
  CHECK(max_abs_diff(sf.omega, Matrix::identity(9)) == 0.0);
  CHECK(irf_total(sf) == sf.omega);
}

TEST_CASE("systems form structure and the IRF identity on random VARMA models") {
  Rng rng(2);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t k = 1 + uniform_index(rng, 4);
    const std::size_t ell = uniform_index(rng, 3);
    const std::size_t q = uniform_index(rng, 2);
    const std::size_t h = uniform_index(rng, 4);
    const auto m = random_varma(rng, k, ell, q);
    const auto ord = ordering_of(random_permutation(rng, k), m.var_names);
    const auto sf = make_systems_form(m, ord, h);
    check_structure(sf, q == 0);
    const Matrix phi = irf_total(sf);
    const Matrix resid = (Matrix::identity(sf.size()) - sf.b) * phi - sf.omega;
    CHECK(resid.max_abs() <= 1e-10 * std::max(1.0, phi.max_abs()));

    // Response at t to shock i hitting at s equals the simulated IRF at t - s.
    for (std::size_t i = 0; i < k; ++i) {
      const auto y = simulate_structural_irf(m, i, h);
      for (std::size_t s = 0; s <= h; ++s)
        for (std::size_t t = s; t <= h; ++t)
          for (std::size_t r = 0; r < k; ++r)
            CHECK(rel_gap(phi(t * k + r, s * k + i), y[t - s][ord.perm.at(r)]) <= 1e-10);
    }

    const Matrix pt = cholesky_irfs(m, ord, h);
    for (std::size_t r = 0; r < k; ++r) {
      const auto y = simulate_cholesky_irf(m, ord.perm, r, h);
      for (std::size_t t = 0; t <= h; ++t)
        for (std::size_t a = 0; a < k; ++a) CHECK(rel_gap(pt(t * k + a, r), y[t][a]) <= 1e-10);
    }
    for (std::size_t bi = 0; bi <= h; ++bi)
      for (std::size_t bj = bi + 1; bj <= h; ++bj)
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t c = 0; c < k; ++c) CHECK(pt(bi * k + r, bj * k + c) == 0.0);
  }
}

TEST_CASE("IRFs of a reduced VAR match companion-form powers") {
  Rng rng(3);
  const std::size_t k = 3, h = 3;
  const ReducedVar v = random_reduced_var(rng, k, 1);
  const auto ord = ordering_of(random_permutation(rng, k), v.var_names);
  const Matrix t_mat = ord.perm.matrix();
  const Matrix p = naive_cholesky(t_mat * v.sigma_u * t_mat.transpose());

  const VarmaModel rec = recursive_structural_model(v, ord);
  const auto sf = make_systems_form(rec, ord, h);
  const Matrix phi = irf_total(sf);
  const Matrix pt = cholesky_irfs(v, ord, h);
  Matrix power = Matrix::identity(k);
  for (std::size_t t = 0; t <= h; ++t) {
    const Matrix expected = t_mat * power * t_mat.transpose() * p;
    CHECK(max_abs_diff(pt.block(t * k, 0, k, k), expected) <= 1e-10);
    // Shocks of the recursive model are in data order of its own var_names;
    // its A0 = L T places shock i on ordered position i.
    CHECK(max_abs_diff(phi.block(t * k, 0, k, k), expected) <= 1e-10);
    power = v.coefs[0] * power;
  }
}

TEST_CASE("Cholesky IRFs reject a covariance that is not positive definite") {
  ReducedVar v;
  v.p = 0;
  v.intercept = {0.0, 0.0};
  v.sigma_u = Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}});
  try {
    (void)cholesky_irfs(v, TransmissionOrdering::identity(2), 1);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

// Pure VARs: with MA terms the Cholesky shock also enters later horizons directly.
TEST_CASE("Cholesky IRF ratios equal path sums") {
  Rng rng(4);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t k = 1 + uniform_index(rng, 3);
    const std::size_t h = uniform_index(rng, 3);
    const auto m = random_varma(rng, k, uniform_index(rng, 3), 0);
    const auto ord = ordering_of(random_permutation(rng, k), m.var_names);
    const auto sf = make_systems_form(m, ord, h);
    const Matrix pt = cholesky_irfs(m, ord, h);
    for (std::size_t r = 0; r < sf.size(); ++r)
      for (std::size_t s = r; s < sf.size(); ++s)
        CHECK(rel_gap(pt(s, r) / pt(r, r), brute_node_to_node(sf.b, r, s)) <= 1e-10);
  }
}

TEST_CASE("single-shock reconstruction equals direct construction") {
  Rng rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t k = 1 + uniform_index(rng, 4);
    const std::size_t h = uniform_index(rng, 4);
    const auto m = random_varma(rng, k, uniform_index(rng, 3), uniform_index(rng, 3));
    const auto ord = ordering_of(random_permutation(rng, k), m.var_names);
    const auto sf = make_systems_form(m, ord, h);
    const auto cf = cholesky_form(m, ord);
    CHECK(max_abs_diff(systems_b(cf, h), sf.b) <= 1e-12);
    const Matrix a0inv = gj_inverse(m.a0);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> impact(k);
      for (std::size_t v = 0; v < k; ++v) impact[v] = a0inv(v, i);
      const auto sys = reconstruct_from_single_shock(cf, impact, h, "s");
      CHECK(max_abs_diff(sys.b, sf.b) <= 1e-12);
      for (std::size_t n = 0; n < sf.size(); ++n)
        CHECK(std::abs(sys.omega_col[n] - sf.omega(n, i)) <= 1e-12 * std::max(1.0, sf.omega.max_abs()));
      const auto direct = shock_system(sf, i);
      CHECK(direct.omega_col == sf.omega.col(i));
    }
  }
}

TEST_CASE("single-shock reconstruction from a reduced-form VAR") {
  Rng rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t k = 2 + uniform_index(rng, 3);
    const std::size_t p = 1 + uniform_index(rng, 2);
    const std::size_t h = 1 + uniform_index(rng, 3);
    auto m = random_varma(rng, k, p, 0);
    const Matrix a0inv = gj_inverse(m.a0);
    ReducedVar v;
    v.p = p;
    v.intercept.assign(k, 0.0);
    for (const auto& a : m.ar) v.coefs.push_back(a0inv * a);
    v.sigma_u = a0inv * a0inv.transpose();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j) v.sigma_u(i, j) = v.sigma_u(j, i);
    v.var_names = m.var_names;
    const auto ord = ordering_of(random_permutation(rng, k), m.var_names);
    const auto sf = make_systems_form(m, ord, h);
    const auto cf = cholesky_form(v, ord);
    const std::size_t i = uniform_index(rng, k);
    std::vector<double> impact(k);
    for (std::size_t r = 0; r < k; ++r) impact[r] = a0inv(r, i);
    const auto sys = reconstruct_from_single_shock(cf, impact, h, "s");
    CHECK(max_abs_diff(sys.b, sf.b) <= 1e-10);
    for (std::size_t n = 0; n < sf.size(); ++n) CHECK(std::abs(sys.omega_col[n] - sf.omega(n, i)) <= 1e-10);
  }
}

TEST_CASE("single-shock reconstruction with an orthonormal A0") {
  Rng rng(7);
  auto m = random_varma(rng, 3, 0, 2);
  m.a0 = Matrix::identity(3);
  const auto cf = cholesky_form(m, TransmissionOrdering::identity(m.var_names));
  const std::vector<double> e2{0.0, 1.0, 0.0};
  const auto sys = reconstruct_from_single_shock(cf, e2, 2, "s");
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(sys.omega_col[r] == e2[r]);
    CHECK(sys.omega_col[3 + r] == doctest::Approx(m.ma[0](r, 1)).epsilon(1e-14));
    CHECK(sys.omega_col[6 + r] == doctest::Approx(m.ma[1](r, 1)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(reconstruct_from_single_shock(cf, std::vector<double>{1.0, 0.0}, 2, "s"), Error);
}

TEST_CASE("demand-shock column alone gives the closed-form direct and indirect effects") {
  const double a1 = 0.2, a2 = 0.5, a3 = 0.8, a4 = 1.5;
  const double eta = eta_of(a1, a2, a3, a4);
  const auto m = three_equation_model(a1, a2, a3, a4);
  const auto ord = TransmissionOrdering::identity(m.var_names);
  const Matrix a0inv = gj_inverse(m.a0);
  const std::vector<double> impact{a0inv(0, 0), a0inv(1, 0), a0inv(2, 0)};
  const auto sys = reconstruct_from_single_shock(cholesky_form(m, ord), impact, 0, "demand");
  const auto table = transmission_effect(sys, parse_condition("pi_0", ord.labels, 0));
  CHECK(rel_gap(table.channel[2], a2 * a4 / ((1 + a1 * a1) * eta)) <= 1e-12);
  CHECK(rel_gap(table.complement[2], (a3 + a1 * (1 - eta)) / ((1 + a1 * a1) * eta)) <= 1e-12);
}

TEST_CASE("reorder-within-block invariance") {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + uniform_index(rng, 3);
    const std::size_t h = uniform_index(rng, 3);
    const auto m = random_varma(rng, k, uniform_index(rng, 3), uniform_index(rng, 2));
    CHECK(omega_row_reorder_gap(rng, m, h) <= 1e-10);
    CHECK(b_entry_reorder_gap(rng, m, h) <= 1e-10);
    CHECK(cholesky_column_reorder_gap(rng, m, h) <= 1e-10);
  }
}

TEST_CASE("orderings and size limits") {
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const auto o = TransmissionOrdering::from_names(names, {"c", "a"});
  CHECK(o.labels == std::vector<std::string>{"c", "a", "b", "d"});
  CHECK(o.perm.at(0) == 2);
  CHECK_THROWS_AS(TransmissionOrdering::from_names(names, {"c", "zz"}), Error);
  CHECK_THROWS_AS(TransmissionOrdering::from_names(names, {"c", "c"}), Error);

  CHECK_NOTHROW(check_system_size(20, 200, {}));
  CHECK_THROWS_AS(check_system_size(3, 201, {}), Error);
  CHECK_THROWS_AS(check_system_size(21, 2, {}), Error);
  SystemOptions big;
  big.allow_large = true;
  CHECK_NOTHROW(check_system_size(3, 201, big));

  const std::vector<double> col{1, 2, 3, 4, 5, 6};
  const auto data = to_data_order(col, TransmissionOrdering::from_names({"u", "v", "w"}, {"w", "u", "v"}));
  CHECK(data == std::vector<double>{2, 3, 1, 5, 6, 4});
}
