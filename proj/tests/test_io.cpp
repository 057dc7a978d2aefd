#include "doctest.h"

#include <filesystem>

#include "support.hpp"
#include "tca/error.hpp"
#include "tca/io.hpp"

using namespace tca;
using namespace tca::test;

namespace {

ErrorCode model_error(const std::string& text) {
  try {
    (void)parse_model(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

EffectTable small_table() {
  EffectTable t;
  t.k = 2;
  t.h = 1;
  t.labels = {"a", "b"};
  t.total = {1.0, 2.0, 3.0, 4.0};
  t.channel = {0.25, 0.5, 1.0 / 3.0, 0.0};
  for (std::size_t i = 0; i < 4; ++i) t.complement.push_back(t.total[i] - t.channel[i]);
  return t;
}

}  // namespace

TEST_CASE("CSV parsing") {
  const auto d = parse_csv("a, b\n1,2\r\n3.5,-4e-1\n\n");
  CHECK(d.names == std::vector<std::string>{"a", "b"});
  REQUIRE(d.values.rows() == 2);
  CHECK(d.values(1, 0) == 3.5);
  CHECK(d.values(1, 1) == -0.4);
  CHECK_THROWS_AS(parse_csv(""), Error);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), Error);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), Error);
  CHECK_THROWS_AS(parse_csv("a,b\n1,\n"), Error);
  CHECK_THROWS_AS(parse_csv("a,,c\n1,2,3\n"), Error);
  try {
    (void)read_csv("/nonexistent/dir/data.csv");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("structural model files") {
  const auto any = parse_model(R"({"K":2,"var_names":["u","v"],"ell":1,"q":0,
      "A0":[1,0,0.5,1],"A":[[[0.1,0],[0,0.2]]],"Psi":[]})");
  const auto& m = std::get<VarmaModel>(any);
  CHECK(m.a0(1, 0) == 0.5);
  CHECK(m.ar[0](1, 1) == 0.2);
  CHECK(m.shock_label(1) == "eps2");

  CHECK(model_error(R"({"K":2,"A0":[[1,0],[0]]})") != ErrorCode::Io);
  CHECK(model_error(R"({"K":2,"A0":[[1,0],[0,1]],"A":[[[1,2,3]]]})") != ErrorCode::Io);
  CHECK(model_error(R"({"K":2,"A0":[[1,1],[1,1]]})") == ErrorCode::SingularMatrix);
  CHECK(model_error(R"({"K":2,"A0":[[1,0],[0,1]],"ell":2,"A":[]})") == ErrorCode::InvalidArgument);
  CHECK(model_error("{not json") == ErrorCode::InvalidArgument);
  CHECK(model_error(R"({"K":2,"var_names":["a"],"A0":[[1,0],[0,1]]})") != ErrorCode::Io);
}

TEST_CASE("reduced model files round-trip byte for byte") {
  Rng rng(1);
  const Matrix data = standard_normals(rng, 120, 3);
  const ReducedVar v = estimate_var_ols(data, 2, true, {"a", "b", "c"});
  const std::string first = model_to_json(v);
  const std::string second = model_to_json(parse_model(first));
  CHECK(first == second);
  const auto back = std::get<ReducedVar>(parse_model(first));
  CHECK(back.coefs[1] == v.coefs[1]);
  CHECK(back.sigma_u == v.sigma_u);
  CHECK(back.intercept == v.intercept);
  CHECK(back.nobs == 120);

  const auto vm = random_varma(rng, 3, 2, 1);
  const std::string s1 = model_to_json(vm);
  CHECK(model_to_json(parse_model(s1)) == s1);

  const auto dir = std::filesystem::temp_directory_path() / "tca_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "m.json").string();
  save_model(path, v);
  CHECK(read_file(path) == first);
}

TEST_CASE("effects CSV formatting and verification") {
  const EffectTable t = small_table();
  const std::string csv = format_effects_csv(t);
  CHECK(csv ==
        "variable,horizon,total,channel,complement\n"
        "a,0,1,0.25,0.75\n"
        "a,1,3,0.33333333333333331,2.6666666666666665\n"
        "b,0,2,0.5,1.5\n"
        "b,1,4,0,4\n");
  const auto rep = verify_effects_text(csv);
  CHECK(rep.rows == 4);
  CHECK(rep.failures == 0);

  const std::vector<double> lo{0, 1, 2, 3}, hi{1, 2, 3, 4};
  const std::string banded = format_effects_csv(t, &lo, &hi);
  CHECK(banded.starts_with("variable,horizon,total,channel,complement,lower,upper\na,0,1,0.25,0.75,0,1\n"));
  CHECK(verify_effects_text(banded).failures == 0);

  EffectTable bad = t;
  bad.channel[2] += 1e-3;
  try {
    (void)format_effects_csv(bad);
    FAIL("expected DecompositionViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DecompositionViolated);
  }

  const auto broken = verify_effects_text("variable,horizon,total,channel,complement\nx,0,1,0.5,0.5\nx,1,1,0.5,0.6\n");
  CHECK(broken.failures == 1);
  CHECK(broken.first_failure == 3);
  CHECK(broken.worst == doctest::Approx(0.1));
  CHECK_THROWS_AS((void)verify_effects_text("a,b\n1,2\n"), Error);
}

TEST_CASE("numbers print with 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-2.0) == "-2");
  const double x = 1.0 / 7.0;
  CHECK(std::stod(format_number(x)) == x);
}
