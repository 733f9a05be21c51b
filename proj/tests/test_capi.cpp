// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ximod/ximod.h"

namespace {

struct Ctx {
  ximod_context* p{nullptr};
  Ctx() { REQUIRE(ximod_context_new(&p) == XIMOD_OK); }
  ~Ctx() { ximod_context_free(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  ximod_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and null handling") {
  CHECK(std::strlen(ximod_version()) > 0);
  CHECK(ximod_context_new(nullptr) == XIMOD_E_ARGUMENT);
  CHECK(std::string(ximod_last_error()).find("null") != std::string::npos);
  ximod_context_free(nullptr);
  ximod_table_free(nullptr);
  ximod_poly_free(nullptr);
  ximod_string_free(nullptr);
}

TEST_CASE("context validation maps to status codes") {
  Ctx c;
  CHECK(ximod_context_set_tol(c.p, -1) == XIMOD_E_DOMAIN);
  CHECK(ximod_context_set_digits(c.p, 0) == XIMOD_E_DOMAIN);
  CHECK(ximod_context_set_tol(c.p, 1e-11) == XIMOD_OK);
  CHECK(std::string(ximod_last_error()).empty());
}

TEST_CASE("psi and xi") {
  Ctx c;
  ximod_estimate e{};
  int terms = 0;
  REQUIRE(ximod_psi(c.p, 1.0, &e, &terms) == XIMOD_OK);
  CHECK(e.value == doctest::Approx(0.0432174).epsilon(1e-6));
  CHECK(terms >= 1);
  CHECK(ximod_psi(c.p, -1.0, &e, nullptr) == XIMOD_E_DOMAIN);
  double b = 0;
  REQUIRE(ximod_psi_tail_bound(1.0, 1, &b) == XIMOD_OK);
  CHECK(b <= 4e-6);
  double re = 0, im = 0, err = 0;
  REQUIRE(ximod_xi(c.p, 0.5, 0, &re, &im, &err) == XIMOD_OK);
  CHECK(re == doctest::Approx(0.497121).epsilon(1e-6));
  REQUIRE(ximod_F_direct(c.p, 0, 0, &e) == XIMOD_OK);
  CHECK(e.value == doctest::Approx(4 * re * re).epsilon(1e-10));
}

TEST_CASE("tables, identity and polynomial operations") {
  Ctx c;
  ximod_table* t = nullptr;
  REQUIRE(ximod_table_build(c.p, 0.3, 6, 0, &t) == XIMOD_OK);
  ximod_estimate s0{}, a8{};
  REQUIRE(ximod_table_S(t, 0, &s0) == XIMOD_OK);
  CHECK(s0.value > 0);
  CHECK(ximod_table_A(t, 8, &a8) == XIMOD_E_CAPACITY);
  ximod_estimate od[5];
  REQUIRE(ximod_table_one_dim(t, od) == XIMOD_OK);
  CHECK(od[0].value < 0.04525351);

  ximod_estimate fr{}, fd{};
  REQUIRE(ximod_F_rhs(c.p, t, 5, &fr) == XIMOD_OK);
  REQUIRE(ximod_F_direct(c.p, 0.3, 5, &fd) == XIMOD_OK);
  CHECK(std::abs(fr.value - fd.value) <= 1e-8 * (1 + fd.value));
  ximod_estimate d0{};
  REQUIRE(ximod_dF_dtau(c.p, t, 0, &d0) == XIMOD_OK);
  CHECK(d0.value > 0);

  char* js = nullptr;
  REQUIRE(ximod_table_json(t, &js) == XIMOD_OK);
  const auto tj = nlohmann::json::parse(take(js));
  CHECK(tj["S"].size() == 4);

  ximod_poly* p = nullptr;
  CHECK(ximod_poly_build(t, 3, &p) == XIMOD_E_CAPACITY);
  REQUIRE(ximod_poly_build(t, 2, &p) == XIMOD_OK);
  int count = 0;
  REQUIRE(ximod_poly_coeffs(p, nullptr, 0, &count) == XIMOD_OK);
  CHECK(count == 5);
  ximod_estimate small[2];
  CHECK(ximod_poly_coeffs(p, small, 2, &count) == XIMOD_E_ARGUMENT);
  ximod_estimate cs[5];
  REQUIRE(ximod_poly_coeffs(p, cs, 5, &count) == XIMOD_OK);
  CHECK(cs[4].value > 0);
  ximod_estimate v{};
  REQUIRE(ximod_poly_eval(p, 0, &v) == XIMOD_OK);
  CHECK(v.value == cs[0].value);

  int n_real = -1, n_distinct = -1, stable = -1;
  REQUIRE(ximod_poly_count(c.p, p, XIMOD_COUNT_STURM, &n_real, &n_distinct, &stable) == XIMOD_OK);
  CHECK(n_real == 0);
  CHECK(n_distinct == 8);
  int h_real = -1;
  REQUIRE(ximod_poly_count(c.p, p, XIMOD_COUNT_HERMITE, &h_real, nullptr, nullptr) == XIMOD_OK);
  CHECK(h_real == n_real);

  double disc = 0;
  char* exact = nullptr;
  REQUIRE(ximod_poly_discriminant(c.p, p, &disc, &exact) == XIMOD_OK);
  CHECK(std::string(exact).find('/') != std::string::npos);
  ximod_string_free(exact);

  double s_min = -1, val = 0, err = 0;
  int flagged = -1;
  REQUIRE(ximod_poly_min(p, &s_min, &val, &err, &flagged) == XIMOD_OK);
  CHECK(val > 10 * err);
  CHECK(flagged == 0);

  char* cj = nullptr;
  REQUIRE(ximod_poly_coeffs_json(p, &cj) == XIMOD_OK);
  const auto j = nlohmann::json::parse(take(cj));
  CHECK(j["a"].size() == 3);
  CHECK(j.contains("errs"));

  ximod_poly_free(p);
  ximod_table_free(t);
}

TEST_CASE("closed discriminant and self test") {
  double d = 0;
  REQUIRE(ximod_discriminant_biquadratic(2, 3, 1, &d) == XIMOD_OK);
  CHECK(d == 32);
  int agree = 0;
  char* rep = nullptr;
  REQUIRE(ximod_poly_selftest(50, 3, &agree, &rep) == XIMOD_OK);
  CHECK(agree == 50);
  CHECK(nlohmann::json::parse(take(rep))["pass"].get<bool>());
}

TEST_CASE("scan through the C interface") {
  Ctx c;
  ximod_context_set_record_timing(c.p, 0);
  char* out = nullptr;
  char* summary = nullptr;
  REQUIRE(ximod_scan(c.p, R"({"tau_list":[0.2,0.3],"n_list":[1],"format":"jsonl"})", &out, &summary) == XIMOD_OK);
  const std::string text = take(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  const auto s = nlohmann::json::parse(take(summary));
  CHECK(s["positive"] == 2);
  CHECK(ximod_scan(c.p, "{bad", &out, nullptr) == XIMOD_E_ARGUMENT);
  CHECK(ximod_scan(c.p, R"({"format":"xml"})", &out, nullptr) == XIMOD_E_ARGUMENT);
  CHECK(ximod_scan(c.p, R"({"n_list":[]})", &out, nullptr) == XIMOD_E_DOMAIN);
}

TEST_CASE("verify through the C interface") {
  Ctx c;
  char* rep = nullptr;
  int pass = 0;
  REQUIRE(ximod_verify(c.p, "theta", nullptr, &rep, &pass) == XIMOD_OK);
  CHECK(pass == 1);
  ximod_string_free(rep);
  REQUIRE(ximod_verify(c.p, "thm1", R"({"s0_scale":1.01,"tau_list":[0.3],"t_list":[1]})", &rep, &pass) == XIMOD_OK);
  CHECK(pass == 0);
  ximod_string_free(rep);
  CHECK(ximod_verify(c.p, "nope", nullptr, &rep, &pass) == XIMOD_E_DOMAIN);
}
