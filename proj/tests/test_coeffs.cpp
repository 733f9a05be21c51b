#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ximod/coeffs.hpp"
#include "ximod/errors.hpp"
#include "ximod/moments.hpp"
#include "ximod/xi.hpp"

using namespace ximod;

namespace {

const MomentTable<double>& table_at(double tau) {
  static std::map<double, MomentTable<double>> cache;
  auto it = cache.find(tau);
  if (it == cache.end()) it = cache.emplace(tau, build_moment_table<double>(tau, 6, 1e-12)).first;
  return it->second;
}

double fact(int m) { return std::tgamma(m + 1.0); }

// a_tau(k), k >= 2, written out term by term from raw moment values.
double a_k_reassembled(const MomentTable<double>& t, int k) {
  const double tau = t.tau, p = 0.25 - tau * tau, q = 0.25 + tau * tau;
  double sum = 0;
  sum += -tau / (fact(2 * k - 2) * std::pow(2.0, 2 * k - 5)) * t.s(2 * k - 2).value;
  sum += -tau * p / (fact(2 * k) * std::pow(2.0, 2 * k - 3)) * t.s(2 * k).value;
  sum += 1 / (fact(2 * k - 4) * std::pow(2.0, 2 * k - 4)) * t.a(2 * k - 4).value;
  sum += -q / (fact(2 * k - 2) * std::pow(2.0, 2 * k - 3)) * t.a(2 * k - 2).value;
  sum += p * p / (fact(2 * k) * std::pow(2.0, 2 * k)) * t.a(2 * k).value;
  return (k % 2 == 0 ? 1 : -1) * sum;
}

double trail_odd_reassembled(const MomentTable<double>& t, int n) {
  const double tau = t.tau, p = 0.25 - tau * tau, q = 0.25 + tau * tau;
  return tau / (fact(4 * n - 4) * std::pow(2.0, 4 * n - 7)) * t.s(4 * n - 4).value +
         tau * p / (fact(4 * n - 2) * std::pow(2.0, 4 * n - 5)) * t.s(4 * n - 2).value -
         1 / (fact(4 * n - 6) * std::pow(2.0, 4 * n - 6)) * t.a(4 * n - 6).value +
         q / (fact(4 * n - 4) * std::pow(2.0, 4 * n - 5)) * t.a(4 * n - 4).value;
}

}  // namespace

TEST_SUITE("coeffs") {
  TEST_CASE("factorials") {
    CHECK(factorial<double>(0) == 1);
    CHECK(factorial<double>(5) == 120);
    CHECK(factorial<double>(16) == 20922789888000.0);
    CHECK(to_double(factorial<Float128>(20)) == 2432902008176640000.0);
  }

  TEST_CASE("constant coefficient") {
    const MomentTable<double> z = build_moment_table<double>(0.0, 2, 1e-12);
    const Estimate<double> a00 = coeff_a0(z);
    CHECK(std::abs(a00.value) <= 10 * a00.err + 1e-14);
    for (double tau : {0.1, 0.25, 0.4}) {
      const MomentTable<double> t = build_moment_table<double>(tau, 2, 1e-12);
      const Estimate<double> a0 = coeff_a0(t);
      CHECK(a0.value - a0.err > 0);
      const double p = 0.25 - tau * tau;
      const double product = (1 - p * t.one_dim.Jplus.value) *
                             (4 * tau * t.one_dim.Jplus.value - p * t.one_dim.JminusLog.value);
      CHECK(a0.value == doctest::Approx(product).epsilon(1e-14));
    }
    double sigma = 0;
    for (int n = 1; n < 6; ++n) sigma += std::exp(-2 * std::numbers::pi * n * n);
    const Estimate<double> second = coeff_a0_second_factor(table_at(0.3));
    CHECK(second.value - second.err > 0.3 / 4 * 7.176026 * sigma);
  }

  TEST_CASE("higher coefficients against term-by-term reassembly") {
    const MomentTable<double>& t = table_at(0.3);
    for (int k = 2; k <= 3; ++k) {
      CHECK(coeff_a(t, k).value == doctest::Approx(a_k_reassembled(t, k)).epsilon(1e-13));
    }
    const MomentTable<double>& q = table_at(0.25);
    CHECK(coeff_trail_odd(q, 2).value == doctest::Approx(trail_odd_reassembled(q, 2)).epsilon(1e-13));
  }

  TEST_CASE("definitional differences between the two coefficient families") {
    const MomentTable<double>& q = table_at(0.25);
    const double p25 = 0.25 - 0.25 * 0.25;
    const double d1 = coeff_trail_odd(q, 1).value - coeff_a(q, 1).value;
    CHECK(d1 == doctest::Approx(p25 * p25 / 8 * q.a(2).value).epsilon(1e-11));

    const MomentTable<double>& t = table_at(0.3);
    const double p3 = 0.25 - 0.09;
    const double d2 = coeff_trail_odd(t, 2).value - coeff_a(t, 3).value;
    CHECK(d2 == doctest::Approx(p3 * p3 / (fact(6) * std::pow(2.0, 6)) * t.a(6).value).epsilon(1e-9));
  }

  TEST_CASE("leading coefficient") {
    const MomentTable<double>& t = table_at(0.3);
    CHECK(coeff_trail_even(t, 1).value == t.a(0).value);
    CHECK(coeff_trail_even(t, 2).value == doctest::Approx(t.a(4).value / (fact(4) * 16)).epsilon(1e-15));
    double prev = 0;
    for (double tau : {0.1, 0.3, 0.5}) {
      const Estimate<double> e = coeff_trail_even(build_moment_table<double>(tau, 2, 1e-12), 1);
      CHECK(e.value - e.err > prev);
      prev = e.value + e.err;
    }
  }

  TEST_CASE("tau = 0 collapses every coefficient") {
    const MomentTable<double> z = build_moment_table<double>(0.0, 6, 1e-12);
    for (int k = 1; k <= 2; ++k) {
      const Estimate<double> a = coeff_a(z, k);
      CHECK(std::abs(a.value) <= 10 * a.err + 1e-14);
    }
    for (int n = 1; n <= 2; ++n) {
      const Estimate<double> o = coeff_trail_odd(z, n);
      const Estimate<double> e = coeff_trail_even(z, n);
      CHECK(std::abs(o.value) <= 10 * o.err + 1e-14);
      CHECK(std::abs(e.value) <= 10 * e.err + 1e-14);
    }
  }

  TEST_CASE("polynomial layout") {
    const MomentTable<double>& t = table_at(0.3);
    const EvenPolynomial<double> f1 = build_f(t, 1);
    REQUIRE(f1.c.size() == 3);
    CHECK(f1.degree_t() == 4);
    CHECK(f1.c[0].value == coeff_a0(t).value);
    CHECK(f1.c[1].value == coeff_trail_odd(t, 1).value);
    CHECK(f1.c[2].value == coeff_trail_even(t, 1).value);
    const EvenPolynomial<double> f2 = build_f(t, 2);
    REQUIRE(f2.c.size() == 5);
    CHECK(f2.c[1].value == coeff_a(t, 1).value);
    CHECK(f2.c[2].value == coeff_a(t, 2).value);
    CHECK(f2.c[3].value == coeff_trail_odd(t, 2).value);
    CHECK(f2.c[4].value == coeff_trail_even(t, 2).value);
    const double s = 4;
    CHECK(f1.eval_s(s) == doctest::Approx(f1.c[0].value + f1.c[1].value * s + f1.c[2].value * s * s));
  }

  TEST_CASE("truncated polynomial dominates the derivative") {
    const MomentTable<double>& t = table_at(0.3);
    const EvenPolynomial<double> f = build_f(t, 1);
    const double s = 4;
    const Estimate<double> d = dF_dtau<double>(0.3, 2, t, coeff_a0(t), 1e-12);
    CHECK(f.eval_s(s) - f.err_at_s(s) > d.value + d.err);
  }

  TEST_CASE("positive for tau at or beyond one half") {
    for (double tau : {0.5, 0.75, 1.0}) {
      const MomentTable<double> t = build_moment_table<double>(tau, 6, 1e-12);
      for (int n = 1; n <= 2; ++n) {
        const EvenPolynomial<double> f = build_f(t, n);
        for (double tt : {0.0, 1.0, 3.0, 10.0, 30.0}) CHECK(f.eval_s(tt * tt) > f.err_at_s(tt * tt));
      }
    }
  }

  TEST_CASE("capacity and argument errors") {
    const MomentTable<double> t = build_moment_table<double>(0.3, 2, 1e-10);
    CHECK_THROWS_AS(coeff_a(t, 2), CapacityError);
    CHECK_THROWS_AS(build_f(t, 2), CapacityError);
    CHECK_THROWS_AS(coeff_a(t, 0), DomainError);
    CHECK_NOTHROW(build_f(t, 1));
  }
}
