#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "ximod/coeffs.hpp"
#include "ximod/errors.hpp"
#include "ximod/moments.hpp"
#include "ximod/xi.hpp"

using namespace ximod;

namespace {

double xi_half_closed() {
  return -0.125 * std::pow(std::numbers::pi, -0.25) * boost::math::tgamma(0.25) * boost::math::zeta(0.5);
}

}  // namespace

TEST_SUITE("xi") {
  TEST_CASE("prefactor zeros give exactly one half") {
    const XiValue<double> z = xi_direct<double>({0, 0}, 1e-12);
    const XiValue<double> o = xi_direct<double>({1, 0}, 1e-12);
    CHECK(z.value.re == 0.5);
    CHECK(z.value.im == 0.0);
    CHECK(o.value.re == 0.5);
    CHECK(o.value.im == 0.0);
  }

  TEST_CASE("real axis against Gamma and zeta") {
    const XiValue<double> h = xi_direct<double>({0.5, 0}, 1e-13);
    CHECK(h.value.re == doctest::Approx(xi_half_closed()).epsilon(1e-12));
    CHECK(h.value.re == doctest::Approx(0.497121).epsilon(1e-6));
    CHECK(std::abs(h.value.im) <= 1e-13);
    for (double s : {0.7, 2.0, 3.5}) {
      CHECK(xi_direct<double>({s, 0}, 1e-13).value.re == doctest::Approx(oracle::xi_real(s)).epsilon(1e-11));
    }
    CHECK(xi_direct<double>({2, 0}, 1e-13).value.re == doctest::Approx(std::numbers::pi / 6).epsilon(1e-12));
  }

  TEST_CASE("xi is real on the critical line and symmetric") {
    const XiValue<double> a = xi_direct<double>({0.5, 10}, 1e-12);
    CHECK(std::abs(a.value.im) <= 1e-12);
    const XiValue<double> b = xi_direct<double>({0.8, 3}, 1e-12);
    const XiValue<double> c = xi_direct<double>({0.2, -3}, 1e-12);
    CHECK(b.value.re == doctest::Approx(c.value.re).epsilon(1e-11));
    CHECK(b.value.im == doctest::Approx(c.value.im).epsilon(1e-11));
  }

  TEST_CASE("F_direct special values and evenness") {
    const Estimate<double> f00 = F_direct<double>(0, 0, 1e-13);
    CHECK(f00.value == doctest::Approx(4 * xi_half_closed() * xi_half_closed()).epsilon(1e-12));
    const double f = F_direct<double>(0.3, 5, 1e-13).value;
    CHECK(F_direct<double>(0.3, -5, 1e-13).value == doctest::Approx(f).epsilon(1e-12));
    CHECK(F_direct<double>(-0.3, 5, 1e-13).value == doctest::Approx(f).epsilon(1e-12));
  }

  TEST_CASE("first zero on the critical line") {
    const double at_zero = F_direct<double>(0, 14.1347251417, 1e-14).value;
    const double ref = F_direct<double>(0, 14, 1e-14).value;
    CHECK(at_zero < 1e-10 * ref);
  }

  TEST_CASE("theta-kernel representation against the direct value") {
    for (auto [tau, t] : {std::pair{0.3, 5.0}, std::pair{0.1, 14.1347251417}, std::pair{0.45, 0.5}}) {
      const MomentTable<double> table = build_moment_table<double>(tau, 0, 1e-13);
      const Estimate<double> lhs = F_direct<double>(tau, t, 1e-12);
      const Estimate<double> rhs = F_rhs<double>(tau, t, table, 1e-12);
      CHECK(std::abs(lhs.value - rhs.value) <= 1e-8 * (1 + std::abs(lhs.value)));
    }
  }

  TEST_CASE("t = 0 reductions") {
    const MomentTable<double> table = build_moment_table<double>(0.3, 0, 1e-13);
    const double tau = 0.3;
    const double jp = table.one_dim.Jplus.value;
    const double expect = std::pow(1 + (tau * tau - 0.25) * jp, 2);
    CHECK(F_rhs<double>(tau, 0, table, 1e-13).value == doctest::Approx(expect).epsilon(1e-11));
    const Estimate<double> a0 = coeff_a0(table);
    CHECK(dF_dtau<double>(tau, 0, table, a0, 1e-13).value == doctest::Approx(a0.value).epsilon(1e-10));
  }

  TEST_CASE("closed-form derivative against central differences") {
    const double tau = 0.3, t = 5, h = 1e-4;
    const MomentTable<double> table = build_moment_table<double>(tau, 0, 1e-14);
    const double d = dF_dtau<double>(tau, t, table, coeff_a0(table), 1e-13).value;
    const double fd = (F_direct<double>(tau + h, t, 1e-15).value - F_direct<double>(tau - h, t, 1e-15).value) / (2 * h);
    CHECK(d == doctest::Approx(fd).epsilon(1e-5));
  }

  TEST_CASE("derivative is non-negative at tau = 1/2") {
    const MomentTable<double> table = build_moment_table<double>(0.5, 0, 1e-13);
    const Estimate<double> a0 = coeff_a0(table);
    for (double t : {0.0, 2.0, 5.0, 10.0}) {
      const Estimate<double> d = dF_dtau<double>(0.5, t, table, a0, 1e-12);
      CHECK(d.value + d.err >= 0);
    }
  }

  TEST_CASE("table for another tau is rejected") {
    const MomentTable<double> table = build_moment_table<double>(0.3, 0, 1e-10);
    CHECK_THROWS_AS(F_rhs<double>(0.2, 1, table, 1e-10), DomainError);
  }
}
