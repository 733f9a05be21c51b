#include "ximod/coeffs.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "ximod/errors.hpp"

namespace ximod {

namespace {

template <class Real>
void require_order(const MomentTable<Real>& table, int order, const char* what) {
  if (table.j_max < order) {
    throw CapacityError(std::string(what) + " needs moments up to order " + std::to_string(order) +
                        ", table holds " + std::to_string(table.j_max));
  }
}

// 1 / (m! 2^e)
template <class Real>
Real inv_weight(int m, int e) {
  using std::ldexp;
  return ldexp(Real(1) / factorial<Real>(m), -e);
}

}  // namespace

template <class Real>
Real EvenPolynomial<Real>::eval_s(Real s) const {
  Real acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + it->value;
  return acc;
}

template <class Real>
Real EvenPolynomial<Real>::err_at_s(Real s) const {
  using std::abs;
  Real acc = 0;
  const Real as = abs(s);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * as + it->err;
  return acc;
}

template <class Real>
Real factorial(int m) {
  if (m < 0) throw DomainError("factorial of a negative integer");
  if (m <= 20) {
    std::uint64_t f = 1;
    for (int i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
    return Real(f);
  }
  Real f = factorial<Real>(20);
  for (int i = 21; i <= m; ++i) f *= i;
  return f;
}

template <class Real>
Estimate<Real> coeff_a0_second_factor(const MomentTable<Real>& table) {
  const Real tau = table.tau;
  const Real p = Real(0.25) - tau * tau;
  return (4 * tau) * table.one_dim.Jplus - p * table.one_dim.JminusLog;
}

template <class Real>
Estimate<Real> coeff_a0(const MomentTable<Real>& table) {
  const Real tau = table.tau;
  const Real p = Real(0.25) - tau * tau;
  const Estimate<Real> first = Estimate<Real>{Real(1), Real(0)} - p * table.one_dim.Jplus;
  return first * coeff_a0_second_factor(table);
}

template <class Real>
Estimate<Real> coeff_a(const MomentTable<Real>& table, int k) {
  if (k < 1) throw DomainError("coeff_a: k must be >= 1 (use coeff_a0 for k = 0)");
  require_order(table, 2 * k, "coeff_a");
  const Real tau = table.tau;
  const Real p = Real(0.25) - tau * tau;
  const Real q = Real(0.25) + tau * tau;
  const auto& od = table.one_dim;
  if (k == 1) {
    return (8 * tau) * table.s(0) + (tau * p) * table.s(2) + (2 * q) * table.a(0) -
           (p * p / 8) * table.a(2) - Real(2) * od.I2 - od.I3;
  }
  const Real sign = (k % 2 == 0) ? Real(1) : Real(-1);
  // (2k-4)! is 0! = 1 at k = 2.
  const Estimate<Real> bracket =
      (-tau * inv_weight<Real>(2 * k - 2, 2 * k - 5)) * table.s(2 * k - 2) -
      (tau * p * inv_weight<Real>(2 * k, 2 * k - 3)) * table.s(2 * k) +
      inv_weight<Real>(2 * k - 4, 2 * k - 4) * table.a(2 * k - 4) -
      (q * inv_weight<Real>(2 * k - 2, 2 * k - 3)) * table.a(2 * k - 2) +
      (p * p * inv_weight<Real>(2 * k, 2 * k)) * table.a(2 * k);
  return sign * bracket;
}

template <class Real>
Estimate<Real> coeff_trail_odd(const MomentTable<Real>& table, int n) {
  if (n < 1) throw DomainError("coeff_trail_odd: n must be >= 1");
  require_order(table, 4 * n - 2, "coeff_trail_odd");
  const Real tau = table.tau;
  const Real p = Real(0.25) - tau * tau;
  const Real q = Real(0.25) + tau * tau;
  if (n == 1) {
    const auto& od = table.one_dim;
    return (8 * tau) * table.s(0) + (tau * p) * table.s(2) + (2 * q) * table.a(0) -
           Real(2) * od.I2 - od.I3;
  }
  return (tau * inv_weight<Real>(4 * n - 4, 4 * n - 7)) * table.s(4 * n - 4) +
         (tau * p * inv_weight<Real>(4 * n - 2, 4 * n - 5)) * table.s(4 * n - 2) -
         inv_weight<Real>(4 * n - 6, 4 * n - 6) * table.a(4 * n - 6) +
         (q * inv_weight<Real>(4 * n - 4, 4 * n - 5)) * table.a(4 * n - 4);
}

template <class Real>
Estimate<Real> coeff_trail_even(const MomentTable<Real>& table, int n) {
  if (n < 1) throw DomainError("coeff_trail_even: n must be >= 1");
  require_order(table, 4 * n - 4, "coeff_trail_even");
  return inv_weight<Real>(4 * n - 4, 4 * n - 4) * table.a(4 * n - 4);
}

template <class Real>
CoefficientSet<Real> build_coefficients(const MomentTable<Real>& table, int n) {
  if (n < 1) throw DomainError("build_coefficients: n must be >= 1");
  require_order(table, required_order(n), "build_f");
  CoefficientSet<Real> cs;
  cs.tau = table.tau;
  cs.n = n;
  cs.a.push_back(coeff_a0(table));
  for (int k = 1; k <= 2 * n - 2; ++k) cs.a.push_back(coeff_a(table, k));
  cs.trail_odd = coeff_trail_odd(table, n);
  cs.trail_even = coeff_trail_even(table, n);
  return cs;
}

template <class Real>
EvenPolynomial<Real> to_polynomial(const CoefficientSet<Real>& cs) {
  EvenPolynomial<Real> f;
  f.tau = cs.tau;
  f.n = cs.n;
  f.c = cs.a;
  f.c.push_back(cs.trail_odd);
  f.c.push_back(cs.trail_even);
  return f;
}

template <class Real>
EvenPolynomial<Real> build_f(const MomentTable<Real>& table, int n) {
  return to_polynomial(build_coefficients(table, n));
}

#define XIMOD_INSTANTIATE_COEFFS(Real)                                                \
  template struct EvenPolynomial<Real>;                                              \
  template Real factorial<Real>(int);                                                \
  template Estimate<Real> coeff_a0<Real>(const MomentTable<Real>&);                  \
  template Estimate<Real> coeff_a0_second_factor<Real>(const MomentTable<Real>&);    \
  template Estimate<Real> coeff_a<Real>(const MomentTable<Real>&, int);              \
  template Estimate<Real> coeff_trail_odd<Real>(const MomentTable<Real>&, int);      \
  template Estimate<Real> coeff_trail_even<Real>(const MomentTable<Real>&, int);     \
  template CoefficientSet<Real> build_coefficients<Real>(const MomentTable<Real>&, int); \
  template EvenPolynomial<Real> to_polynomial<Real>(const CoefficientSet<Real>&);    \
  template EvenPolynomial<Real> build_f<Real>(const MomentTable<Real>&, int);

XIMOD_INSTANTIATE_COEFFS(double)
XIMOD_INSTANTIATE_COEFFS(Float128)

}  // namespace ximod
