#pragma once

// Coefficients of the even polynomial
//   f_{tau,n}(t) = sum_{k=0}^{2n-2} a_tau(k) t^{2k} + a_{tau,n}(2n-1) t^{4n-2} + a_{tau,n}(2n) t^{4n}
// assembled from a moment table. Errors propagate linearly from the moments.

#include <vector>

#include "ximod/moments.hpp"
#include "ximod/real.hpp"

namespace ximod {

template <class Real>
struct CoefficientSet {
  Real tau{0};
  int n{1};
  std::vector<Estimate<Real>> a;  // a_tau(k), k = 0..2n-2
  Estimate<Real> trail_odd;       // a_{tau,n}(2n-1)
  Estimate<Real> trail_even;      // a_{tau,n}(2n)
};

// f(t) = sum_m c[m] t^{2m}, m = 0..2n.
template <class Real>
struct EvenPolynomial {
  Real tau{0};
  int n{1};
  std::vector<Estimate<Real>> c;

  // Value at s = t^2.
  Real eval_s(Real s) const;
  // sum_m c[m].err s^m
  Real err_at_s(Real s) const;
  int degree_t() const { return 2 * (static_cast<int>(c.size()) - 1); }
};

// m! as a Real; exact whenever the scalar's mantissa holds it.
template <class Real>
Real factorial(int m);

// [1 - (1/4 - tau^2) J+] [4 tau J+ - (1/4 - tau^2) J-log]
template <class Real>
Estimate<Real> coeff_a0(const MomentTable<Real>& table);

// Second factor of coeff_a0 on its own.
template <class Real>
Estimate<Real> coeff_a0_second_factor(const MomentTable<Real>& table);

// a_tau(k), k >= 1. Needs S and A up to order 2k.
template <class Real>
Estimate<Real> coeff_a(const MomentTable<Real>& table, int k);

// a_{tau,n}(2n-1). Needs order 4n-2.
template <class Real>
Estimate<Real> coeff_trail_odd(const MomentTable<Real>& table, int n);

// a_{tau,n}(2n) = A_{4n-4} / ((4n-4)! 2^{4n-4}). Needs order 4n-4.
template <class Real>
Estimate<Real> coeff_trail_even(const MomentTable<Real>& table, int n);

template <class Real>
CoefficientSet<Real> build_coefficients(const MomentTable<Real>& table, int n);

template <class Real>
EvenPolynomial<Real> to_polynomial(const CoefficientSet<Real>& cs);

template <class Real>
EvenPolynomial<Real> build_f(const MomentTable<Real>& table, int n);

// Smallest table order that build_f needs for n.
inline int required_order(int n) { return 4 * n - 2; }

}  // namespace ximod
