#pragma once

// Theta-kernel double integrals over the region {uv > 1} and the
// one-dimensional psi-weighted integrals on (1, inf).
//
// Every double integral goes through u = x^2 y, v = x^2 / y (du dv = 4 x^3/y
// dx dy), which maps {uv > 1} onto x > 1 and turns the weight
// u^{(2tau-3)/4} v^{(-2tau-3)/4} into 4 y^{tau-1}. With
//   g(x) = int_0^inf y^{tau-1} psi(x^2 y) psi(x^2/y) dy
//   h(x) = int_0^inf ln y  y^{tau-1} psi(x^2 y) psi(x^2/y) dy
// and ln(uv) = 4 ln x, ln(u/v) = 2 ln y:
//   S_j(tau)   = 4 int_1^inf (4 ln x)^j g(x) dx
//   A_j(tau)   = 8 int_1^inf (4 ln x)^j h(x) dx
//   C(tau, t)  = 4 int_1^inf cos(2 t ln x) g(x) dx
//   D(tau, t)  = 8 int_1^inf cos(2 t ln x) h(x) dx

#include <map>
#include <utility>

#include "ximod/real.hpp"

namespace ximod {

template <class Real>
struct InnerKernel {
  Real tau{0};
  Real x{1};
  Real g{0};
  Real g_err{0};
  Real h{0};
  Real h_err{0};
};

template <class Real>
struct OneDimIntegrals {
  Estimate<Real> Jplus;      // int (u^{(2tau-3)/4} + u^{(-2tau-3)/4}) psi
  Estimate<Real> JminusLog;  // int (u^{(2tau-3)/4} - u^{(-2tau-3)/4}) ln u psi
  Estimate<Real> I1;         // int [(1+2tau)(u^{tau-1/2}+u^{-tau-1}) + (1-2tau)(u^{-tau-1/2}+u^{tau-1})] psi
  Estimate<Real> I2;         // int [(u^{tau-1/2}+u^{-tau-1}) - (u^{-tau-1/2}+u^{tau-1})] psi
  Estimate<Real> I3;         // int [(1+2tau)(u^{tau-1/2}-u^{-tau-1}) + (1-2tau)(u^{tau-1}-u^{-tau-1/2})] ln u psi
};

template <class Real>
struct MomentTable {
  Real tau{0};
  int j_max{0};
  std::map<int, Estimate<Real>> S;
  std::map<int, Estimate<Real>> A;
  OneDimIntegrals<Real> one_dim;
  Real tol_used{0};

  // Throw CapacityError when order j was not tabulated.
  const Estimate<Real>& s(int j) const;
  const Estimate<Real>& a(int j) const;
};

// Outer truncation point max(4, sqrt(ln(1/tol)/(2 pi)) + 1).
template <class Real>
Real outer_cutoff(Real tol);

template <class Real>
InnerKernel<Real> inner_kernel(Real tau, Real x, Real tol);

template <class Real>
Estimate<Real> moment_S(Real tau, int j, Real tol);

template <class Real>
Estimate<Real> moment_A(Real tau, int j, Real tol);

template <class Real>
Estimate<Real> cosine_kernel_C(Real tau, Real t, Real tol);

template <class Real>
Estimate<Real> cosine_kernel_D(Real tau, Real t, Real tol);

// C and D from one shared sweep.
template <class Real>
std::pair<Estimate<Real>, Estimate<Real>> cosine_kernels(Real tau, Real t, Real tol);

// cos z minus its Taylor polynomial through z^{2m}; summed as the series tail
// for small |z| so tiny remainders keep their relative accuracy.
template <class Real>
Real cos_taylor_remainder(Real z, int m);

// With z = 2 t ln x and r_m the remainder above:
//   first  = 4 int_1^inf r_m(z) g(x) dx  (= C - sum_{k<=m} (-1)^k t^{2k} S_{2k}/((2k)! 2^{2k}))
//   second = 8 int_1^inf r_m(z) h(x) dx  (the same with D and A).
template <class Real>
std::pair<Estimate<Real>, Estimate<Real>> cosine_remainder_kernels(Real tau, Real t, int m,
                                                                   Real tol);

// Requires |tau| < 3/2.
template <class Real>
OneDimIntegrals<Real> one_dim_integrals(Real tau, Real tol);

// All even orders 0..j_max of S and A from one x-sweep, plus the five 1D
// integrals. j_max must be even and non-negative.
template <class Real>
MomentTable<Real> build_moment_table(Real tau, int j_max, Real tol);

}  // namespace ximod
