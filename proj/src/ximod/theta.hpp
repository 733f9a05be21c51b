#pragma once

// Jacobi theta series psi(y) = sum_{n>=1} exp(-pi n^2 y), y > 0.

#include "ximod/real.hpp"

namespace ximod {

template <class Real>
struct ToleranceSpec {
  Real abs_tol{1e-15};
  int max_terms{100000};
};

template <class Real>
struct ThetaPoint {
  Real y{0};
  Real value{0};
  Real err{0};
  int terms{0};  // series terms actually summed
};

// Geometric majorant of sum_{n>N} exp(-pi n^2 y):
//   exp(-pi (N+1)^2 y) / (1 - exp(-pi (2N+3) y)).
template <class Real>
Real psi_tail_bound(Real y, int n);

// Plain series summation, truncated at the first N whose tail bound meets
// tol.abs_tol. Valid for every y > 0 but slow for small y.
template <class Real>
ThetaPoint<Real> psi_series(Real y, const ToleranceSpec<Real>& tol);

// psi(y) = -1/2 + y^{-1/2}/2 + y^{-1/2} psi(1/y), with psi(1/y) summed directly.
template <class Real>
ThetaPoint<Real> psi_via_modular(Real y, const ToleranceSpec<Real>& tol);

// psi(y) within tol.abs_tol; the modular identity is applied once when y < 1.
template <class Real>
ThetaPoint<Real> psi(Real y, const ToleranceSpec<Real>& tol);

// Hot-path evaluation to relative accuracy `rel` (y > 0, no error report).
// Used inside quadrature integrands.
template <class Real>
Real psi_fast(Real y, Real rel = machine_eps<Real>());

}  // namespace ximod
