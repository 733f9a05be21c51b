#pragma once

#include "ximod/moments.hpp"
#include "ximod/real.hpp"

namespace ximod {

template <class Real>
struct ComplexValue {
  Real re{0};
  Real im{0};
};

template <class Real>
struct XiValue {
  ComplexValue<Real> value;
  Real err{0};  // bound on |computed - xi(s)|
};

template <class Real>
struct ModulusPoint {
  Real tau{0};
  Real t{0};
  Real F_direct{0};
  Real F_rhs{0};
  Real err{0};
};

// xi(s) = 1/2 + s(s-1)/2 int_1^inf (y^{s/2-1} + y^{-(s+1)/2}) psi(y) dy.
template <class Real>
XiValue<Real> xi_direct(ComplexValue<Real> s, Real tol);

// F(tau, t) = 4 |xi(1/2 + tau - i t)|^2.
template <class Real>
Estimate<Real> F_direct(Real tau, Real t, Real tol);

// Modulus assembled from theta-kernel integrals:
//   2[(t^2+tau^2+1/4)^2 - tau^2] C(tau,t) - t^2 I1 - 2(tau^2-1/4)^2 S_0
//   + [1 + (tau^2-1/4) J+]^2.
// C is computed here to the share of tol its weight allows; the table
// contributes its own recorded errors.
// Requires table.tau == tau.
template <class Real>
Estimate<Real> F_rhs(Real tau, Real t, const MomentTable<Real>& table, Real tol);

// Closed-form d/dtau F:
//   8tau[t^2-(1/4-tau^2)] C + [(t^2+1/4+tau^2)^2 - tau^2] D - 2t^2 I2 - t^2 I3
//   + 8tau(1/4-tau^2) S_0 - (1/4-tau^2)^2 A_0 + a_tau(0).
template <class Real>
Estimate<Real> dF_dtau(Real tau, Real t, const MomentTable<Real>& table, const Estimate<Real>& a0,
                       Real tol);

// The same assembly with C and D supplied by the caller.
template <class Real>
Estimate<Real> F_rhs_from(Real t, const MomentTable<Real>& table, const Estimate<Real>& C);

template <class Real>
Estimate<Real> dF_dtau_from(Real t, const MomentTable<Real>& table, const Estimate<Real>& a0,
                            const Estimate<Real>& C, const Estimate<Real>& D);

}  // namespace ximod
