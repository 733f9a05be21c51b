#include "ximod/xi.hpp"

#include <algorithm>
#include <cmath>

#include "ximod/errors.hpp"
#include "ximod/quadrature.hpp"
#include "ximod/theta.hpp"

namespace ximod {

namespace {

template <class Real>
void require_table_for(Real tau, const MomentTable<Real>& table) {
  if (table.tau != tau) throw DomainError("moment table was built for a different tau");
}

}  // namespace

template <class Real>
XiValue<Real> xi_direct(ComplexValue<Real> s, Real tol) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::hypot;
  using std::log;
  using std::sin;
  if (!(tol > 0)) throw DomainError("xi_direct: tolerance must be positive");
  const Real sigma = s.re;
  const Real height = s.im;
  // m = s(s-1)/2
  const Real mr = (sigma * (sigma - 1) - height * height) / 2;
  const Real mi = height * (2 * sigma - 1) / 2;
  const Real mabs = hypot(mr, mi);

  XiValue<Real> out;
  if (mabs == 0) {
    out.value = {Real(0.5), Real(0)};
    return out;
  }
  // Re and Im of (y^{s/2-1} + y^{-(s+1)/2}) psi(y), sharing psi.
  VectorIntegrand<Real> f = [sigma, height](Real y, std::span<Real> res) {
    const Real ly = log(y);
    const Real ps = psi_fast(y);
    const Real e1 = exp((sigma / 2 - 1) * ly);
    const Real e2 = exp(-(sigma + 1) / 2 * ly);
    const Real theta = height / 2 * ly;
    res[0] = (e1 + e2) * cos(theta) * ps;
    res[1] = (e1 - e2) * sin(theta) * ps;
  };
  const Real tol_integral = tol / std::max(Real(1), 2 * mabs);
  auto r = integrate_semiinf_vec<Real>(f, 2, Real(1), tol_integral, pi<Real>(),
                                       OscillationHint{abs(to_double(height)) / 2});
  const Real ire = r.value[0];
  const Real iim = r.value[1];
  out.value.re = Real(0.5) + mr * ire - mi * iim;
  out.value.im = mr * iim + mi * ire;
  out.err = mabs * (r.err[0] + r.err[1]) +
            4 * machine_eps<Real>() * (Real(0.5) + mabs * (abs(ire) + abs(iim)));
  return out;
}

template <class Real>
Estimate<Real> F_direct(Real tau, Real t, Real tol) {
  using std::hypot;
  const XiValue<Real> xi = xi_direct(ComplexValue<Real>{Real(0.5) + tau, -t}, tol / 8);
  const Real modulus = hypot(xi.value.re, xi.value.im);
  Estimate<Real> out;
  out.value = 4 * (xi.value.re * xi.value.re + xi.value.im * xi.value.im);
  out.err = 8 * modulus * xi.err + 4 * xi.err * xi.err;
  return out;
}

template <class Real>
Estimate<Real> F_rhs_from(Real t, const MomentTable<Real>& table, const Estimate<Real>& C) {
  const Real tau = table.tau;
  const Real t2 = t * t;
  const Real tau2 = tau * tau;
  const Real q = tau2 - Real(0.25);  // tau^2 - 1/4
  const Real wc = 2 * ((t2 + tau2 + Real(0.25)) * (t2 + tau2 + Real(0.25)) - tau2);
  const auto& od = table.one_dim;
  const Estimate<Real> base = Estimate<Real>{Real(1), Real(0)} + q * od.Jplus;
  return wc * C - t2 * od.I1 - (2 * q * q) * table.s(0) + base * base;
}

template <class Real>
Estimate<Real> F_rhs(Real tau, Real t, const MomentTable<Real>& table, Real tol) {
  require_table_for(tau, table);
  const Real t2 = t * t;
  const Real tau2 = tau * tau;
  const Real wc = 2 * ((t2 + tau2 + Real(0.25)) * (t2 + tau2 + Real(0.25)) - tau2);
  const Estimate<Real> C = cosine_kernel_C(tau, t, tol / (2 * std::max(Real(1), wc)));
  return F_rhs_from(t, table, C);
}

template <class Real>
Estimate<Real> dF_dtau_from(Real t, const MomentTable<Real>& table, const Estimate<Real>& a0,
                            const Estimate<Real>& C, const Estimate<Real>& D) {
  const Real tau = table.tau;
  const Real t2 = t * t;
  const Real tau2 = tau * tau;
  const Real p = Real(0.25) - tau2;  // 1/4 - tau^2
  const Real lead = t2 + Real(0.25) + tau2;
  const auto& od = table.one_dim;
  return (8 * tau * (t2 - p)) * C + (lead * lead - tau2) * D - (2 * t2) * od.I2 - t2 * od.I3 +
         (8 * tau * p) * table.s(0) - (p * p) * table.a(0) + a0;
}

template <class Real>
Estimate<Real> dF_dtau(Real tau, Real t, const MomentTable<Real>& table, const Estimate<Real>& a0,
                       Real tol) {
  using std::abs;
  require_table_for(tau, table);
  const Real t2 = t * t;
  const Real tau2 = tau * tau;
  const Real lead = t2 + Real(0.25) + tau2;
  const Real weight = std::max({Real(1), lead * lead - tau2, abs(8 * tau * (t2 - Real(0.25) + tau2))});
  const auto [C, D] = cosine_kernels(tau, t, tol / (4 * weight));
  return dF_dtau_from(t, table, a0, C, D);
}

#define XIMOD_INSTANTIATE_XI(Real)                                                               \
  template XiValue<Real> xi_direct<Real>(ComplexValue<Real>, Real);                             \
  template Estimate<Real> F_direct<Real>(Real, Real, Real);                                     \
  template Estimate<Real> F_rhs<Real>(Real, Real, const MomentTable<Real>&, Real);              \
  template Estimate<Real> F_rhs_from<Real>(Real, const MomentTable<Real>&, const Estimate<Real>&); \
  template Estimate<Real> dF_dtau<Real>(Real, Real, const MomentTable<Real>&,                   \
                                        const Estimate<Real>&, Real);                           \
  template Estimate<Real> dF_dtau_from<Real>(Real, const MomentTable<Real>&,                    \
                                             const Estimate<Real>&, const Estimate<Real>&,      \
                                             const Estimate<Real>&);

XIMOD_INSTANTIATE_XI(double)
XIMOD_INSTANTIATE_XI(Float128)

}  // namespace ximod
