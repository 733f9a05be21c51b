#include "ximod/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ximod/errors.hpp"
#include "ximod/quadrature.hpp"
#include "ximod/theta.hpp"

namespace ximod {

namespace {

// Envelope scale for the inner integrand in w = ln y: double-exponential
// decay sets in once x^2 e^{|w|} >~ 1, so the core window is |w| <= 4.
constexpr double kInnerDecayScale = 0.5;

template <class Real>
void check_even_order(int j) {
  if (j < 0 || j % 2 != 0) throw DomainError("moment order must be even and non-negative");
}

// Combines (x, g, h) into dim outer-integrand values.
template <class Real>
using Combine = std::function<void(Real x, Real g, Real h, std::span<Real> out)>;

// Integrates combine(x, g(x), h(x)) over x in (1, inf). `bound(x)` bounds
// |d out_c / d(g, h)| at x and sets the inner tolerance so that inner errors
// contribute at most tol/4 to every component.
template <class Real>
VectorQuadratureResult<Real> sweep_x(Real tau, Real tol, std::size_t dim,
                                     const Combine<Real>& combine,
                                     const std::function<Real(Real)>& bound,
                                     OscillationHint hint) {
  using std::abs;
  const Real cut = outer_cutoff(tol);
  const Real span = cut - 1;
  Real inner_contrib = 0;  // max over nodes of bound(x) * inner err(x)

  VectorIntegrand<Real> integrand = [&](Real x, std::span<Real> out) {
    const Real b = std::max(bound(x), Real(1));
    const InnerKernel<Real> k = inner_kernel(tau, x, tol / (4 * span * b));
    inner_contrib = std::max(inner_contrib, b * std::max(k.g_err, k.h_err));
    combine(x, k.g, k.h, out);
  };

  VectorQuadratureResult<Real> res = integrate_finite_vec<Real>(integrand, dim, Real(1), cut,
                                                                tol / 2, hint);

  // Tail past the cut: the integrand carries exp(-2 pi x^2), whose tail
  // integral is at most exp(-2 pi X^2) / (4 pi X); doubled for the log weights.
  std::vector<Real> at_cut(dim);
  integrand(cut, std::span<Real>(at_cut));
  for (std::size_t d = 0; d < dim; ++d) {
    res.err[d] += span * inner_contrib + 2 * abs(at_cut[d]) / (4 * pi<Real>() * cut);
  }
  return res;
}

template <class Real>
Estimate<Real> component(const VectorQuadratureResult<Real>& r, std::size_t d) {
  return {r.value[d], r.err[d]};
}

}  // namespace

template <class Real>
const Estimate<Real>& MomentTable<Real>::s(int j) const {
  auto it = S.find(j);
  if (it == S.end()) {
    throw CapacityError("moment table holds S_j only up to j = " + std::to_string(j_max) +
                        "; S_" + std::to_string(j) + " requested");
  }
  return it->second;
}

template <class Real>
const Estimate<Real>& MomentTable<Real>::a(int j) const {
  auto it = A.find(j);
  if (it == A.end()) {
    throw CapacityError("moment table holds A_j only up to j = " + std::to_string(j_max) +
                        "; A_" + std::to_string(j) + " requested");
  }
  return it->second;
}

template <class Real>
Real outer_cutoff(Real tol) {
  using std::log;
  using std::sqrt;
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  const Real from_tol = sqrt(std::max(Real(0), log(Real(1) / tol)) / (2 * pi<Real>())) + 1;
  return std::max(Real(4), from_tol);
}

template <class Real>
InnerKernel<Real> inner_kernel(Real tau, Real x, Real tol) {
  using std::exp;
  if (!(x >= 1)) throw DomainError("inner_kernel: x must be >= 1");
  const Real x2 = x * x;
  VectorIntegrand<Real> f = [tau, x2](Real w, std::span<Real> out) {
    const Real ew = exp(w);
    const Real p = psi_fast(x2 * ew) * psi_fast(x2 / ew);
    const Real v = p == 0 ? Real(0) : exp(tau * w) * p;
    out[0] = v;
    out[1] = w * v;
  };
  auto r = integrate_line_vec<Real>(f, 2, tol, Real(kInnerDecayScale));
  InnerKernel<Real> k;
  k.tau = tau;
  k.x = x;
  k.g = r.value[0];
  k.g_err = r.err[0];
  k.h = r.value[1];
  k.h_err = r.err[1];
  return k;
}

template <class Real>
Estimate<Real> moment_S(Real tau, int j, Real tol) {
  using std::log;
  using std::pow;
  check_even_order<Real>(j);
  Combine<Real> combine = [j](Real x, Real g, Real, std::span<Real> out) {
    out[0] = 4 * pow(4 * log(x), j) * g;
  };
  std::function<Real(Real)> bound = [j](Real x) { return 4 * pow(4 * log(x), j); };
  return component(sweep_x<Real>(tau, tol, 1, combine, bound, {}), 0);
}

template <class Real>
Estimate<Real> moment_A(Real tau, int j, Real tol) {
  using std::log;
  using std::pow;
  check_even_order<Real>(j);
  Combine<Real> combine = [j](Real x, Real, Real h, std::span<Real> out) {
    out[0] = 8 * pow(4 * log(x), j) * h;
  };
  std::function<Real(Real)> bound = [j](Real x) { return 8 * pow(4 * log(x), j); };
  return component(sweep_x<Real>(tau, tol, 1, combine, bound, {}), 0);
}

template <class Real>
std::pair<Estimate<Real>, Estimate<Real>> cosine_kernels(Real tau, Real t, Real tol) {
  using std::abs;
  using std::cos;
  using std::log;
  Combine<Real> combine = [t](Real x, Real g, Real h, std::span<Real> out) {
    const Real c = cos(2 * t * log(x));
    out[0] = 4 * c * g;
    out[1] = 8 * c * h;
  };
  std::function<Real(Real)> bound = [](Real) { return Real(8); };
  OscillationHint hint{2 * abs(to_double(t))};
  auto r = sweep_x<Real>(tau, tol, 2, combine, bound, hint);
  return {component(r, 0), component(r, 1)};
}

template <class Real>
Estimate<Real> cosine_kernel_C(Real tau, Real t, Real tol) {
  using std::abs;
  using std::cos;
  using std::log;
  Combine<Real> combine = [t](Real x, Real g, Real, std::span<Real> out) {
    out[0] = 4 * cos(2 * t * log(x)) * g;
  };
  std::function<Real(Real)> bound = [](Real) { return Real(4); };
  OscillationHint hint{2 * abs(to_double(t))};
  return component(sweep_x<Real>(tau, tol, 1, combine, bound, hint), 0);
}

template <class Real>
Estimate<Real> cosine_kernel_D(Real tau, Real t, Real tol) {
  using std::abs;
  using std::cos;
  using std::log;
  Combine<Real> combine = [t](Real x, Real, Real h, std::span<Real> out) {
    out[0] = 8 * cos(2 * t * log(x)) * h;
  };
  std::function<Real(Real)> bound = [](Real) { return Real(8); };
  OscillationHint hint{2 * abs(to_double(t))};
  return component(sweep_x<Real>(tau, tol, 1, combine, bound, hint), 0);
}

template <class Real>
Real cos_taylor_remainder(Real z, int m) {
  using std::abs;
  using std::cos;
  if (m < 0) throw DomainError("cos_taylor_remainder: m must be >= 0");
  const Real z2 = z * z;
  if (abs(z) <= 2) {
    // (-1)^k z^{2k}/(2k)! for k = m+1, m+2, ...
    Real term = 1;
    for (int k = 1; k <= m + 1; ++k) term *= -z2 / ((2 * k - 1) * (2 * k));
    Real sum = 0;
    for (int k = m + 1; k < m + 200; ++k) {
      sum += term;
      if (abs(term) <= machine_eps<Real>() * abs(sum) / 4) break;
      term *= -z2 / ((2 * k + 1) * (2 * k + 2));
    }
    return sum;
  }
  Real poly = 0;
  Real term = 1;
  for (int k = 0; k <= m; ++k) {
    poly += term;
    term *= -z2 / ((2 * k + 1) * (2 * k + 2));
  }
  return cos(z) - poly;
}

template <class Real>
std::pair<Estimate<Real>, Estimate<Real>> cosine_remainder_kernels(Real tau, Real t, int m,
                                                                   Real tol) {
  using std::abs;
  using std::log;
  Combine<Real> combine = [t, m](Real x, Real g, Real h, std::span<Real> out) {
    const Real r = cos_taylor_remainder(2 * t * log(x), m);
    out[0] = 4 * r * g;
    out[1] = 8 * r * h;
  };
  std::function<Real(Real)> bound = [](Real) { return Real(8); };
  OscillationHint hint{2 * abs(to_double(t))};
  auto r = sweep_x<Real>(tau, tol, 2, combine, bound, hint);
  return {component(r, 0), component(r, 1)};
}

template <class Real>
OneDimIntegrals<Real> one_dim_integrals(Real tau, Real tol) {
  using std::abs;
  using std::exp;
  using std::expm1;
  using std::log;
  using std::sinh;
  if (!(abs(tau) < Real(1.5))) throw DomainError("one_dim_integrals: requires |tau| < 3/2");
  VectorIntegrand<Real> f = [tau](Real u, std::span<Real> out) {
    const Real lu = log(u);
    const Real ps = psi_fast(u);
    const Real p1 = exp((2 * tau - 3) / 4 * lu);
    const Real p2 = exp((-2 * tau - 3) / 4 * lu);
    const Real a = exp((tau - Real(0.5)) * lu);   // u^{tau-1/2}
    const Real b = exp((-tau - 1) * lu);           // u^{-tau-1}
    const Real c = exp((-tau - Real(0.5)) * lu);  // u^{-tau-1/2}
    const Real d = exp((tau - 1) * lu);            // u^{tau-1}
    out[0] = (p1 + p2) * ps;
    // u^{-3/4} (u^{tau/2} - u^{-tau/2}), vanishing exactly at tau = 0
    out[1] = exp(Real(-0.75) * lu) * 2 * sinh(tau * lu / 2) * lu * ps;
    out[2] = ((1 + 2 * tau) * (a + b) + (1 - 2 * tau) * (c + d)) * ps;
    // (a + b) - (c + d) = u^{-tau-1} (u^{2tau} - 1)(u^{1/2} - 1)
    out[3] = b * expm1(2 * tau * lu) * expm1(lu / 2) * ps;
    out[4] = ((1 + 2 * tau) * (a - b) + (1 - 2 * tau) * (d - c)) * lu * ps;
  };
  auto r = integrate_semiinf_vec<Real>(f, 5, Real(1), tol, pi<Real>());
  OneDimIntegrals<Real> out;
  out.Jplus = component(r, 0);
  out.JminusLog = component(r, 1);
  out.I1 = component(r, 2);
  out.I2 = component(r, 3);
  out.I3 = component(r, 4);
  return out;
}

template <class Real>
MomentTable<Real> build_moment_table(Real tau, int j_max, Real tol) {
  using std::log;
  using std::pow;
  check_even_order<Real>(j_max);
  const int orders = j_max / 2 + 1;
  const std::size_t dim = 2 * static_cast<std::size_t>(orders);
  Combine<Real> combine = [orders](Real x, Real g, Real h, std::span<Real> out) {
    const Real l = 4 * log(x);
    const Real l2 = l * l;
    Real p = 1;
    for (int i = 0; i < orders; ++i) {
      out[i] = 4 * p * g;
      out[orders + i] = 8 * p * h;
      p *= l2;
    }
  };
  std::function<Real(Real)> bound = [j_max](Real x) {
    return 8 * std::max(Real(1), pow(4 * log(x), j_max));
  };
  auto r = sweep_x<Real>(tau, tol, dim, combine, bound, {});

  MomentTable<Real> table;
  table.tau = tau;
  table.j_max = j_max;
  table.tol_used = tol;
  for (int i = 0; i < orders; ++i) {
    table.S[2 * i] = component(r, i);
    table.A[2 * i] = component(r, orders + i);
  }
  table.one_dim = one_dim_integrals(tau, tol);
  return table;
}

#define XIMOD_INSTANTIATE_MOMENTS(Real)                                                 \
  template struct MomentTable<Real>;                                                   \
  template Real outer_cutoff<Real>(Real);                                              \
  template InnerKernel<Real> inner_kernel<Real>(Real, Real, Real);                     \
  template Estimate<Real> moment_S<Real>(Real, int, Real);                             \
  template Estimate<Real> moment_A<Real>(Real, int, Real);                             \
  template Estimate<Real> cosine_kernel_C<Real>(Real, Real, Real);                     \
  template Estimate<Real> cosine_kernel_D<Real>(Real, Real, Real);                     \
  template std::pair<Estimate<Real>, Estimate<Real>> cosine_kernels<Real>(Real, Real, Real); \
  template OneDimIntegrals<Real> one_dim_integrals<Real>(Real, Real);                  \
  template Real cos_taylor_remainder<Real>(Real, int);                                 \
  template std::pair<Estimate<Real>, Estimate<Real>> cosine_remainder_kernels<Real>(Real, Real, int, Real); \
  template MomentTable<Real> build_moment_table<Real>(Real, int, Real);

XIMOD_INSTANTIATE_MOMENTS(double)
XIMOD_INSTANTIATE_MOMENTS(Float128)

}  // namespace ximod
