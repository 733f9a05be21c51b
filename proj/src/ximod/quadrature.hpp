#pragma once

// Adaptive Gauss-Kronrod (G7/K15) integration on finite, semi-infinite and
// whole-line domains. Error estimates are the Kronrod/Gauss pair difference,
// summed over panels. Vector-valued integrands share one set of nodes so that
// families of integrals (all moment orders at once) cost one sweep.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ximod/real.hpp"

namespace ximod {

// Radian frequency of a cos(omega r) factor in the integration variable r.
// Panels are never wider than pi / (2 omega).
struct OscillationHint {
  double frequency{0};
};

struct QuadratureOptions {
  int max_panels{1 << 16};
  int initial_panels{1};
};

template <class Real>
struct QuadratureResult {
  Real value{0};
  Real err{0};
  int panels{0};
  // Converged only because the requested tolerance sits below the rounding
  // floor 50 eps int|f|; err is then the honest (larger) estimate.
  bool roundoff_limited{false};
};

template <class Real>
struct VectorQuadratureResult {
  std::vector<Real> value;
  std::vector<Real> err;
  int panels{0};
  bool roundoff_limited{false};

  Real max_err() const;
};

template <class Real>
using Integrand = std::function<Real(Real)>;

// Writes dim values f_c(x) into out.
template <class Real>
using VectorIntegrand = std::function<void(Real, std::span<Real>)>;

template <class Real>
QuadratureResult<Real> integrate_finite(const Integrand<Real>& f, Real a, Real b, Real tol,
                                        OscillationHint hint = {}, QuadratureOptions opts = {});

template <class Real>
VectorQuadratureResult<Real> integrate_finite_vec(const VectorIntegrand<Real>& f, std::size_t dim,
                                                  Real a, Real b, Real tol,
                                                  OscillationHint hint = {},
                                                  QuadratureOptions opts = {});

// int_a^inf f for |f(x)| <~ C exp(-decay_scale x). The cut point X is the
// first point on the grid a + k/decay_scale where 4 max|f| / decay_scale (the
// exponential tail bound, sampled at X and X + 1/(2 decay_scale)) drops below
// tol/2; [a, X] is then integrated to tol/2.
template <class Real>
QuadratureResult<Real> integrate_semiinf(const Integrand<Real>& f, Real a, Real tol,
                                         Real decay_scale, OscillationHint hint = {},
                                         QuadratureOptions opts = {});

template <class Real>
VectorQuadratureResult<Real> integrate_semiinf_vec(const VectorIntegrand<Real>& f,
                                                   std::size_t dim, Real a, Real tol,
                                                   Real decay_scale, OscillationHint hint = {},
                                                   QuadratureOptions opts = {});

// int_{-inf}^{inf} f for integrands with (double-)exponentially decaying
// envelopes. Starts on [-2/decay_scale, 2/decay_scale] and appends segments of
// doubling width on both sides until the newest pair contributes < tol/4.
template <class Real>
QuadratureResult<Real> integrate_line(const Integrand<Real>& f, Real tol, Real decay_scale,
                                      QuadratureOptions opts = {});

template <class Real>
VectorQuadratureResult<Real> integrate_line_vec(const VectorIntegrand<Real>& f, std::size_t dim,
                                                Real tol, Real decay_scale,
                                                QuadratureOptions opts = {});

}  // namespace ximod
