#include "ximod/theta.hpp"

#include <sstream>

#include "ximod/errors.hpp"

namespace ximod {

template <class Real>
std::string format_real(const Real& x, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << std::scientific << x;
  return os.str();
}

template <class Real>
Real psi_tail_bound(Real y, int n) {
  using std::exp;
  using std::expm1;
  if (!(y > 0)) throw DomainError("psi_tail_bound: y must be positive");
  if (n < 1) throw DomainError("psi_tail_bound: N must be >= 1");
  const Real np1 = Real(n) + 1;
  const Real head = exp(-pi<Real>() * np1 * np1 * y);
  const Real denom = -expm1(-pi<Real>() * (2 * Real(n) + 3) * y);
  return head / denom;
}

template <class Real>
ThetaPoint<Real> psi_series(Real y, const ToleranceSpec<Real>& tol) {
  using std::exp;
  if (!(y > 0)) throw DomainError("psi: y must be positive");
  if (!(tol.abs_tol > 0) || tol.max_terms < 1) throw DomainError("psi: invalid tolerance spec");

  int n = 1;
  Real tail = psi_tail_bound(y, n);
  while (tail > tol.abs_tol) {
    if (n >= tol.max_terms) {
      throw PrecisionError("psi: series cap of " + std::to_string(tol.max_terms) +
                               " terms reached; achievable bound is " + format_real(tail, 6),
                           0.0, to_double(tail));
    }
    ++n;
    tail = psi_tail_bound(y, n);
  }

  // Smallest terms first.
  Real sum = 0;
  for (int k = n; k >= 1; --k) {
    const Real kk = Real(k);
    sum += exp(-pi<Real>() * kk * kk * y);
  }
  ThetaPoint<Real> out;
  out.y = y;
  out.value = sum;
  out.err = tail + Real(n + 1) * machine_eps<Real>() * sum;
  out.terms = n;
  return out;
}

template <class Real>
ThetaPoint<Real> psi_via_modular(Real y, const ToleranceSpec<Real>& tol) {
  using std::abs;
  using std::expm1;
  using std::log;
  using std::sqrt;
  if (!(y > 0)) throw DomainError("psi: y must be positive");
  const Real root = sqrt(y);
  const Real inv = Real(1) / y;
  ToleranceSpec<Real> inner_tol = tol;
  inner_tol.abs_tol = tol.abs_tol * root;
  const ThetaPoint<Real> inner = psi_series(inv, inner_tol);

  // -1/2 + y^{-1/2}/2 without cancellation near y = 1.
  const Real head = Real(0.5) * expm1(Real(-0.5) * log(y));
  const Real scaled = inner.value / root;
  ThetaPoint<Real> out;
  out.y = y;
  out.value = head + scaled;
  out.err = inner.err / root +
            4 * machine_eps<Real>() *
                (abs(head) + scaled * (1 + pi<Real>() * inv) + Real(0.5) / root);
  out.terms = inner.terms;
  return out;
}

template <class Real>
ThetaPoint<Real> psi(Real y, const ToleranceSpec<Real>& tol) {
  if (!(y > 0)) throw DomainError("psi: y must be positive");
  if (y < 1) return psi_via_modular(y, tol);
  return psi_series(y, tol);
}

template <class Real>
Real psi_fast(Real y, Real rel) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::sqrt;
  if (y < 1) {
    const Real root = sqrt(y);
    return Real(0.5) * expm1(Real(-0.5) * log(y)) + psi_fast(Real(1) / y, rel) / root;
  }
  const Real q = exp(-pi<Real>() * y);
  const Real q2 = q * q;
  Real term = q;
  Real ratio = q2 * q;  // q^{2n+1} for n = 1
  Real sum = 0;
  // Geometric tail after term n is at most 1.0001 * term_{n+1} for y >= 1.
  while (term > 0) {
    sum += term;
    term *= ratio;
    ratio *= q2;
    if (term <= Real(0.5) * rel * sum) break;
  }
  return sum;
}

#define XIMOD_INSTANTIATE_THETA(Real)                                              \
  template std::string format_real<Real>(const Real&, int);                       \
  template Real psi_tail_bound<Real>(Real, int);                                  \
  template ThetaPoint<Real> psi_series<Real>(Real, const ToleranceSpec<Real>&);   \
  template ThetaPoint<Real> psi_via_modular<Real>(Real, const ToleranceSpec<Real>&); \
  template ThetaPoint<Real> psi<Real>(Real, const ToleranceSpec<Real>&);          \
  template Real psi_fast<Real>(Real, Real);

XIMOD_INSTANTIATE_THETA(double)
XIMOD_INSTANTIATE_THETA(Float128)

}  // namespace ximod
