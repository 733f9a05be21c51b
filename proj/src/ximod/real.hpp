#pragma once

// Scalar types used by the numerical modules. Every numerical routine is a
// template over the scalar and is explicitly instantiated for the two types
// below; nothing else is supported.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace ximod {

using Float128 = boost::multiprecision::float128;

enum class Precision { Double, Extended };

template <class Real>
inline Real pi() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
inline Real machine_eps() {
  return std::numeric_limits<Real>::epsilon();
}

template <class Real>
inline double to_double(const Real& x) {
  return static_cast<double>(x);
}

// Significant decimal digits carried by the scalar.
template <class Real>
inline int decimal_digits() {
  return std::numeric_limits<Real>::digits10;
}

// A value with an absolute error estimate. The currency of every module
// above the quadrature layer.
template <class Real>
struct Estimate {
  Real value{0};
  Real err{0};
};

template <class Real>
inline Estimate<Real> operator+(const Estimate<Real>& a, const Estimate<Real>& b) {
  return {a.value + b.value, a.err + b.err};
}

template <class Real>
inline Estimate<Real> operator-(const Estimate<Real>& a, const Estimate<Real>& b) {
  return {a.value - b.value, a.err + b.err};
}

template <class Real>
inline Estimate<Real> operator*(const Real& w, const Estimate<Real>& e) {
  using std::abs;
  return {w * e.value, abs(w) * e.err};
}

// First-order product rule: |a|db + |b|da.
template <class Real>
inline Estimate<Real> operator*(const Estimate<Real>& a, const Estimate<Real>& b) {
  using std::abs;
  return {a.value * b.value, abs(a.value) * b.err + abs(b.value) * a.err + a.err * b.err};
}

template <class Real>
std::string format_real(const Real& x, int digits = std::numeric_limits<Real>::max_digits10);

}  // namespace ximod
