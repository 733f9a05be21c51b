#pragma once

// Exact polynomial algebra over Q (GMP rationals): real-root counting by
// Sturm chains and by the signature of the Hermite matrix, discriminants via
// the subresultant PRS, and the minimum of an even polynomial over t real.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ximod/coeffs.hpp"
#include "ximod/real.hpp"

namespace ximod {

// Ascending coefficients, trailing zeros trimmed; the zero polynomial has no
// coefficients and degree -1.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<mpq_class> coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<mpq_class>& coeffs() const { return c_; }
  const mpq_class& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const mpq_class& leading() const { return c_.back(); }

  mpq_class eval(const mpq_class& x) const;
  RationalPolynomial derivative() const;
  std::string to_string() const;

  // Polynomial in t with coefficient s_coeffs[m] at t^{2m}.
  static RationalPolynomial from_even(const std::vector<mpq_class>& s_coeffs);

  friend bool operator==(const RationalPolynomial&, const RationalPolynomial&) = default;

 private:
  std::vector<mpq_class> c_;
};

enum class CountMethod { Sturm, Hermite };

struct RootCountReport {
  int n_real{0};              // distinct real roots
  int n_distinct_complex{0};  // distinct complex roots
  bool stable{true};
  CountMethod method{CountMethod::Sturm};
};

const char* method_name(CountMethod m);

// Exact conversion of a finite Real to a rational.
template <class Real>
mpq_class to_rational(const Real& x);

// Nearest Real to q (three-double expansion, enough for both scalars).
template <class Real>
Real from_rational(const mpq_class& q);

// Rounds x to a dyadic rational carrying `digits` significant decimal digits.
template <class Real>
mpq_class quantize_value(const Real& x, int digits);

// The polynomial in t, each coefficient rounded by quantize_value.
template <class Real>
RationalPolynomial quantize(const EvenPolynomial<Real>& poly, int digits);

template <class Real>
RationalPolynomial quantize_values(const std::vector<Real>& s_coeffs, int digits);

// Sturm chain of (p, p'): n_real from sign variations at -inf and +inf,
// n_distinct_complex = deg p - deg gcd(p, p').
RootCountReport sturm_count(const RationalPolynomial& p);

// Signature and rank of H_{ij} = s_{i+j}, i, j < deg p, with s_m the power
// sums of the roots.
RootCountReport hermite_signature_count(const RationalPolynomial& p);

// Power sums s_0 .. s_{count-1} of the roots of p (deg p >= 1).
std::vector<mpq_class> power_sums(const RationalPolynomial& p, int count);

// Res(a, b) for polynomials with integer coefficients, by the subresultant PRS.
mpz_class resultant_integer(std::vector<mpz_class> a, std::vector<mpz_class> b);

// (-1)^{d(d-1)/2} Res(p, p') / lc(p).
mpq_class discriminant(const RationalPolynomial& p);

// 16 a2 a0 (a1^2 - 4 a2 a0)^2: discriminant of a2 t^4 + a1 t^2 + a0.
template <class Real>
Real discriminant_biquadratic(Real a0, Real a1, Real a2);

template <class Real>
struct MinimumReport {
  Real s_min{0};
  Real value{0};
  bool flagged{false};  // leading coefficient <= 0: minimum over a bounded window
  std::string warning;
};

// Minimum over s >= 0 of sum_m c_m s^m, from the real critical points of the
// s-derivative and the endpoint s = 0.
template <class Real>
MinimumReport<Real> min_nonneg_s(const EvenPolynomial<Real>& poly);

template <class Real>
struct GapReport {
  Real gap{0};
  Real err{0};
  bool degenerate{false};  // |a1| equals 2 sqrt(a2 a0) within err
};

// a1 + 2 sqrt(a2 a0). Throws DomainError when a0 < 0 or a2 < 0.
template <class Real>
GapReport<Real> biquadratic_gap(const Estimate<Real>& a0, const Estimate<Real>& a1,
                                 const Estimate<Real>& a2);

// Counts of the quantized polynomial, plus stability under +-err shifts of
// every coefficient: all sign patterns when the t-degree is <= 4, otherwise
// 20 seeded random patterns.
template <class Real>
RootCountReport count_with_stability(const EvenPolynomial<Real>& poly, int digits,
                                     CountMethod method);

struct SelftestReport {
  int trials{0};
  int agreements{0};
  std::vector<std::string> disagreements;  // polynomial and both reports
  bool pass() const { return trials > 0 && agreements == trials; }
};

// Sturm vs Hermite on random even integer polynomials of t-degree <= 8 with
// coefficients in [-9, 9].
SelftestReport poly_selftest(int trials = 200, std::uint64_t seed = 20240501);

}  // namespace ximod
