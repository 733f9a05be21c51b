#include "ximod/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "ximod/errors.hpp"

namespace ximod {

namespace {

using QVec = std::vector<mpq_class>;
using ZVec = std::vector<mpz_class>;

mpq_class dyadic(const mpz_class& m, long exp2) {
  mpq_class r(m);
  if (exp2 >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(exp2));
  } else {
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-exp2));
  }
  r.canonicalize();
  return r;
}

// ---- rational polynomial helpers (ascending vectors) ----

void trim(QVec& v) {
  while (!v.empty() && sgn(v.back()) == 0) v.pop_back();
}

QVec rem(QVec a, const QVec& b) {
  const int db = static_cast<int>(b.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
    const int shift = static_cast<int>(a.size()) - 1 - db;
    const mpq_class f = a.back() / b.back();
    for (int i = 0; i <= db; ++i) a[static_cast<std::size_t>(i + shift)] -= f * b[static_cast<std::size_t>(i)];
    a.pop_back();
    trim(a);
  }
  return a;
}

QVec quot(QVec a, const QVec& b) {
  const int db = static_cast<int>(b.size()) - 1;
  const int da = static_cast<int>(a.size()) - 1;
  if (da < db) return {};
  QVec q(static_cast<std::size_t>(da - db + 1));
  while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
    const int shift = static_cast<int>(a.size()) - 1 - db;
    const mpq_class f = a.back() / b.back();
    q[static_cast<std::size_t>(shift)] = f;
    for (int i = 0; i <= db; ++i) a[static_cast<std::size_t>(i + shift)] -= f * b[static_cast<std::size_t>(i)];
    a.pop_back();
    trim(a);
  }
  return q;
}

QVec gcd_poly(QVec a, QVec b) {
  while (!b.empty()) {
    QVec r = rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

int sign_at(const QVec& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return sgn(acc);
}

int variations(const std::vector<int>& signs) {
  int v = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

// Sturm chain p, p', -rem, ... with each remainder scaled to a unit leading
// coefficient (a positive factor keeps the sign pattern).
std::vector<QVec> sturm_chain(const QVec& p) {
  std::vector<QVec> chain{p};
  QVec d = RationalPolynomial(p).derivative().coeffs();
  if (d.empty()) return chain;
  chain.push_back(d);
  while (true) {
    QVec r = rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    const mpq_class scale = -1 / abs(r.back());
    for (auto& x : r) x *= scale;
    chain.push_back(std::move(r));
  }
  return chain;
}

int variations_at(const std::vector<QVec>& chain, const mpq_class& x) {
  std::vector<int> s;
  s.reserve(chain.size());
  for (const auto& q : chain) s.push_back(sign_at(q, x));
  return variations(s);
}

int variations_at_inf(const std::vector<QVec>& chain, bool positive) {
  std::vector<int> s;
  for (const auto& q : chain) {
    int v = sgn(q.back());
    if (!positive && (q.size() - 1) % 2 == 1) v = -v;
    s.push_back(v);
  }
  return variations(s);
}

// ---- integer polynomial helpers for the subresultant PRS ----

void trim(ZVec& v) {
  while (!v.empty() && sgn(v.back()) == 0) v.pop_back();
}

int deg(const ZVec& v) { return static_cast<int>(v.size()) - 1; }

mpz_class content(const ZVec& v) {
  mpz_class g = 0;
  for (const auto& x : v) g = gcd(g, x);
  return g;
}

void divide_exact(ZVec& v, const mpz_class& d) {
  for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
}

mpz_class power(const mpz_class& b, int e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

// lc(b)^{deg a - deg b + 1} a = q b + r
ZVec pseudo_remainder(ZVec a, const ZVec& b) {
  const int db = deg(b);
  int e = deg(a) - db + 1;
  const mpz_class& lb = b.back();
  while (!a.empty() && deg(a) >= db) {
    const int shift = deg(a) - db;
    const mpz_class la = a.back();
    for (auto& x : a) x *= lb;
    for (int i = 0; i <= db; ++i) {
      a[static_cast<std::size_t>(i + shift)] -= la * b[static_cast<std::size_t>(i)];
    }
    trim(a);
    --e;
  }
  if (e > 0) {
    const mpz_class f = power(lb, e);
    for (auto& x : a) x *= f;
  }
  return a;
}

RootCountReport count(const RationalPolynomial& p, CountMethod m) {
  return m == CountMethod::Sturm ? sturm_count(p) : hermite_signature_count(p);
}

}  // namespace

template <class Real>
Real from_rational(const mpq_class& q) {
  using std::ldexp;
  mpf_class x(q, 320);
  Real acc = 0;
  for (int i = 0; i < 3 && sgn(x) != 0; ++i) {
    long e = 0;
    const double d = mpf_get_d_2exp(&e, x.get_mpf_t());
    acc += ldexp(Real(d), static_cast<int>(e));
    mpf_class part(0, 320);
    mpf_set_d(part.get_mpf_t(), d);
    if (e >= 0) {
      mpf_mul_2exp(part.get_mpf_t(), part.get_mpf_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpf_div_2exp(part.get_mpf_t(), part.get_mpf_t(), static_cast<mp_bitcnt_t>(-e));
    }
    x -= part;
  }
  return acc;
}

// ---- RationalPolynomial ----

RationalPolynomial::RationalPolynomial(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) {
  for (auto& x : c_) x.canonicalize();
  trim(c_);
}

mpq_class RationalPolynomial::eval(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RationalPolynomial RationalPolynomial::derivative() const {
  QVec d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
  return RationalPolynomial(std::move(d));
}

std::string RationalPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const mpq_class& x = c_[static_cast<std::size_t>(i)];
    if (sgn(x) == 0) continue;
    if (!first) os << (sgn(x) > 0 ? " + " : " - ");
    else if (sgn(x) < 0) os << "-";
    first = false;
    const mpq_class ax = abs(x);
    if (i == 0 || ax != 1) os << ax.get_str();
    if (i > 0) os << (i == 0 || ax != 1 ? "*" : "") << "t" << (i > 1 ? "^" + std::to_string(i) : "");
  }
  return os.str();
}

RationalPolynomial RationalPolynomial::from_even(const std::vector<mpq_class>& s_coeffs) {
  QVec t;
  for (std::size_t m = 0; m < s_coeffs.size(); ++m) {
    if (m > 0) t.emplace_back(0);
    t.push_back(s_coeffs[m]);
  }
  return RationalPolynomial(std::move(t));
}

const char* method_name(CountMethod m) { return m == CountMethod::Sturm ? "sturm" : "hermite"; }

// ---- quantization ----

template <class Real>
mpq_class to_rational(const Real& x) {
  using std::floor;
  using std::frexp;
  using std::isfinite;
  using std::ldexp;
  if (!isfinite(x)) throw DomainError("cannot convert a non-finite value to a rational");
  if (x == 0) return mpq_class(0);
  int e = 0;
  Real m = frexp(x < 0 ? -x : x, &e);  // m in [1/2, 1)
  mpz_class acc = 0;
  long bits = 0;
  while (m != 0) {
    m = ldexp(m, 32);
    const Real d = floor(m);
    acc <<= 32;
    acc += static_cast<unsigned long>(static_cast<double>(d));
    m -= d;
    bits += 32;
  }
  mpq_class r = dyadic(acc, static_cast<long>(e) - bits);
  return x < 0 ? mpq_class(-r) : r;
}

template <class Real>
mpq_class quantize_value(const Real& x, int digits) {
  using std::frexp;
  using std::ldexp;
  using std::round;
  if (digits < 1) throw DomainError("quantize: digits must be >= 1");
  const int bits = static_cast<int>(std::ceil(digits * std::log2(10.0))) + 1;
  if (x == 0 || bits >= std::numeric_limits<Real>::digits) return to_rational(x);
  int e = 0;
  const Real m = frexp(x, &e);
  const Real r = round(ldexp(m, bits));
  mpq_class q = to_rational(r);
  return dyadic(q.get_num(), static_cast<long>(e) - bits) / q.get_den();
}

template <class Real>
RationalPolynomial quantize_values(const std::vector<Real>& s_coeffs, int digits) {
  QVec s;
  for (const auto& x : s_coeffs) s.push_back(quantize_value(x, digits));
  return RationalPolynomial::from_even(s);
}

template <class Real>
RationalPolynomial quantize(const EvenPolynomial<Real>& poly, int digits) {
  std::vector<Real> v;
  for (const auto& c : poly.c) v.push_back(c.value);
  return quantize_values(v, digits);
}

// ---- root counting ----

RootCountReport sturm_count(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("root count of the zero polynomial");
  RootCountReport r;
  r.method = CountMethod::Sturm;
  if (p.degree() == 0) return r;
  const auto chain = sturm_chain(p.coeffs());
  r.n_real = variations_at_inf(chain, false) - variations_at_inf(chain, true);
  r.n_distinct_complex = p.degree() - (static_cast<int>(chain.back().size()) - 1);
  return r;
}

std::vector<mpq_class> power_sums(const RationalPolynomial& p, int count) {
  const int d = p.degree();
  if (d < 1) throw DomainError("power sums need a polynomial of degree >= 1");
  // monic coefficients: b[k] for x^k, b[d] = 1
  QVec b(p.coeffs());
  const mpq_class lc = p.leading();
  for (auto& x : b) x /= lc;
  QVec s(static_cast<std::size_t>(std::max(count, 1)));
  s[0] = d;
  for (int m = 1; m < count; ++m) {
    mpq_class acc = 0;
    if (m <= d) acc -= m * b[static_cast<std::size_t>(d - m)];
    for (int i = 1; i <= std::min(m - 1, d); ++i) {
      acc -= b[static_cast<std::size_t>(d - i)] * s[static_cast<std::size_t>(m - i)];
    }
    s[static_cast<std::size_t>(m)] = acc;
  }
  s.resize(static_cast<std::size_t>(count));
  return s;
}

RootCountReport hermite_signature_count(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("root count of the zero polynomial");
  RootCountReport r;
  r.method = CountMethod::Hermite;
  const int d = p.degree();
  if (d == 0) return r;
  const QVec s = power_sums(p, 2 * d - 1);
  std::vector<QVec> h(static_cast<std::size_t>(d), QVec(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) h[i][j] = s[static_cast<std::size_t>(i + j)];

  // Symmetric congruence elimination: each pivot is a diagonal entry of the
  // current Schur complement; its sign adds to the inertia.
  std::vector<int> live(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) live[static_cast<std::size_t>(i)] = i;
  int pos = 0;
  int neg = 0;
  while (!live.empty()) {
    int piv = -1;
    for (int i : live) {
      if (sgn(h[i][i]) != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) {
      // All remaining diagonals vanish: row/col i += row/col j turns a
      // nonzero h[i][j] into the pivot 2 h[i][j].
      int pi = -1;
      int pj = -1;
      for (int i : live) {
        for (int j : live) {
          if (i != j && sgn(h[i][j]) != 0) {
            pi = i;
            pj = j;
            break;
          }
        }
        if (pi >= 0) break;
      }
      if (pi < 0) break;  // remaining block is zero
      for (int k : live) h[pi][k] += h[pj][k];
      for (int k : live) h[k][pi] += h[k][pj];
      piv = pi;
    }
    const mpq_class pv = h[piv][piv];
    (sgn(pv) > 0 ? pos : neg) += 1;
    live.erase(std::find(live.begin(), live.end(), piv));
    for (int rr : live) {
      if (sgn(h[rr][piv]) == 0) continue;
      const mpq_class f = h[rr][piv] / pv;
      for (int c : live) h[rr][c] -= f * h[piv][c];
    }
  }
  r.n_real = pos - neg;
  r.n_distinct_complex = pos + neg;
  return r;
}

// ---- discriminant ----

mpz_class resultant_integer(ZVec a, ZVec b) {
  trim(a);
  trim(b);
  if (a.empty() || b.empty()) return 0;
  int s = 1;
  if (deg(a) < deg(b)) {
    std::swap(a, b);
    if (deg(a) % 2 == 1 && deg(b) % 2 == 1) s = -s;
  }
  const mpz_class ca = content(a);
  const mpz_class cb = content(b);
  const mpz_class t = power(ca, deg(b)) * power(cb, deg(a));
  divide_exact(a, ca);
  divide_exact(b, cb);
  if (deg(b) == 0) return s * t;
  mpz_class g = 1;
  mpz_class h = 1;
  while (true) {
    const int delta = deg(a) - deg(b);
    if (deg(a) % 2 == 1 && deg(b) % 2 == 1) s = -s;
    ZVec r = pseudo_remainder(a, b);
    a = std::move(b);
    if (r.empty()) return 0;
    divide_exact(r, g * power(h, delta));
    b = std::move(r);
    g = a.back();
    if (delta == 0) {
      // h unchanged
    } else {
      mpz_class num = power(g, delta);
      mpz_class den = power(h, delta - 1);
      mpz_divexact(h.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    }
    if (deg(b) > 0) continue;
    const int da = deg(a);
    mpz_class num = power(b.back(), da);
    mpz_class den = power(h, da - 1);
    mpz_class hh;
    mpz_divexact(hh.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return s * t * hh;
  }
}

mpq_class discriminant(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("discriminant of the zero polynomial");
  const int d = p.degree();
  if (d < 1) throw DomainError("discriminant needs degree >= 1");
  if (d == 1) return 1;
  mpz_class l = 1;
  for (const auto& c : p.coeffs()) l = lcm(l, mpz_class(c.get_den()));
  ZVec f;
  for (const auto& c : p.coeffs()) f.push_back(mpz_class(c * l));
  ZVec df;
  for (std::size_t i = 1; i < f.size(); ++i) df.push_back(f[i] * static_cast<long>(i));
  const mpz_class res = resultant_integer(f, df);
  const int sign = ((d * (d - 1) / 2) % 2 == 0) ? 1 : -1;
  // disc(l p) = l^{2d-2} disc(p)
  mpq_class out(sign * res, f.back() * power(l, 2 * d - 2));
  out.canonicalize();
  return out;
}

template <class Real>
Real discriminant_biquadratic(Real a0, Real a1, Real a2) {
  const Real inner = a1 * a1 - 4 * a2 * a0;
  return 16 * a2 * a0 * inner * inner;
}

// ---- minimisation over s >= 0 ----

template <class Real>
MinimumReport<Real> min_nonneg_s(const EvenPolynomial<Real>& poly) {
  MinimumReport<Real> out;
  if (poly.c.empty()) throw DomainError("min_nonneg_s: empty polynomial");
  QVec exact;
  for (const auto& c : poly.c) exact.push_back(to_rational(c.value));
  const RationalPolynomial P(exact);
  out.s_min = 0;
  out.value = poly.eval_s(Real(0));
  if (P.degree() < 1) return out;

  const RationalPolynomial Q = P.derivative();
  // Cauchy bound on the roots of Q.
  mpq_class bound = 0;
  for (int i = 0; i < Q.degree(); ++i) bound = std::max(bound, mpq_class(abs(Q[i] / Q.leading())));
  bound += 1;
  if (sgn(P.leading()) <= 0) {
    out.flagged = true;
    out.warning = "leading coefficient is not positive; minimum taken over s in [0, " +
                  std::to_string(bound.get_d()) + "]";
  }

  std::vector<Real> candidates;
  if (out.flagged) candidates.push_back(from_rational<Real>(bound));
  if (Q.degree() >= 1) {
    // Square-free part of Q, isolated by Sturm counts on (lo, hi].
    const QVec qs = quot(Q.coeffs(), gcd_poly(Q.coeffs(), Q.derivative().coeffs()));
    const auto chain = sturm_chain(qs);
    auto roots_in = [&](const mpq_class& lo, const mpq_class& hi) {
      return variations_at(chain, lo) - variations_at(chain, hi);
    };
    const int refine_steps = std::numeric_limits<Real>::digits + 8 +
                             static_cast<int>(std::ceil(std::log2(bound.get_d() + 1)));
    std::vector<std::pair<mpq_class, mpq_class>> stack{{mpq_class(0), bound}};
    while (!stack.empty()) {
      auto [lo, hi] = stack.back();
      stack.pop_back();
      const int n = roots_in(lo, hi);
      if (n == 0) continue;
      if (n > 1) {
        const mpq_class mid = (lo + hi) / 2;
        stack.emplace_back(lo, mid);
        stack.emplace_back(mid, hi);
        continue;
      }
      for (int it = 0; it < refine_steps; ++it) {
        if (sign_at(qs, hi) == 0) break;
        const mpq_class mid = (lo + hi) / 2;
        if (roots_in(lo, mid) == 1) hi = mid;
        else lo = mid;
      }
      candidates.push_back(from_rational<Real>(hi));
    }
  }
  for (const Real& s : candidates) {
    const Real v = poly.eval_s(s);
    if (v < out.value) {
      out.value = v;
      out.s_min = s;
    }
  }
  return out;
}

template <class Real>
GapReport<Real> biquadratic_gap(const Estimate<Real>& a0, const Estimate<Real>& a1,
                                 const Estimate<Real>& a2) {
  using std::abs;
  using std::sqrt;
  if (a0.value < 0 || a2.value < 0) {
    throw DomainError("biquadratic gap needs a0 >= 0 and a2 >= 0 (negative values indicate an upstream numerical failure)");
  }
  const Real root = sqrt(a2.value * a0.value);
  const Real root_err = sqrt((a0.value + a0.err) * (a2.value + a2.err)) - root;
  GapReport<Real> g;
  g.gap = a1.value + 2 * root;
  g.err = a1.err + 2 * root_err;
  g.degenerate = abs(abs(a1.value) - 2 * root) <= g.err;
  return g;
}

template <class Real>
RootCountReport count_with_stability(const EvenPolynomial<Real>& poly, int digits,
                                     CountMethod method) {
  RootCountReport nominal = count(quantize(poly, digits), method);
  const std::size_t nc = poly.c.size();
  std::vector<std::vector<int>> patterns;
  if (poly.degree_t() <= 4) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << nc); ++mask) {
      std::vector<int> p(nc);
      for (std::size_t i = 0; i < nc; ++i) p[i] = (mask >> i) & 1 ? 1 : -1;
      patterns.push_back(p);
    }
  } else {
    std::mt19937_64 rng(0x5eedULL + nc);
    std::bernoulli_distribution coin(0.5);
    for (int k = 0; k < 20; ++k) {
      std::vector<int> p(nc);
      for (auto& x : p) x = coin(rng) ? 1 : -1;
      patterns.push_back(p);
    }
  }
  bool stable = true;
  for (const auto& p : patterns) {
    std::vector<Real> shifted(nc);
    for (std::size_t i = 0; i < nc; ++i) shifted[i] = poly.c[i].value + p[i] * poly.c[i].err;
    const RationalPolynomial q = quantize_values(shifted, digits);
    if (q.is_zero()) {
      stable = false;
      break;
    }
    const RootCountReport r = count(q, method);
    if (r.n_real != nominal.n_real || r.n_distinct_complex != nominal.n_distinct_complex) {
      stable = false;
      break;
    }
  }
  nominal.stable = stable;
  return nominal;
}

SelftestReport poly_selftest(int trials, std::uint64_t seed) {
  SelftestReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> degree(0, 4);
  std::uniform_int_distribution<int> coef(-9, 9);
  std::uniform_int_distribution<int> nonzero(1, 9);
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < trials; ++k) {
    const int m = degree(rng);
    QVec s;
    for (int i = 0; i < m; ++i) s.emplace_back(coef(rng));
    s.emplace_back(nonzero(rng) * (coin(rng) ? 1 : -1));
    const RationalPolynomial p = RationalPolynomial::from_even(s);
    const RootCountReport a = sturm_count(p);
    const RootCountReport b = hermite_signature_count(p);
    ++rep.trials;
    if (a.n_real == b.n_real && a.n_distinct_complex == b.n_distinct_complex) {
      ++rep.agreements;
    } else {
      rep.disagreements.push_back(p.to_string() + ": sturm " + std::to_string(a.n_real) + "/" +
                                  std::to_string(a.n_distinct_complex) + ", hermite " +
                                  std::to_string(b.n_real) + "/" +
                                  std::to_string(b.n_distinct_complex));
    }
  }
  return rep;
}

#define XIMOD_INSTANTIATE_POLYALG(Real)                                                     \
  template mpq_class to_rational<Real>(const Real&);                                      \
  template mpq_class quantize_value<Real>(const Real&, int);                               \
  template RationalPolynomial quantize<Real>(const EvenPolynomial<Real>&, int);            \
  template RationalPolynomial quantize_values<Real>(const std::vector<Real>&, int);        \
  template Real discriminant_biquadratic<Real>(Real, Real, Real);                          \
  template MinimumReport<Real> min_nonneg_s<Real>(const EvenPolynomial<Real>&);            \
  template GapReport<Real> biquadratic_gap<Real>(const Estimate<Real>&, const Estimate<Real>&, \
                                                  const Estimate<Real>&);                  \
  template RootCountReport count_with_stability<Real>(const EvenPolynomial<Real>&, int, CountMethod); \
  template Real from_rational<Real>(const mpq_class&);

XIMOD_INSTANTIATE_POLYALG(double)
XIMOD_INSTANTIATE_POLYALG(Float128)

}  // namespace ximod
