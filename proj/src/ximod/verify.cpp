#include "ximod/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>

#include "json.hpp"

#include "ximod/coeffs.hpp"
#include "ximod/errors.hpp"
#include "ximod/moments.hpp"
#include "ximod/polyalg.hpp"
#include "ximod/theta.hpp"
#include "ximod/xi.hpp"

namespace ximod {

namespace {

using Point = std::vector<std::pair<std::string, double>>;

// Numerical tolerance for a suite whose pass threshold is `threshold`.
double numeric_tol(const VerifyOptions& o, double threshold) {
  return std::min(o.tol, threshold * 1e-3);
}

std::vector<double> grid_or(const std::vector<double>& given, std::vector<double> fallback) {
  return given.empty() ? fallback : given;
}

void finish_identity(SuiteReport& s) {
  s.pass = !s.rows.empty();
  s.worst = 0;
  for (const auto& r : s.rows) {
    s.pass = s.pass && r.pass;
    s.worst = std::max(s.worst, r.rel_err);
  }
}

void finish_inequality(SuiteReport& s) {
  s.pass = !s.rows.empty();
  s.worst = std::numeric_limits<double>::infinity();
  for (const auto& r : s.rows) {
    s.pass = s.pass && r.pass;
    s.worst = std::min(s.worst, r.rel_err);
  }
}

// sum_{k=0}^{m} (-1)^k t^{2k} X_{2k} / ((2k)! 2^{2k})
template <class Real>
Estimate<Real> cosine_partial_sum(Real t, int m, const std::map<int, Estimate<Real>>& x) {
  Estimate<Real> acc;
  Real w = 1;
  for (int k = 0; k <= m; ++k) {
    acc = acc + w * x.at(2 * k);
    w *= -(t * t) / (4 * Real((2 * k + 1) * (2 * k + 2)));
  }
  return acc;
}

template <class Real>
SuiteReport suite_identity(const VerifyOptions& o) {
  using std::abs;
  SuiteReport s;
  s.name = "identity";
  s.description = "4|xi(1/2+tau-it)|^2 against its theta-kernel representation";
  s.threshold = o.rel_tol > 0 ? o.rel_tol : 1e-8;
  const double ntol = numeric_tol(o, s.threshold);
  for (double tau : grid_or(o.tau_list, {0.05, 0.1, 0.25, 0.4, 0.5, 0.75})) {
    MomentTable<Real> table = build_moment_table<Real>(Real(tau), 0, Real(ntol * 1e-3));
    table.S[0].value *= Real(o.s0_scale);
    for (double t : grid_or(o.t_list, {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 14.1347251417})) {
      const Estimate<Real> fd = F_direct<Real>(Real(tau), Real(t), Real(ntol));
      const Estimate<Real> fr = F_rhs<Real>(Real(tau), Real(t), table, Real(ntol));
      CheckRow r;
      r.point = {{"tau", tau}, {"t", t}};
      r.what = "F_direct = F_rhs";
      r.lhs = to_double(fd.value);
      r.rhs = to_double(fr.value);
      r.rel_err = to_double(abs(fd.value - fr.value) / (1 + abs(fd.value)));
      r.pass = r.rel_err <= s.threshold;
      r.extra = {{"lhs_err", to_double(fd.err)}, {"rhs_err", to_double(fr.err)}};
      s.rows.push_back(r);
    }
  }
  finish_identity(s);
  return s;
}

template <class Real>
SuiteReport suite_grad(const VerifyOptions& o) {
  SuiteReport s;
  s.name = "grad";
  s.description = "closed-form dF/dtau against a central difference of F_direct";
  s.threshold = o.rel_tol > 0 ? o.rel_tol : 1e-5;
  const double ntol = numeric_tol(o, s.threshold);
  const Real h = Real(1e-4);
  const Real ftol = Real(std::min(ntol, 1e-15));
  for (double tau : grid_or(o.tau_list, {0.1, 0.3, 0.45})) {
    const MomentTable<Real> table = build_moment_table<Real>(Real(tau), 0, Real(ntol * 1e-3));
    const Estimate<Real> a0 = coeff_a0(table);
    for (double t : grid_or(o.t_list, {0.0, 1.0, 5.0})) {
      const Estimate<Real> d = dF_dtau<Real>(Real(tau), Real(t), table, a0, Real(ntol));
      const Real fp = F_direct<Real>(Real(tau) + h, Real(t), ftol).value;
      const Real fm = F_direct<Real>(Real(tau) - h, Real(t), ftol).value;
      const Real fd = (fp - fm) / (2 * h);
      CheckRow r;
      r.point = {{"tau", tau}, {"t", t}};
      r.what = "dF_dtau = central difference";
      r.lhs = to_double(d.value);
      r.rhs = to_double(fd);
      r.rel_err = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
      r.pass = r.rel_err <= s.threshold;
      r.extra = {{"lhs_err", to_double(d.err)}, {"step", to_double(h)}};
      s.rows.push_back(r);
    }
  }
  finish_identity(s);
  return s;
}

// Tolerance for a remainder integral: a small fraction of its leading term.
template <class Real>
Real remainder_tol(Real t, int m, const MomentTable<Real>& table, double floor_tol) {
  using std::abs;
  using std::pow;
  const Real w = pow(t, 2 * m + 2) / (factorial<Real>(2 * m + 2) * pow(Real(2), 2 * m + 2));
  const Real lead = std::min(abs(w * table.s(2 * m + 2).value), abs(w * table.a(2 * m + 2).value));
  return std::max(lead * Real(1e-4), Real(floor_tol));
}

struct InequalityInput {
  double lhs, rhs, direct_err;  // expects lhs < rhs
  double margin, margin_err;    // rhs - lhs by the remainder route
};

CheckRow inequality_row(const Point& p, const std::string& what, const InequalityInput& in) {
  CheckRow r;
  r.point = p;
  r.what = what;
  r.lhs = in.lhs;
  r.rhs = in.rhs;
  const double direct = in.rhs - in.lhs;
  const double scale = std::max({std::abs(in.lhs), std::abs(in.rhs), 1e-300});
  r.rel_err = in.margin / scale;
  const double agree_tol = 2 * (in.direct_err + in.margin_err) + 64 * 2.220446049250313e-16 * scale;
  const bool agree = std::abs(direct - in.margin) <= agree_tol;
  r.pass = in.margin > in.margin_err && agree;
  r.extra = {{"margin", in.margin},
             {"margin_err", in.margin_err},
             {"direct_difference", direct},
             {"direct_err", in.direct_err},
             {"routes_agree", agree ? 1.0 : 0.0}};
  return r;
}

template <class Real>
struct SandwichPieces {
  Estimate<Real> C, D, sum_s_even, sum_s_odd, sum_a_even;
  Estimate<Real> rem_s_even, rem_s_odd, rem_a_even;  // C - sum_s_even, C - sum_s_odd, D - sum_a_even
};

template <class Real>
SandwichPieces<Real> sandwich_pieces(const MomentTable<Real>& table, Real t, int n, double ntol) {
  SandwichPieces<Real> p;
  const Real tau = table.tau;
  std::tie(p.C, p.D) = cosine_kernels<Real>(tau, t, Real(ntol));
  p.sum_s_even = cosine_partial_sum(t, 2 * n - 2, table.S);
  p.sum_s_odd = cosine_partial_sum(t, 2 * n - 1, table.S);
  p.sum_a_even = cosine_partial_sum(t, 2 * n - 2, table.A);
  const double tiny = 1e-40;
  const auto even = cosine_remainder_kernels<Real>(tau, t, 2 * n - 2,
                                                   remainder_tol(t, 2 * n - 2, table, tiny));
  const auto odd = cosine_remainder_kernels<Real>(tau, t, 2 * n - 1,
                                                  remainder_tol(t, 2 * n - 1, table, tiny));
  p.rem_s_even = even.first;
  p.rem_a_even = even.second;
  p.rem_s_odd = odd.first;
  return p;
}

template <class Real>
SuiteReport suite_sandwich(const VerifyOptions& o) {
  SuiteReport s;
  s.name = "sandwich";
  s.description = "cosine-kernel Taylor sandwiches for C (two-sided) and D (upper)";
  s.threshold = 0;
  const double ntol = std::min(o.tol, 1e-12);
  for (int n : {1, 2}) {
    for (double tau : {0.1, 0.3}) {
      const MomentTable<Real> table = build_moment_table<Real>(Real(tau), 4 * n, Real(ntol * 1e-2));
      for (double t : {0.5, 2.0, 5.0}) {
        const SandwichPieces<Real> p = sandwich_pieces(table, Real(t), n, ntol * 1e-2);
        const Point pt{{"n", n}, {"tau", tau}, {"t", t}};
        s.rows.push_back(inequality_row(
            pt, "sum_S^{2n-1} < C",
            {to_double(p.sum_s_odd.value), to_double(p.C.value), to_double(p.sum_s_odd.err + p.C.err),
             to_double(p.rem_s_odd.value), to_double(p.rem_s_odd.err)}));
        s.rows.push_back(inequality_row(
            pt, "C < sum_S^{2n-2}",
            {to_double(p.C.value), to_double(p.sum_s_even.value), to_double(p.sum_s_even.err + p.C.err),
             to_double(-p.rem_s_even.value), to_double(p.rem_s_even.err)}));
        s.rows.push_back(inequality_row(
            pt, "D < sum_A^{2n-2}",
            {to_double(p.D.value), to_double(p.sum_a_even.value), to_double(p.sum_a_even.err + p.D.err),
             to_double(-p.rem_a_even.value), to_double(p.rem_a_even.err)}));
      }
    }
  }
  finish_inequality(s);
  return s;
}

template <class Real>
SuiteReport suite_dominance(const VerifyOptions& o) {
  SuiteReport s;
  s.name = "dominance";
  s.description = "f_{tau,n}(t) > dF/dtau(tau,t)";
  s.threshold = 0;
  const double ntol = std::min(o.tol, 1e-12);
  for (int n : {1, 2}) {
    for (double tau_d : {0.1, 0.3}) {
      const Real tau = Real(tau_d);
      const MomentTable<Real> table = build_moment_table<Real>(tau, 4 * n, Real(ntol * 1e-2));
      const EvenPolynomial<Real> f = build_f(table, n);
      const Estimate<Real> a0 = coeff_a0(table);
      for (double t_d : {0.5, 2.0, 5.0}) {
        const Real t = Real(t_d);
        const Real t2 = t * t;
        const SandwichPieces<Real> p = sandwich_pieces(table, t, n, ntol * 1e-2);
        const Estimate<Real> d = dF_dtau_from(t, table, a0, p.C, p.D);
        const Real pw = Real(0.25) - tau * tau;
        const Real l = t2 * t2 + 2 * (Real(0.25) + tau * tau) * t2 + pw * pw;
        // f - dF/dtau = 8 tau t^2 (sum_S^{2n-2} - C) + 8 tau (1/4 - tau^2) (C - sum_S^{2n-1})
        //             + L (sum_A^{2n-2} - D)
        const Estimate<Real> margin = (-8 * tau * t2) * p.rem_s_even +
                                      (8 * tau * pw) * p.rem_s_odd + (-l) * p.rem_a_even;
        s.rows.push_back(inequality_row(
            {{"n", n}, {"tau", tau_d}, {"t", t_d}}, "dF/dtau < f_{tau,n}",
            {to_double(d.value), to_double(f.eval_s(t2)), to_double(d.err + f.err_at_s(t2)),
             to_double(margin.value), to_double(margin.err)}));
      }
    }
  }
  finish_inequality(s);
  return s;
}

template <class Real>
SuiteReport suite_moment_growth(const VerifyOptions& o) {
  using std::floor;
  SuiteReport s;
  s.name = "moment_growth";
  s.description = "growth bound S_{2k}/2^{2k} < pi^4 [G(|tau|+1/2)+G(1/2)] ([|tau|]+3)!/(36e) 2^{2k-3/2} k!";
  s.threshold = 0;
  const double ntol = std::min(o.tol, 1e-10);
  for (double tau : {0.1, 0.3, 0.5, 1.0}) {
    const MomentTable<Real> table = build_moment_table<Real>(Real(tau), 16, Real(ntol));
    const double at = std::abs(tau);
    const double pre = std::pow(M_PI, 4) * (std::tgamma(at + 0.5) + std::tgamma(0.5)) *
                       std::tgamma(std::floor(at) + 4) / (36 * std::exp(1.0));
    for (int k = 0; k <= 8; ++k) {
      const double lhs = to_double(table.s(2 * k).value) / std::ldexp(1.0, 2 * k);
      const double err = to_double(table.s(2 * k).err) / std::ldexp(1.0, 2 * k);
      const double rhs = pre * std::pow(2.0, 2 * k - 1.5) * std::tgamma(k + 1.0);
      CheckRow r;
      r.point = {{"tau", tau}, {"k", k}};
      r.what = "S_{2k}/2^{2k} < bound";
      r.lhs = lhs;
      r.rhs = rhs;
      r.rel_err = (rhs - lhs) / rhs;
      r.pass = lhs + err < rhs;
      r.extra = {{"lhs_err", err}};
      s.rows.push_back(r);
    }
  }
  finish_inequality(s);
  return s;
}

template <class Real>
SuiteReport suite_constant_term(const VerifyOptions& o) {
  SuiteReport s;
  s.name = "constant_term";
  s.description = "J+ bound, a_tau(0) second-factor bound, a_tau(0) > 0, a_{tau,1}(2) > 0 and increasing";
  s.threshold = 0;
  const double ntol = std::min(o.tol, 1e-12);
  const double theta_sum = to_double(psi<Real>(Real(2), ToleranceSpec<Real>{Real(1e-18)}).value);
  double prev_a2 = -1;
  double prev_a2_err = 0;
  double prev_tau = 0;
  auto add = [&s](const Point& p, const std::string& what, double lhs, double rhs, double err) {
    CheckRow r;
    r.point = p;
    r.what = what;
    r.lhs = lhs;
    r.rhs = rhs;
    r.rel_err = (rhs - lhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    r.pass = lhs + err < rhs;
    r.extra = {{"err", err}};
    s.rows.push_back(r);
  };
  for (int i = 1; i <= 10; ++i) {
    const double tau = 0.05 * i;
    const MomentTable<Real> table = build_moment_table<Real>(Real(tau), 2, Real(ntol));
    const Point p{{"tau", tau}};
    const auto& jp = table.one_dim.Jplus;
    add(p, "J+ < 0.04525351", to_double(jp.value), 0.04525351, to_double(jp.err));
    const Estimate<Real> second = coeff_a0_second_factor(table);
    add(p, "tau (7.176026/4) sum e^{-2 pi n^2} < second factor of a_tau(0)",
        tau * (7.176026 / 4) * theta_sum, to_double(second.value), to_double(second.err));
    const Estimate<Real> a0 = coeff_a0(table);
    add(p, "0 < a_tau(0)", 0.0, to_double(a0.value), to_double(a0.err));
    const Estimate<Real> a2 = coeff_trail_even(table, 1);
    add(p, "0 < a_{tau,1}(2)", 0.0, to_double(a2.value), to_double(a2.err));
    if (prev_a2 >= 0) {
      add({{"tau_prev", prev_tau}, {"tau", tau}}, "a_{tau,1}(2) increasing", prev_a2,
          to_double(a2.value), prev_a2_err + to_double(a2.err));
    }
    prev_a2 = to_double(a2.value);
    prev_a2_err = to_double(a2.err);
    prev_tau = tau;
  }
  finish_inequality(s);
  return s;
}

template <class Real>
SuiteReport suite_theta(const VerifyOptions&) {
  using std::abs;
  SuiteReport s;
  s.name = "theta";
  s.description = "psi(y) by direct summation against the modular transformation";
  s.threshold = 1e-12;
  const ToleranceSpec<Real> spec{Real(1e-15)};
  for (int i = 0; i <= 60; ++i) {
    const double y = std::pow(10.0, -3.0 + 0.1 * i);
    const ThetaPoint<Real> a = psi_series<Real>(Real(y), spec);
    const ThetaPoint<Real> b = psi_via_modular<Real>(Real(y), spec);
    CheckRow r;
    r.point = {{"y", y}};
    r.what = "series = modular";
    r.lhs = to_double(a.value);
    r.rhs = to_double(b.value);
    r.rel_err = to_double(abs(a.value - b.value));
    r.pass = r.rel_err < s.threshold;
    s.rows.push_back(r);
  }
  finish_identity(s);
  return s;
}

template <class Real>
SuiteReport suite_symmetry(const VerifyOptions& o) {
  SuiteReport s;
  s.name = "symmetry";
  s.description = "S_j(-tau) = S_j(tau), A_j(-tau) = -A_j(tau), F(-tau,t) = F(tau,t)";
  s.threshold = 1e-9;
  const double ntol = std::min(o.tol, 1e-13);
  auto add = [&s](const Point& p, const std::string& what, double lhs, double rhs, double err) {
    CheckRow r;
    r.point = p;
    r.what = what;
    r.lhs = lhs;
    r.rhs = rhs;
    r.rel_err = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    r.pass = std::abs(lhs - rhs) <= 10 * err + s.threshold * std::max(std::abs(lhs), std::abs(rhs));
    r.extra = {{"err", err}};
    s.rows.push_back(r);
  };
  for (double tau : {0.1, 0.3}) {
    const MomentTable<Real> plus = build_moment_table<Real>(Real(tau), 4, Real(ntol));
    const MomentTable<Real> minus = build_moment_table<Real>(Real(-tau), 4, Real(ntol));
    for (int j : {0, 2, 4}) {
      add({{"tau", tau}, {"j", j}}, "S_j(-tau) = S_j(tau)", to_double(minus.s(j).value),
          to_double(plus.s(j).value), to_double(minus.s(j).err + plus.s(j).err));
      add({{"tau", tau}, {"j", j}}, "A_j(-tau) = -A_j(tau)", to_double(minus.a(j).value),
          -to_double(plus.a(j).value), to_double(minus.a(j).err + plus.a(j).err));
    }
    for (double t : {1.0, 5.0}) {
      const Estimate<Real> fp = F_direct<Real>(Real(tau), Real(t), Real(ntol));
      const Estimate<Real> fm = F_direct<Real>(Real(-tau), Real(t), Real(ntol));
      add({{"tau", tau}, {"t", t}}, "F(-tau,t) = F(tau,t)", to_double(fm.value),
          to_double(fp.value), to_double(fm.err + fp.err));
    }
  }
  finish_identity(s);
  s.pass = std::all_of(s.rows.begin(), s.rows.end(), [](const CheckRow& r) { return r.pass; });
  return s;
}

SuiteReport suite_poly() {
  SuiteReport s;
  s.name = "poly";
  s.description = "Sturm and Hermite root counts agree; known counts and discriminants";
  s.threshold = 0;
  const SelftestReport st = poly_selftest(200);
  CheckRow sr;
  sr.point = {{"trials", st.trials}};
  sr.what = "random even integer polynomials: Sturm = Hermite";
  sr.lhs = st.agreements;
  sr.rhs = st.trials;
  sr.rel_err = st.trials - st.agreements;
  sr.pass = st.pass();
  s.rows.push_back(sr);

  struct Known {
    std::vector<long> s_coeffs;
    int n_real;
    int n_distinct;
    long discr;
  };
  const std::vector<Known> known{{{4, -5, 1}, 4, 4, 5184}, {{1, 0, 1}, 0, 4, 256},
                                 {{1, -2, 1}, 2, 2, 0},   {{2, 3, 1}, 0, 4, 32}};
  for (const auto& k : known) {
    std::vector<mpq_class> q;
    for (long c : k.s_coeffs) q.emplace_back(c);
    const RationalPolynomial p = RationalPolynomial::from_even(q);
    const RootCountReport a = sturm_count(p);
    const RootCountReport b = hermite_signature_count(p);
    const mpq_class d = discriminant(p);
    CheckRow r;
    r.point = {{"a0", k.s_coeffs[0]}, {"a1", k.s_coeffs[1]}, {"a2", k.s_coeffs[2]}};
    r.what = p.to_string();
    r.lhs = a.n_real;
    r.rhs = k.n_real;
    r.pass = a.n_real == k.n_real && b.n_real == k.n_real && a.n_distinct_complex == k.n_distinct &&
             b.n_distinct_complex == k.n_distinct && d == k.discr;
    r.rel_err = r.pass ? 0 : 1;
    r.extra = {{"hermite_n_real", b.n_real},
               {"n_distinct", a.n_distinct_complex},
               {"discriminant", d.get_d()}};
    s.rows.push_back(r);
  }
  finish_identity(s);
  return s;
}

template <class Real>
SuiteReport run_suite(const std::string& name, const VerifyOptions& o) {
  if (name == "identity") return suite_identity<Real>(o);
  if (name == "grad") return suite_grad<Real>(o);
  if (name == "sandwich") return suite_sandwich<Real>(o);
  if (name == "dominance") return suite_dominance<Real>(o);
  if (name == "moment_growth") return suite_moment_growth<Real>(o);
  if (name == "constant_term") return suite_constant_term<Real>(o);
  if (name == "theta") return suite_theta<Real>(o);
  if (name == "symmetry") return suite_symmetry<Real>(o);
  if (name == "poly") return suite_poly();
  throw DomainError("unknown verification suite '" + name + "'");
}

nlohmann::ordered_json point_json(const std::vector<std::pair<std::string, double>>& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

}  // namespace

bool VerifyReport::pass() const {
  return !suites.empty() &&
         std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identity", "grad",  "sandwich", "dominance", "moment_growth",
                                              "constant_term", "theta", "symmetry", "poly"};
  return names;
}

SuiteReport verify_suite(const std::string& requested, const VerifyOptions& opts) {
  const std::string name = requested == "thm1" ? "identity" : requested;
  if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end()) {
    throw DomainError("unknown verification suite '" + name + "'");
  }
  try {
    if (opts.precision == Precision::Extended) return run_suite<Float128>(name, opts);
    return run_suite<double>(name, opts);
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    SuiteReport s;
    s.name = name;
    s.pass = false;
    s.error = e.what();
    return s;
  }
}

VerifyReport verify_all(const VerifyOptions& opts) {
  VerifyReport r;
  for (const auto& name : suite_names()) r.suites.push_back(verify_suite(name, opts));
  return r;
}

std::string to_json(const VerifyReport& r, bool include_rows) {
  nlohmann::ordered_json doc;
  doc["pass"] = r.pass();
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& s : r.suites) {
    nlohmann::ordered_json js;
    js["suite"] = s.name;
    js["description"] = s.description;
    js["pass"] = s.pass;
    js["threshold"] = s.threshold;
    js["worst"] = s.worst;
    if (!s.error.empty()) js["error"] = s.error;
    if (include_rows) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& row : s.rows) {
        nlohmann::ordered_json jr;
        jr["point"] = point_json(row.point);
        jr["check"] = row.what;
        jr["lhs"] = row.lhs;
        jr["rhs"] = row.rhs;
        jr["rel_err"] = row.rel_err;
        jr["pass"] = row.pass;
        if (!row.extra.empty()) jr["detail"] = point_json(row.extra);
        rows.push_back(jr);
      }
      js["checks"] = rows;
    }
    suites.push_back(js);
  }
  doc["suites"] = suites;
  return doc.dump(1);
}

}  // namespace ximod
