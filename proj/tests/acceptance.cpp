// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// all ten pass. Tolerances are fixed here, not taken from the command line.

#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "oracles.hpp"
#include "ximod/cache.hpp"
#include "ximod/moments.hpp"
#include "ximod/polyalg.hpp"
#include "ximod/scan.hpp"
#include "ximod/theta.hpp"
#include "ximod/verify.hpp"
#include "ximod/xi.hpp"

using namespace ximod;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome from_suites(std::initializer_list<const char*> names) {
  bool pass = true;
  std::string detail;
  for (const char* n : names) {
    const SuiteReport s = verify_suite(n, VerifyOptions{});
    pass = pass && s.pass;
    if (!detail.empty()) detail += "; ";
    detail += std::string(n) + " " + (s.pass ? "ok" : "failed") + " (" + std::to_string(s.rows.size()) +
              " checks, worst " + fmt("%.3g", s.worst) + ")";
    if (!s.error.empty()) detail += " error: " + s.error;
  }
  return {pass, detail};
}

const ScanResult& default_scan() {
  static const ScanResult r = [] {
    ScanConfig cfg;
    cfg.record_timing = false;
    return run_scan(cfg);
  }();
  return r;
}

Outcome discriminant_crosscheck() {
  int rows = 0;
  double worst = 0;
  bool pass = true;
  for (const ScanRecord& rec : default_scan().records) {
    if (rec.n != 1) continue;
    ++rows;
    if (!rec.discr_closed) {
      pass = false;
      continue;
    }
    const double c = *rec.discr_closed;
    const double rel = std::abs(rec.discr - c) / std::max({std::abs(rec.discr), std::abs(c), 1e-300});
    worst = std::max(worst, rel);
    if (rel > 1e-9 || rec.discr < 0 || c < 0) pass = false;
  }
  pass = pass && rows == 63;
  return {pass, std::to_string(rows) + " n=1 rows, worst relative difference " + fmt("%.3g", worst)};
}

Outcome root_count_crosscheck() {
  const SelftestReport st = poly_selftest(200, 20240501);
  bool pass = st.pass();
  int mismatches = 0;
  for (const ScanRecord& rec : default_scan().records) {
    if (rec.n_real != rec.n_real_hermite || rec.n_distinct != rec.n_distinct_hermite) ++mismatches;
  }
  pass = pass && mismatches == 0;
  auto even = [](std::initializer_list<long> s) {
    std::vector<mpq_class> c;
    for (long v : s) c.emplace_back(v);
    return RationalPolynomial::from_even(c);
  };
  bool known = true;
  for (CountMethod m : {CountMethod::Sturm, CountMethod::Hermite}) {
    auto count = [m](const RationalPolynomial& p) {
      return m == CountMethod::Sturm ? sturm_count(p) : hermite_signature_count(p);
    };
    known = known && count(even({4, -5, 1})).n_real == 4;
    known = known && count(even({1, 0, 1})).n_real == 0;
    const RootCountReport d = count(even({1, -2, 1}));
    known = known && d.n_real == 2 && d.n_distinct_complex == 2;
  }
  pass = pass && known;
  return {pass, "random " + std::to_string(st.agreements) + "/" + std::to_string(st.trials) +
                    ", scanned rows with disagreement " + std::to_string(mismatches) +
                    ", known cases " + (known ? "exact" : "wrong")};
}

Outcome desk_scale_consistency() {
  const ScanResult& r = default_scan();
  int bad = 0;
  double min_margin = 1e300;
  for (const ScanRecord& rec : r.records) {
    min_margin = std::min(min_margin, rec.margin);
    if (rec.positivity != Positivity::Positive || rec.n_real != 0 || !(rec.margin > 0) || !rec.error.empty()) {
      ++bad;
    }
  }
  const bool pass = bad == 0 && r.records.size() == 126;
  return {pass, std::to_string(r.records.size()) + " rows, " + std::to_string(bad) +
                    " not positive/root-free, smallest margin " + fmt("%.3g", min_margin)};
}

Outcome oracle_equivalences() {
  bool pass = true;
  std::string detail;
  const MomentTable<double> t = build_moment_table<double>(0.25, 2, 1e-12);
  double worst2d = 0;
  for (int j : {0, 2}) {
    const double ref = oracle::brute_moment_2d(0.25, j, false);
    worst2d = std::max(worst2d, std::abs(t.s(j).value - ref) / std::abs(ref));
  }
  pass = pass && worst2d <= 1e-6;
  detail += "2D quadrature rel " + fmt("%.2g", worst2d);

  double worst_theta = 0;
  for (int i = 0; i <= 60; ++i) {
    const double y = std::pow(10.0, -3.0 + 6.0 * i / 60);
    const double lhs = psi_series<double>(y, {1e-16}).value;
    const double rhs = -0.5 + 0.5 / std::sqrt(y) + psi_series<double>(1 / y, {1e-16}).value / std::sqrt(y);
    worst_theta = std::max(worst_theta, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  pass = pass && worst_theta < 1e-12;
  detail += "; theta residual " + fmt("%.2g", worst_theta);

  auto F0 = [](double tt) { return F_direct<double>(0, tt, 1e-15).value; };
  const auto [t_min, f_min] = boost::math::tools::brent_find_minima(F0, 14.0, 14.3, 40);
  const double f14 = F0(14.0);
  const bool zero_ok = std::abs(t_min - 14.1347) <= 5e-4 && f_min < 1e-10 * f14;
  pass = pass && zero_ok;
  detail += "; min of F(0,t) on [14,14.3] at t=" + fmt("%.7f", t_min) + " value " + fmt("%.2g", f_min) +
            " (F(0,14)=" + fmt("%.4g", f14) + ")";
  return {pass, detail};
}

Outcome determinism_and_cache() {
  const fs::path dir = fs::temp_directory_path() / ("ximod_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  ScanConfig cfg;
  cfg.cache_dir = dir.string();
  cfg.record_timing = false;
  const std::string cold = to_csv(run_scan(cfg));
  const std::string warm1 = to_csv(run_scan(cfg));
  const std::string warm2 = to_csv(run_scan(cfg));
  const bool identical = warm1 == warm2 && cold == warm1;

  const MomentTable<double> t = build_moment_table<double>(0.3, 6, 1e-10);
  cache_store(t, dir.string());
  const CacheLookup<double> hit = cache_load<double>(0.3, 1e-10, 6, dir.string());
  bool exact = hit.table.has_value();
  if (exact) {
    const MomentTable<double>& u = *hit.table;
    exact = u.tau == t.tau && u.tol_used == t.tol_used && u.j_max == t.j_max;
    for (const auto& [j, e] : t.S) {
      exact = exact && u.S.at(j).value == e.value && u.S.at(j).err == e.err &&
              u.A.at(j).value == t.A.at(j).value && u.A.at(j).err == t.A.at(j).err;
    }
    for (auto m : {&OneDimIntegrals<double>::Jplus, &OneDimIntegrals<double>::JminusLog,
                   &OneDimIntegrals<double>::I1, &OneDimIntegrals<double>::I2, &OneDimIntegrals<double>::I3}) {
      exact = exact && (u.one_dim.*m).value == (t.one_dim.*m).value && (u.one_dim.*m).err == (t.one_dim.*m).err;
    }
  }
  const CacheLookup<double> stale =
      table_from_cache_json<double>(table_to_cache_json(t, kCacheFormatVersion + 1), 0.3, 1e-10, 6);
  const bool rejected = !stale.table && stale.status == CacheStatus::VersionMismatch;
  fs::remove_all(dir);
  return {identical && exact && rejected,
          std::string("warm scans ") + (identical ? "byte-identical" : "DIFFER") + ", round trip " +
              (exact ? "bit-exact" : "NOT exact") + ", stale version " + (rejected ? "rejected" : "ACCEPTED")};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"theta-kernel identity on 6x7 grid (rel 1e-8)", [] { return from_suites({"identity"}); }},
      {"closed-form gradient vs central difference (rel 1e-5)", [] { return from_suites({"grad"}); }},
      {"even-moment growth bound, k = 0..8", [] { return from_suites({"moment_growth"}); }},
      {"constant-term constants and leading-coefficient monotonicity", [] { return from_suites({"constant_term"}); }},
      {"cosine sandwiches and truncation dominance", [] { return from_suites({"sandwich", "dominance"}); }},
      {"subresultant vs closed biquadratic discriminant (rel 1e-9)", discriminant_crosscheck},
      {"Sturm vs Hermite root counts", root_count_crosscheck},
      {"default scan: positive, no real roots, margin > 0", desk_scale_consistency},
      {"oracle equivalences: 2D moments, theta identity, first zero", oracle_equivalences},
      {"determinism and cache integrity", determinism_and_cache},
  };
  int failed = 0;
  const Clock::time_point start = Clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Clock::time_point t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s -- %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              std::chrono::duration<double>(Clock::now() - start).count());
  return failed == 0 ? 0 : 1;
}
