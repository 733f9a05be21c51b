#include "ximod/scan.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ximod/cache.hpp"
#include "ximod/coeffs.hpp"
#include "ximod/errors.hpp"
#include "ximod/moments.hpp"
#include "ximod/polyalg.hpp"

namespace ximod {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

long elapsed_ms(Clock::time_point since) {
  return static_cast<long>(
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count());
}

template <class Real>
struct CellContext {
  const ScanConfig& cfg;
  std::vector<std::string>& warnings;
  std::mutex& warn_mu;

  void warn(const std::string& w) {
    std::lock_guard<std::mutex> lock(warn_mu);
    warnings.push_back(w);
  }

  MomentTable<Real> table(Real tau, Real tol, int j_max) {
    if (!cfg.cache_dir.empty()) {
      CacheLookup<Real> hit = cache_load(tau, tol, j_max, cfg.cache_dir);
      if (hit.table) return *hit.table;
      if (hit.status != CacheStatus::Missing) warn(hit.message);
    }
    MomentTable<Real> t = build_moment_table(tau, j_max, tol);
    if (!cfg.cache_dir.empty()) {
      try {
        cache_store(t, cfg.cache_dir);
      } catch (const CacheError& e) {
        warn(e.what());
      }
    }
    return t;
  }
};

template <class Real>
ScanRecord evaluate_cell(const MomentTable<Real>& table, int n, int digits) {
  ScanRecord rec;
  rec.tau = to_double(table.tau);
  rec.n = n;
  const CoefficientSet<Real> cs = build_coefficients(table, n);
  for (const auto& e : cs.a) {
    rec.a.push_back(to_double(e.value));
    rec.a_err.push_back(to_double(e.err));
  }
  rec.trail_odd = to_double(cs.trail_odd.value);
  rec.trail_odd_err = to_double(cs.trail_odd.err);
  rec.trail_even = to_double(cs.trail_even.value);
  rec.trail_even_err = to_double(cs.trail_even.err);

  const EvenPolynomial<Real> f = to_polynomial(cs);
  const MinimumReport<Real> m = min_nonneg_s(f);
  const Real err = f.err_at_s(m.s_min);
  const Real margin = m.value - 10 * err;
  rec.min_s = to_double(m.s_min);
  rec.min_value = to_double(m.value);
  rec.min_err = to_double(err);
  rec.margin = to_double(margin);

  const RootCountReport sturm = count_with_stability(f, digits, CountMethod::Sturm);
  const RationalPolynomial q = quantize(f, digits);
  const RootCountReport herm = hermite_signature_count(q);
  rec.n_real = sturm.n_real;
  rec.n_distinct = sturm.n_distinct_complex;
  rec.stable = sturm.stable;
  rec.n_real_hermite = herm.n_real;
  rec.n_distinct_hermite = herm.n_distinct_complex;
  rec.discr = discriminant(q).get_d();

  if (m.flagged) {
    rec.positivity = Positivity::Inconclusive;
  } else if (margin > 0) {
    rec.positivity = Positivity::Positive;
  } else if (m.value < -10 * err && rec.n_real >= 1) {
    rec.positivity = Positivity::Violated;
  } else {
    rec.positivity = Positivity::Inconclusive;
  }

  if (n == 1) {
    const Estimate<Real> a0 = f.c[0];
    const Estimate<Real> a1 = f.c[1];
    const Estimate<Real> a2 = f.c[2];
    rec.discr_closed = to_double(discriminant_biquadratic(a0.value, a1.value, a2.value));
    try {
      const GapReport<Real> g = biquadratic_gap(a0, a1, a2);
      rec.corollary_gap = to_double(g.gap);
      rec.gap_degenerate = g.degenerate;
    } catch (const DomainError& e) {
      rec.error = e.what();
    }
  }
  return rec;
}

template <class Real>
std::vector<ScanRecord> process_tau(double tau_d, const ScanConfig& cfg, int j_max,
                                    CellContext<Real>& ctx) {
  const Real tau = Real(tau_d);
  std::vector<ScanRecord> out;
  const Clock::time_point t0 = Clock::now();
  std::optional<MomentTable<Real>> table;
  std::string table_error;
  try {
    table = ctx.table(tau, Real(cfg.tol), j_max);
  } catch (const std::exception& e) {
    table_error = e.what();
  }
  long table_ms = elapsed_ms(t0);

  for (int n : cfg.n_list) {
    const Clock::time_point c0 = Clock::now();
    ScanRecord rec;
    rec.tau = tau_d;
    rec.n = n;
    if (!table) {
      rec.error = "moment table: " + table_error;
    } else {
      try {
        rec = evaluate_cell(*table, n, cfg.digits);
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      if (rec.positivity == Positivity::Inconclusive) {
        try {
          const MomentTable<Real> fine = ctx.table(tau, Real(cfg.tol / 100), j_max);
          ScanRecord again = evaluate_cell(fine, n, cfg.digits + 8);
          again.retried = true;
          rec = std::move(again);
        } catch (const std::exception& e) {
          rec.retried = true;
          rec.error = std::string("retry: ") + e.what();
        }
      }
    }
    rec.tau = tau_d;
    rec.n = n;
    rec.runtime_ms = cfg.record_timing ? elapsed_ms(c0) + table_ms : 0;
    table_ms = 0;
    out.push_back(std::move(rec));
  }
  return out;
}

template <class Real>
ScanResult run_scan_typed(const ScanConfig& cfg) {
  const std::vector<double> taus = scan_taus(cfg);
  const int max_n = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  const int j_max = required_order(max_n);

  ScanResult result;
  result.max_n = max_n;
  std::mutex warn_mu;
  CellContext<Real> ctx{cfg, result.warnings, warn_mu};

  std::vector<std::vector<ScanRecord>> rows(taus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= taus.size()) return;
      rows[i] = process_tau<Real>(taus[i], cfg, j_max, ctx);
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(taus.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& r : rows) {
    for (auto& rec : r) {
      if (rec.positivity == Positivity::Violated) {
        result.reproducers.push_back("ximod scan --tau-list " + fmt(rec.tau) + " --n-list " +
                                     std::to_string(rec.n) + " --tol " + fmt(cfg.tol) +
                                     " --digits " + std::to_string(cfg.digits) +
                                     (cfg.precision == Precision::Extended ? " --extended" : ""));
      }
      result.records.push_back(std::move(rec));
    }
  }
  std::sort(result.warnings.begin(), result.warnings.end());
  return result;
}

}  // namespace

const char* positivity_name(Positivity p) {
  switch (p) {
    case Positivity::Positive: return "positive";
    case Positivity::Inconclusive: return "inconclusive";
    case Positivity::Violated: return "violated";
  }
  return "unknown";
}

void validate(const ScanConfig& cfg) {
  if (cfg.tau_list.empty()) {
    if (!(cfg.tau_min > 0 && cfg.tau_min < cfg.tau_max)) {
      throw DomainError("scan needs 0 < tau_min < tau_max");
    }
    if (cfg.steps < 1) throw DomainError("scan needs steps >= 1");
  }
  for (double t : cfg.tau_list) {
    if (!(std::abs(t) < 1.5)) throw DomainError("scan taus must satisfy |tau| < 3/2");
  }
  if (cfg.n_list.empty()) throw DomainError("scan needs at least one n");
  for (int n : cfg.n_list) {
    if (n < 1) throw DomainError("scan n values must be >= 1");
  }
  if (!(cfg.tol > 0)) throw DomainError("scan tolerance must be positive");
  if (cfg.digits < 1) throw DomainError("scan digits must be >= 1");
}

std::vector<double> scan_taus(const ScanConfig& cfg) {
  if (!cfg.tau_list.empty()) return cfg.tau_list;
  std::vector<double> taus;
  if (cfg.steps == 1) return {cfg.tau_min};
  const double h = (cfg.tau_max - cfg.tau_min) / (cfg.steps - 1);
  for (int i = 0; i < cfg.steps; ++i) taus.push_back(cfg.tau_min + i * h);
  taus.back() = cfg.tau_max;
  return taus;
}

ScanResult run_scan(const ScanConfig& cfg) {
  validate(cfg);
  if (cfg.precision == Precision::Extended) return run_scan_typed<Float128>(cfg);
  return run_scan_typed<double>(cfg);
}

std::string csv_header(int max_n) {
  std::string h = "tau,n";
  for (int k = 0; k <= 2 * max_n - 2; ++k) h += ",a" + std::to_string(k);
  h += ",trail_odd,trail_even,positivity,margin,n_real,discr,discr_closed,corollary_gap,runtime_ms";
  return h;
}

std::string to_csv(const ScanResult& r) {
  std::ostringstream os;
  os << csv_header(r.max_n) << "\n";
  for (const auto& rec : r.records) {
    os << fmt(rec.tau) << "," << rec.n;
    for (int k = 0; k <= 2 * r.max_n - 2; ++k) {
      os << ",";
      if (k < static_cast<int>(rec.a.size())) os << fmt(rec.a[static_cast<std::size_t>(k)]);
    }
    os << "," << fmt(rec.trail_odd) << "," << fmt(rec.trail_even) << ","
       << positivity_name(rec.positivity) << "," << fmt(rec.margin) << "," << rec.n_real << ","
       << fmt(rec.discr) << "," << (rec.discr_closed ? fmt(*rec.discr_closed) : "") << ","
       << (rec.corollary_gap ? fmt(*rec.corollary_gap) : "") << "," << rec.runtime_ms << "\n";
  }
  return os.str();
}

std::string to_jsonl(const ScanResult& r) {
  std::ostringstream os;
  for (const auto& rec : r.records) {
    nlohmann::ordered_json j;
    j["tau"] = rec.tau;
    j["n"] = rec.n;
    for (int k = 0; k <= 2 * r.max_n - 2; ++k) {
      const std::string key = "a" + std::to_string(k);
      if (k < static_cast<int>(rec.a.size())) j[key] = rec.a[static_cast<std::size_t>(k)];
      else j[key] = nullptr;
    }
    j["trail_odd"] = rec.trail_odd;
    j["trail_even"] = rec.trail_even;
    j["positivity"] = positivity_name(rec.positivity);
    j["margin"] = rec.margin;
    j["n_real"] = rec.n_real;
    j["discr"] = rec.discr;
    j["discr_closed"] = rec.discr_closed ? nlohmann::ordered_json(*rec.discr_closed) : nullptr;
    j["corollary_gap"] = rec.corollary_gap ? nlohmann::ordered_json(*rec.corollary_gap) : nullptr;
    j["runtime_ms"] = rec.runtime_ms;
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace ximod
