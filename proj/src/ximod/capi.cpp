#include "ximod/ximod.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <variant>

#include "json.hpp"

#include "ximod/cache.hpp"
#include "ximod/coeffs.hpp"
#include "ximod/errors.hpp"
#include "ximod/moments.hpp"
#include "ximod/polyalg.hpp"
#include "ximod/scan.hpp"
#include "ximod/theta.hpp"
#include "ximod/verify.hpp"
#include "ximod/xi.hpp"

using namespace ximod;
using nlohmann::ordered_json;

struct ximod_context {
  double tol{1e-10};
  int digits{14};
  int threads{0};
  std::string cache_dir;
  bool extended{false};
  bool record_timing{true};
};

struct ximod_table {
  std::variant<MomentTable<double>, MomentTable<Float128>> t;
};

struct ximod_poly {
  std::variant<EvenPolynomial<double>, EvenPolynomial<Float128>> f;
};

namespace {

thread_local std::string g_last_error;

class ArgumentError : public Error {
 public:
  using Error::Error;
};

template <class F>
ximod_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return XIMOD_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return XIMOD_E_ARGUMENT;
  } catch (const DomainError& e) {
    g_last_error = e.what();
    return XIMOD_E_DOMAIN;
  } catch (const PrecisionError& e) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " (best estimate %.17g, achievable error %.3g)", e.best_estimate(),
                  e.achieved_err());
    g_last_error = std::string(e.what()) + buf;
    return XIMOD_E_PRECISION;
  } catch (const CapacityError& e) {
    g_last_error = e.what();
    return XIMOD_E_CAPACITY;
  } catch (const CacheError& e) {
    g_last_error = e.what();
    return XIMOD_E_CACHE;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("invalid JSON argument: ") + e.what();
    return XIMOD_E_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return XIMOD_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown internal error";
    return XIMOD_E_INTERNAL;
  }
}

template <class T>
void need(T* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Real>
ximod_estimate est(const Estimate<Real>& e) {
  return {to_double(e.value), to_double(e.err)};
}

template <class Real>
ordered_json est_json(const Estimate<Real>& e) {
  return ordered_json::array({to_double(e.value), to_double(e.err)});
}

template <class Real>
MomentTable<Real> table_for(const ximod_context& ctx, Real tau, int j_max, bool use_cache) {
  const Real tol = Real(ctx.tol);
  if (use_cache && !ctx.cache_dir.empty()) {
    CacheLookup<Real> hit = cache_load(tau, tol, j_max, ctx.cache_dir);
    if (hit.table) return *hit.table;
  }
  MomentTable<Real> t = build_moment_table(tau, j_max, tol);
  if (use_cache && !ctx.cache_dir.empty()) cache_store(t, ctx.cache_dir);
  return t;
}

}  // namespace

extern "C" {

const char* ximod_version(void) { return "1.0.0"; }

const char* ximod_last_error(void) { return g_last_error.c_str(); }

void ximod_string_free(char* s) { std::free(s); }

ximod_status ximod_context_new(ximod_context** out) {
  return guard([&] {
    need(out, "out");
    *out = new ximod_context();
  });
}

void ximod_context_free(ximod_context* ctx) { delete ctx; }

ximod_status ximod_context_set_tol(ximod_context* ctx, double tol) {
  return guard([&] {
    need(ctx, "ctx");
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    ctx->tol = tol;
  });
}

ximod_status ximod_context_set_digits(ximod_context* ctx, int digits) {
  return guard([&] {
    need(ctx, "ctx");
    if (digits < 1) throw DomainError("digits must be >= 1");
    ctx->digits = digits;
  });
}

ximod_status ximod_context_set_threads(ximod_context* ctx, int threads) {
  return guard([&] {
    need(ctx, "ctx");
    if (threads < 0) throw DomainError("threads must be >= 0");
    ctx->threads = threads;
  });
}

ximod_status ximod_context_set_cache_dir(ximod_context* ctx, const char* dir) {
  return guard([&] {
    need(ctx, "ctx");
    ctx->cache_dir = dir ? dir : "";
  });
}

ximod_status ximod_context_set_extended(ximod_context* ctx, int on) {
  return guard([&] {
    need(ctx, "ctx");
    ctx->extended = on != 0;
  });
}

ximod_status ximod_context_set_record_timing(ximod_context* ctx, int on) {
  return guard([&] {
    need(ctx, "ctx");
    ctx->record_timing = on != 0;
  });
}

ximod_status ximod_psi(const ximod_context* ctx, double y, ximod_estimate* out, int* terms) {
  return guard([&] {
    need(ctx, "ctx");
    need(out, "out");
    int n = 0;
    if (ctx->extended) {
      const ThetaPoint<Float128> p = psi<Float128>(Float128(y), {Float128(ctx->tol)});
      *out = {to_double(p.value), to_double(p.err)};
      n = p.terms;
    } else {
      const ThetaPoint<double> p = psi<double>(y, {ctx->tol});
      *out = {p.value, p.err};
      n = p.terms;
    }
    if (terms) *terms = n;
  });
}

ximod_status ximod_psi_tail_bound(double y, int n, double* out) {
  return guard([&] {
    need(out, "out");
    *out = psi_tail_bound<double>(y, n);
  });
}

ximod_status ximod_xi(const ximod_context* ctx, double re, double im, double* out_re, double* out_im,
                      double* err) {
  return guard([&] {
    need(ctx, "ctx");
    need(out_re, "out_re");
    need(out_im, "out_im");
    if (ctx->extended) {
      const XiValue<Float128> v =
          xi_direct<Float128>({Float128(re), Float128(im)}, Float128(ctx->tol));
      *out_re = to_double(v.value.re);
      *out_im = to_double(v.value.im);
      if (err) *err = to_double(v.err);
    } else {
      const XiValue<double> v = xi_direct<double>({re, im}, ctx->tol);
      *out_re = v.value.re;
      *out_im = v.value.im;
      if (err) *err = v.err;
    }
  });
}

ximod_status ximod_F_direct(const ximod_context* ctx, double tau, double t, ximod_estimate* out) {
  return guard([&] {
    need(ctx, "ctx");
    need(out, "out");
    if (ctx->extended) {
      *out = est(F_direct<Float128>(Float128(tau), Float128(t), Float128(ctx->tol)));
    } else {
      *out = est(F_direct<double>(tau, t, ctx->tol));
    }
  });
}

ximod_status ximod_table_build(const ximod_context* ctx, double tau, int j_max, int use_cache,
                               ximod_table** out) {
  return guard([&] {
    need(ctx, "ctx");
    need(out, "out");
    auto* h = new ximod_table();
    try {
      if (ctx->extended) {
        h->t = table_for<Float128>(*ctx, Float128(tau), j_max, use_cache != 0);
      } else {
        h->t = table_for<double>(*ctx, tau, j_max, use_cache != 0);
      }
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

void ximod_table_free(ximod_table* table) { delete table; }

ximod_status ximod_table_S(const ximod_table* table, int j, ximod_estimate* out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    std::visit([&](const auto& t) { *out = est(t.s(j)); }, table->t);
  });
}

ximod_status ximod_table_A(const ximod_table* table, int j, ximod_estimate* out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    std::visit([&](const auto& t) { *out = est(t.a(j)); }, table->t);
  });
}

ximod_status ximod_table_one_dim(const ximod_table* table, ximod_estimate out[5]) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    std::visit(
        [&](const auto& t) {
          out[0] = est(t.one_dim.Jplus);
          out[1] = est(t.one_dim.JminusLog);
          out[2] = est(t.one_dim.I1);
          out[3] = est(t.one_dim.I2);
          out[4] = est(t.one_dim.I3);
        },
        table->t);
  });
}

ximod_status ximod_table_json(const ximod_table* table, char** out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    std::visit(
        [&](const auto& t) {
          ordered_json j;
          j["tau"] = to_double(t.tau);
          j["tol"] = to_double(t.tol_used);
          j["j_max"] = t.j_max;
          ordered_json s = ordered_json::array();
          for (const auto& [k, e] : t.S) s.push_back({k, to_double(e.value), to_double(e.err)});
          ordered_json a = ordered_json::array();
          for (const auto& [k, e] : t.A) a.push_back({k, to_double(e.value), to_double(e.err)});
          j["S"] = s;
          j["A"] = a;
          j["Jplus"] = est_json(t.one_dim.Jplus);
          j["JminusLog"] = est_json(t.one_dim.JminusLog);
          j["I1"] = est_json(t.one_dim.I1);
          j["I2"] = est_json(t.one_dim.I2);
          j["I3"] = est_json(t.one_dim.I3);
          *out = dup_string(j.dump(1));
        },
        table->t);
  });
}

ximod_status ximod_F_rhs(const ximod_context* ctx, const ximod_table* table, double t,
                         ximod_estimate* out) {
  return guard([&] {
    need(ctx, "ctx");
    need(table, "table");
    need(out, "out");
    std::visit(
        [&](const auto& tb) {
          using Real = std::decay_t<decltype(tb.tau)>;
          *out = est(F_rhs<Real>(tb.tau, Real(t), tb, Real(ctx->tol)));
        },
        table->t);
  });
}

ximod_status ximod_dF_dtau(const ximod_context* ctx, const ximod_table* table, double t,
                           ximod_estimate* out) {
  return guard([&] {
    need(ctx, "ctx");
    need(table, "table");
    need(out, "out");
    std::visit(
        [&](const auto& tb) {
          using Real = std::decay_t<decltype(tb.tau)>;
          *out = est(dF_dtau<Real>(tb.tau, Real(t), tb, coeff_a0(tb), Real(ctx->tol)));
        },
        table->t);
  });
}

ximod_status ximod_poly_build(const ximod_table* table, int n, ximod_poly** out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    auto* p = new ximod_poly();
    try {
      std::visit([&](const auto& tb) { p->f = build_f(tb, n); }, table->t);
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

void ximod_poly_free(ximod_poly* poly) { delete poly; }

ximod_status ximod_poly_coeffs(const ximod_poly* poly, ximod_estimate* out, int capacity,
                               int* count) {
  return guard([&] {
    need(poly, "poly");
    need(count, "count");
    std::visit(
        [&](const auto& f) {
          *count = static_cast<int>(f.c.size());
          if (out == nullptr) return;
          if (capacity < *count) throw ArgumentError("coefficient buffer too small");
          for (std::size_t i = 0; i < f.c.size(); ++i) out[i] = est(f.c[i]);
        },
        poly->f);
  });
}

ximod_status ximod_poly_coeffs_json(const ximod_poly* poly, char** out) {
  return guard([&] {
    need(poly, "poly");
    need(out, "out");
    std::visit(
        [&](const auto& f) {
          const int n = f.n;
          ordered_json j;
          j["tau"] = to_double(f.tau);
          j["n"] = n;
          ordered_json a = ordered_json::array();
          ordered_json a_err = ordered_json::array();
          for (int k = 0; k <= 2 * n - 2; ++k) {
            a.push_back(to_double(f.c[static_cast<std::size_t>(k)].value));
            a_err.push_back(to_double(f.c[static_cast<std::size_t>(k)].err));
          }
          j["a"] = a;
          j["trail_odd"] = to_double(f.c[static_cast<std::size_t>(2 * n - 1)].value);
          j["trail_even"] = to_double(f.c[static_cast<std::size_t>(2 * n)].value);
          j["errs"] = {{"a", a_err},
                       {"trail_odd", to_double(f.c[static_cast<std::size_t>(2 * n - 1)].err)},
                       {"trail_even", to_double(f.c[static_cast<std::size_t>(2 * n)].err)}};
          *out = dup_string(j.dump(1));
        },
        poly->f);
  });
}

ximod_status ximod_poly_eval(const ximod_poly* poly, double t, ximod_estimate* out) {
  return guard([&] {
    need(poly, "poly");
    need(out, "out");
    std::visit(
        [&](const auto& f) {
          using Real = std::decay_t<decltype(f.tau)>;
          const Real s = Real(t) * Real(t);
          *out = {to_double(f.eval_s(s)), to_double(f.err_at_s(s))};
        },
        poly->f);
  });
}

ximod_status ximod_poly_count(const ximod_context* ctx, const ximod_poly* poly,
                              ximod_count_method method, int* n_real, int* n_distinct, int* stable) {
  return guard([&] {
    need(ctx, "ctx");
    need(poly, "poly");
    need(n_real, "n_real");
    const CountMethod m = method == XIMOD_COUNT_HERMITE ? CountMethod::Hermite : CountMethod::Sturm;
    std::visit(
        [&](const auto& f) {
          const RootCountReport r = count_with_stability(f, ctx->digits, m);
          *n_real = r.n_real;
          if (n_distinct) *n_distinct = r.n_distinct_complex;
          if (stable) *stable = r.stable ? 1 : 0;
        },
        poly->f);
  });
}

ximod_status ximod_poly_discriminant(const ximod_context* ctx, const ximod_poly* poly, double* value,
                                     char** exact) {
  return guard([&] {
    need(ctx, "ctx");
    need(poly, "poly");
    need(value, "value");
    std::visit(
        [&](const auto& f) {
          const mpq_class d = discriminant(quantize(f, ctx->digits));
          *value = d.get_d();
          if (exact) *exact = dup_string(d.get_str());
        },
        poly->f);
  });
}

ximod_status ximod_poly_min(const ximod_poly* poly, double* s_min, double* value, double* err,
                            int* flagged) {
  return guard([&] {
    need(poly, "poly");
    std::visit(
        [&](const auto& f) {
          const auto m = min_nonneg_s(f);
          if (s_min) *s_min = to_double(m.s_min);
          if (value) *value = to_double(m.value);
          if (err) *err = to_double(f.err_at_s(m.s_min));
          if (flagged) *flagged = m.flagged ? 1 : 0;
        },
        poly->f);
  });
}

ximod_status ximod_discriminant_biquadratic(double a0, double a1, double a2, double* out) {
  return guard([&] {
    need(out, "out");
    *out = discriminant_biquadratic<double>(a0, a1, a2);
  });
}

ximod_status ximod_poly_selftest(int trials, unsigned long long seed, int* agreements,
                                 char** report_json) {
  return guard([&] {
    if (trials < 1) throw DomainError("selftest needs at least one trial");
    const SelftestReport r = poly_selftest(trials, seed);
    if (agreements) *agreements = r.agreements;
    if (report_json) {
      ordered_json j;
      j["trials"] = r.trials;
      j["agreements"] = r.agreements;
      j["pass"] = r.pass();
      j["disagreements"] = r.disagreements;
      *report_json = dup_string(j.dump(1));
    }
  });
}

ximod_status ximod_scan(const ximod_context* ctx, const char* config_json, char** output,
                        char** summary_json) {
  return guard([&] {
    need(ctx, "ctx");
    need(output, "output");
    ScanConfig cfg;
    cfg.tol = ctx->tol;
    cfg.digits = ctx->digits;
    cfg.threads = ctx->threads;
    cfg.cache_dir = ctx->cache_dir;
    cfg.precision = ctx->extended ? Precision::Extended : Precision::Double;
    cfg.record_timing = ctx->record_timing;
    if (config_json != nullptr && *config_json != '\0') {
      const nlohmann::json j = nlohmann::json::parse(config_json);
      if (!j.is_object()) throw ArgumentError("scan configuration must be a JSON object");
      cfg.tau_min = j.value("tau_min", cfg.tau_min);
      cfg.tau_max = j.value("tau_max", cfg.tau_max);
      cfg.steps = j.value("steps", cfg.steps);
      if (j.contains("tau_list")) cfg.tau_list = j["tau_list"].get<std::vector<double>>();
      if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<int>>();
      const std::string fmt = j.value("format", std::string("csv"));
      if (fmt == "csv") cfg.format = OutFormat::Csv;
      else if (fmt == "jsonl") cfg.format = OutFormat::Jsonl;
      else throw ArgumentError("format must be csv or jsonl");
    }
    const ScanResult r = run_scan(cfg);
    const std::string text = cfg.format == OutFormat::Csv ? to_csv(r) : to_jsonl(r);
    if (summary_json) {
      int pos = 0, inc = 0, vio = 0, errors = 0, count_mismatch = 0, unstable = 0;
      for (const auto& rec : r.records) {
        if (rec.positivity == Positivity::Positive) ++pos;
        if (rec.positivity == Positivity::Inconclusive) ++inc;
        if (rec.positivity == Positivity::Violated) ++vio;
        if (!rec.error.empty()) ++errors;
        if (rec.n_real != rec.n_real_hermite || rec.n_distinct != rec.n_distinct_hermite) ++count_mismatch;
        if (!rec.stable) ++unstable;
      }
      ordered_json s;
      s["rows"] = r.records.size();
      s["positive"] = pos;
      s["inconclusive"] = inc;
      s["violated"] = vio;
      s["errors"] = errors;
      s["sturm_hermite_mismatches"] = count_mismatch;
      s["unstable_counts"] = unstable;
      s["warnings"] = r.warnings;
      s["reproducers"] = r.reproducers;
      *summary_json = dup_string(s.dump(1));
    }
    *output = dup_string(text);
  });
}

ximod_status ximod_verify(const ximod_context* ctx, const char* suite, const char* options_json,
                          char** report_json, int* pass) {
  return guard([&] {
    need(ctx, "ctx");
    need(suite, "suite");
    VerifyOptions o;
    o.tol = ctx->tol;
    o.precision = ctx->extended ? Precision::Extended : Precision::Double;
    if (options_json != nullptr && *options_json != '\0') {
      const nlohmann::json j = nlohmann::json::parse(options_json);
      o.s0_scale = j.value("s0_scale", 1.0);
      o.rel_tol = j.value("rel_tol", 0.0);
      if (j.contains("tau_list")) o.tau_list = j["tau_list"].get<std::vector<double>>();
      if (j.contains("t_list")) o.t_list = j["t_list"].get<std::vector<double>>();
    }
    VerifyReport r;
    if (std::string(suite) == "all") {
      r = verify_all(o);
    } else {
      r.suites.push_back(verify_suite(suite, o));
    }
    if (pass) *pass = r.pass() ? 1 : 0;
    if (report_json) *report_json = dup_string(to_json(r));
  });
}

}  // extern "C"
