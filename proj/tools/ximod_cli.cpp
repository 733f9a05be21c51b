// Command-line front end. Links only the C interface of libximod.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ximod/ximod.h"

namespace {

using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kVerifyFailed = 2, kPrecision = 3, kRuntime = 4 };

struct Failure {
  ximod_status status;
  std::string message;
};

void check(ximod_status st) {
  if (st != XIMOD_OK) throw Failure{st, ximod_last_error()};
}

int exit_code(ximod_status st) {
  switch (st) {
    case XIMOD_E_ARGUMENT:
    case XIMOD_E_DOMAIN:
    case XIMOD_E_CAPACITY: return kUsage;
    case XIMOD_E_PRECISION: return kPrecision;
    default: return kRuntime;
  }
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  ximod_string_free(s);
  return out;
}

struct Globals {
  double tol{1e-10};
  int digits{14};
  int threads{0};
  std::string cache_dir;
  std::string format{"csv"};
  std::string out;
  bool extended{false};
  bool no_timing{false};
};

class Context {
 public:
  explicit Context(const Globals& g) {
    check(ximod_context_new(&ctx_));
    check(ximod_context_set_tol(ctx_, g.tol));
    check(ximod_context_set_digits(ctx_, g.digits));
    check(ximod_context_set_threads(ctx_, g.threads));
    check(ximod_context_set_cache_dir(ctx_, g.cache_dir.c_str()));
    check(ximod_context_set_extended(ctx_, g.extended ? 1 : 0));
    check(ximod_context_set_record_timing(ctx_, g.no_timing ? 0 : 1));
  }
  ~Context() { ximod_context_free(ctx_); }
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
  ximod_context* get() const { return ctx_; }

 private:
  ximod_context* ctx_{nullptr};
};

struct Table {
  ximod_table* h{nullptr};
  ~Table() { ximod_table_free(h); }
};

struct Poly {
  ximod_poly* h{nullptr};
  ~Poly() { ximod_poly_free(h); }
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw Failure{XIMOD_E_IO, "cannot open " + g.out};
  f << text;
  if (!text.empty() && text.back() != '\n') f << "\n";
}

// f_{tau,n} needs moments through order 4n-2.
void build_poly(const Context& ctx, double tau, int n, Table& table, Poly& poly) {
  check(ximod_table_build(ctx.get(), tau, 4 * n - 2, 1, &table.h));
  check(ximod_poly_build(table.h, n, &poly.h));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ximod: theta-kernel moments, f_{tau,n} polynomials and their checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--digits", g.digits, "significant digits kept when quantizing coefficients")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "moment table cache directory");
  app.add_option("--format", g.format, "scan output format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "write output to this file instead of stdout");
  app.add_flag("--extended", g.extended, "compute in 113-bit floating point");
  app.add_flag("--no-timing", g.no_timing, "write runtime_ms = 0 so scans are byte-reproducible");

  double y = 0;
  auto* psi = app.add_subcommand("psi", "theta tail psi(y) = sum_{n>=1} exp(-pi n^2 y)");
  psi->add_option("--y", y)->required();

  double sigma = 0.5, t_xi = 0;
  auto* xi = app.add_subcommand("xi", "xi(sigma + i t)");
  xi->add_option("--sigma", sigma)->required();
  xi->add_option("--t", t_xi)->required();

  double tau = 0;
  int jmax = 2, n = 1;
  bool no_cache = false;
  auto* moments = app.add_subcommand("moments", "moment table S_j, A_j and the one-dimensional integrals");
  moments->add_option("--tau", tau)->required();
  moments->add_option("--jmax", jmax)->capture_default_str();
  moments->add_flag("--no-cache", no_cache);

  auto* coeffs = app.add_subcommand("coeffs", "coefficients of f_{tau,n}");
  coeffs->add_option("--tau", tau)->required();
  coeffs->add_option("--n", n)->capture_default_str();

  auto* poly = app.add_subcommand("poly", "root counts, discriminant and minimum of f_{tau,n}");
  poly->require_subcommand(1);
  std::string method = "both";
  auto* p_count = poly->add_subcommand("count", "distinct real and complex roots");
  p_count->add_option("--method", method)->check(CLI::IsMember({"sturm", "hermite", "both"}));
  auto* p_disc = poly->add_subcommand("disc", "discriminant of the quantized polynomial");
  auto* p_min = poly->add_subcommand("min", "minimum over real t");
  for (auto* sc : {p_count, p_disc, p_min}) {
    sc->add_option("--tau", tau)->required();
    sc->add_option("--n", n)->capture_default_str();
  }
  int trials = 200;
  unsigned long long seed = 20240501ULL;
  auto* p_self = poly->add_subcommand("selftest", "Sturm vs Hermite on random even polynomials");
  p_self->add_option("--trials", trials)->capture_default_str();
  p_self->add_option("--seed", seed)->capture_default_str();

  double tau_min = 1.0 / 128, tau_max = 63.0 / 128;
  int steps = 63;
  std::vector<double> tau_list, t_list;
  std::vector<int> n_list{1, 2};
  auto* scan = app.add_subcommand("scan", "tau sweep of f_{tau,n}");
  scan->add_option("--tau-min", tau_min)->capture_default_str();
  scan->add_option("--tau-max", tau_max)->capture_default_str();
  scan->add_option("--steps", steps)->capture_default_str();
  scan->add_option("--tau-list", tau_list, "explicit taus (overrides the grid)")->delimiter(',');
  scan->add_option("--n-list", n_list)->delimiter(',');

  std::string suite = "all";
  double rel_tol = 0, inject_s0 = 1;
  bool with_rows = false;
  auto* verify = app.add_subcommand("verify", "self-verification suites");
  verify->add_option("suite", suite, "all or a suite name")->capture_default_str();
  verify->add_option("--tau-list", tau_list)->delimiter(',');
  verify->add_option("--t-list", t_list)->delimiter(',');
  verify->add_option("--rel-tol", rel_tol, "pass threshold for identity (thm1) and grad");
  verify->add_option("--inject-s0", inject_s0, "scale S_0 in the identity-suite tables (fault injection)");
  verify->add_flag("--rows", with_rows, "include per-point checks for 'all' (single suites always do)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Context ctx(g);
    if (*psi) {
      ximod_estimate e{};
      int terms = 0;
      check(ximod_psi(ctx.get(), y, &e, &terms));
      ordered_json j{{"y", y}, {"value", e.value}, {"err", e.err}, {"terms", terms}};
      emit(g, j.dump(1));
    } else if (*xi) {
      double re = 0, im = 0, err = 0;
      check(ximod_xi(ctx.get(), sigma, t_xi, &re, &im, &err));
      ordered_json j{{"sigma", sigma}, {"t", t_xi}, {"re", re}, {"im", im}, {"err", err}};
      emit(g, j.dump(1));
    } else if (*moments) {
      Table table;
      check(ximod_table_build(ctx.get(), tau, jmax, no_cache ? 0 : 1, &table.h));
      char* s = nullptr;
      check(ximod_table_json(table.h, &s));
      emit(g, take(s));
    } else if (*coeffs) {
      Table table;
      Poly p;
      build_poly(ctx, tau, n, table, p);
      char* s = nullptr;
      check(ximod_poly_coeffs_json(p.h, &s));
      emit(g, take(s));
    } else if (*p_count) {
      Table table;
      Poly p;
      build_poly(ctx, tau, n, table, p);
      ordered_json j{{"tau", tau}, {"n", n}, {"digits", g.digits}};
      bool agree = true;
      std::optional<int> first_real;
      for (auto [name, m] : {std::pair{"sturm", XIMOD_COUNT_STURM}, std::pair{"hermite", XIMOD_COUNT_HERMITE}}) {
        if (method != "both" && method != name) continue;
        int n_real = 0, n_distinct = 0, stable = 0;
        check(ximod_poly_count(ctx.get(), p.h, m, &n_real, &n_distinct, &stable));
        j[name] = {{"n_real", n_real}, {"n_distinct_complex", n_distinct}, {"stable", stable != 0}};
        if (first_real && *first_real != n_real) agree = false;
        first_real = n_real;
      }
      if (method == "both") j["agree"] = agree;
      emit(g, j.dump(1));
      if (!agree) return kVerifyFailed;
    } else if (*p_disc) {
      Table table;
      Poly p;
      build_poly(ctx, tau, n, table, p);
      double d = 0;
      char* exact = nullptr;
      check(ximod_poly_discriminant(ctx.get(), p.h, &d, &exact));
      ordered_json j{{"tau", tau}, {"n", n}, {"digits", g.digits}, {"discr", d}, {"exact", take(exact)}};
      if (n == 1) {
        ximod_estimate c[3];
        int count = 0;
        check(ximod_poly_coeffs(p.h, c, 3, &count));
        double closed = 0;
        check(ximod_discriminant_biquadratic(c[0].value, c[1].value, c[2].value, &closed));
        j["discr_closed"] = closed;
      }
      emit(g, j.dump(1));
    } else if (*p_min) {
      Table table;
      Poly p;
      build_poly(ctx, tau, n, table, p);
      double s_min = 0, value = 0, err = 0;
      int flagged = 0;
      check(ximod_poly_min(p.h, &s_min, &value, &err, &flagged));
      ordered_json j{{"tau", tau},          {"n", n},        {"t_min", std::sqrt(s_min)},
                     {"value", value},      {"err", err},    {"positive", value - 10 * err > 0},
                     {"flagged", flagged != 0}};
      emit(g, j.dump(1));
    } else if (*p_self) {
      int agreements = 0;
      char* report = nullptr;
      check(ximod_poly_selftest(trials, seed, &agreements, &report));
      emit(g, take(report));
      if (agreements != trials) return kVerifyFailed;
    } else if (*scan) {
      ordered_json cfg{{"tau_min", tau_min}, {"tau_max", tau_max}, {"steps", steps},
                       {"n_list", n_list},   {"format", g.format}};
      if (!tau_list.empty()) cfg["tau_list"] = tau_list;
      char* out = nullptr;
      char* summary = nullptr;
      check(ximod_scan(ctx.get(), cfg.dump().c_str(), &out, &summary));
      emit(g, take(out));
      const ordered_json s = ordered_json::parse(take(summary));
      std::cerr << s.dump(1) << "\n";
      if (s["violated"].get<int>() > 0 || s["sturm_hermite_mismatches"].get<int>() > 0) {
        return kVerifyFailed;
      }
    } else if (*verify) {
      ordered_json opts{{"s0_scale", inject_s0}, {"rel_tol", rel_tol}};
      if (!tau_list.empty()) opts["tau_list"] = tau_list;
      if (!t_list.empty()) opts["t_list"] = t_list;
      char* report = nullptr;
      int pass = 0;
      check(ximod_verify(ctx.get(), suite.c_str(), opts.dump().c_str(), &report, &pass));
      nlohmann::ordered_json r = nlohmann::ordered_json::parse(take(report));
      if (!with_rows && suite == "all") {
        for (auto& su : r["suites"]) su.erase("checks");
      }
      emit(g, r.dump(1));
      if (!pass) return kVerifyFailed;
    }
  } catch (const Failure& f) {
    std::cerr << "ximod: " << f.message << "\n";
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "ximod: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
