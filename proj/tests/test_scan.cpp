#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "ximod/errors.hpp"
#include "ximod/scan.hpp"

using namespace ximod;
namespace fs = std::filesystem;

TEST_SUITE("scan") {
  TEST_CASE("grid and validation") {
    ScanConfig cfg;
    const std::vector<double> taus = scan_taus(cfg);
    REQUIRE(taus.size() == 63);
    CHECK(taus.front() == 1.0 / 128);
    CHECK(taus.back() == 63.0 / 128);
    CHECK(taus[1] == doctest::Approx(2.0 / 128).epsilon(1e-15));
    cfg.tau_list = {0.1, 0.2};
    CHECK(scan_taus(cfg) == std::vector<double>{0.1, 0.2});

    ScanConfig bad;
    bad.n_list = {};
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = ScanConfig{};
    bad.tau_min = 0.4;
    bad.tau_max = 0.2;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = ScanConfig{};
    bad.tol = 0;
    CHECK_THROWS_AS(run_scan(bad), DomainError);
  }

  TEST_CASE("n = 1 rows are positive without real roots") {
    ScanConfig cfg;
    cfg.tau_list = {0.1, 0.2, 0.3, 0.4};
    cfg.n_list = {1};
    const ScanResult r = run_scan(cfg);
    REQUIRE(r.records.size() == 4);
    for (const ScanRecord& rec : r.records) {
      CHECK(rec.positivity == Positivity::Positive);
      CHECK(rec.n_real == 0);
      CHECK(rec.margin > 0);
      REQUIRE(rec.discr_closed);
      CHECK(std::abs(rec.discr - *rec.discr_closed) <= 1e-9 * std::max(std::abs(rec.discr), std::abs(*rec.discr_closed)));
      const oracle::GridMin g = oracle::dense_grid_min({rec.a[0], rec.trail_odd, rec.trail_even}, 50, 100000);
      CHECK(g.value > 0);
      CHECK(rec.min_value <= g.value * (1 + 1e-12));
    }
  }

  TEST_CASE("tau = 1/2 rows are positive") {
    ScanConfig cfg;
    cfg.tau_list = {0.5};
    const ScanResult r = run_scan(cfg);
    for (const ScanRecord& rec : r.records) CHECK(rec.positivity == Positivity::Positive);
  }

  TEST_CASE("tau = 0 is reported, never a violation") {
    ScanConfig cfg;
    cfg.tau_list = {0.0};
    cfg.n_list = {1};
    const ScanResult r = run_scan(cfg);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].positivity != Positivity::Violated);
    CHECK(r.records[0].retried);
  }

  TEST_CASE("row count, order and output formats") {
    ScanConfig cfg;
    cfg.tau_min = 0.1;
    cfg.tau_max = 0.4;
    cfg.steps = 4;
    cfg.threads = 3;
    cfg.record_timing = false;
    const ScanResult r = run_scan(cfg);
    REQUIRE(r.records.size() == 8);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      CHECK(r.records[i].n == (i % 2 == 0 ? 1 : 2));
      if (i >= 2) CHECK(r.records[i].tau > r.records[i - 2].tau);
    }
    const std::string csv = to_csv(r);
    CHECK(csv.rfind(
              "tau,n,a0,a1,a2,trail_odd,trail_even,positivity,margin,n_real,discr,discr_closed,corollary_gap,runtime_ms\n",
              0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    const std::string jl = to_jsonl(r);
    std::istringstream in(jl);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::ordered_json::parse(line);
      std::vector<std::string> keys;
      for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
      CHECK(keys.front() == "tau");
      CHECK(keys.back() == "runtime_ms");
      CHECK(keys.size() == 14);
      ++rows;
    }
    CHECK(rows == 8);
    CHECK(r.reproducers.empty());
  }

  TEST_CASE("warm-cache scans are byte-identical and thread count does not matter") {
    const fs::path dir = fs::temp_directory_path() / ("ximod_scan_cache_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    ScanConfig cfg;
    cfg.tau_min = 0.05;
    cfg.tau_max = 0.45;
    cfg.steps = 5;
    cfg.cache_dir = dir.string();
    cfg.record_timing = false;
    cfg.threads = 1;
    const std::string cold = to_csv(run_scan(cfg));
    const std::string warm = to_csv(run_scan(cfg));
    cfg.threads = 4;
    const std::string warm4 = to_csv(run_scan(cfg));
    CHECK(cold == warm);
    CHECK(warm == warm4);
    fs::remove_all(dir);
  }

  TEST_CASE("extended precision agrees with double") {
    ScanConfig cfg;
    cfg.tau_list = {0.25};
    cfg.n_list = {1};
    const ScanRecord d = run_scan(cfg).records.at(0);
    cfg.precision = Precision::Extended;
    const ScanRecord q = run_scan(cfg).records.at(0);
    CHECK(q.positivity == Positivity::Positive);
    CHECK(q.a[0] == doctest::Approx(d.a[0]).epsilon(1e-8));
    CHECK(q.trail_even == doctest::Approx(d.trail_even).epsilon(1e-8));
  }
}
