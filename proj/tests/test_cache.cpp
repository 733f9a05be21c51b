#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "ximod/cache.hpp"
#include "ximod/errors.hpp"

using namespace ximod;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ximod_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

template <class Real>
void require_equal(const MomentTable<Real>& a, const MomentTable<Real>& b) {
  CHECK(a.tau == b.tau);
  CHECK(a.j_max == b.j_max);
  CHECK(a.tol_used == b.tol_used);
  REQUIRE(a.S.size() == b.S.size());
  for (const auto& [j, e] : a.S) {
    CHECK(e.value == b.S.at(j).value);
    CHECK(e.err == b.S.at(j).err);
    CHECK(a.A.at(j).value == b.A.at(j).value);
    CHECK(a.A.at(j).err == b.A.at(j).err);
  }
  const auto& x = a.one_dim;
  const auto& y = b.one_dim;
  CHECK(x.Jplus.value == y.Jplus.value);
  CHECK(x.JminusLog.value == y.JminusLog.value);
  CHECK(x.I1.value == y.I1.value);
  CHECK(x.I2.value == y.I2.value);
  CHECK(x.I3.value == y.I3.value);
  CHECK(x.I3.err == y.I3.err);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cache") {
  TEST_CASE("hex round trip") {
    for (double x : {0.1, -1e-300, 3.0e200, 0.0}) CHECK(from_hex<double>(to_hex(x)) == x);
    const Float128 q = Float128(1) / 3;
    CHECK(from_hex<Float128>(to_hex(q)) == q);
  }

  TEST_CASE("store then load is bit-exact") {
    const fs::path dir = fresh_dir("roundtrip");
    const MomentTable<double> t = build_moment_table<double>(0.3, 4, 1e-10);
    CHECK(cache_load<double>(0.3, 1e-10, 4, dir.string()).status == CacheStatus::Missing);
    cache_store(t, dir.string());
    const CacheLookup<double> hit = cache_load<double>(0.3, 1e-10, 4, dir.string());
    REQUIRE(hit.status == CacheStatus::Hit);
    REQUIRE(hit.table);
    require_equal(t, *hit.table);
    CHECK(cache_load<double>(0.3, 1e-10, 6, dir.string()).status == CacheStatus::Missing);
    fs::remove_all(dir);
  }

  TEST_CASE("extended tables round trip too") {
    const fs::path dir = fresh_dir("ext");
    const MomentTable<Float128> t = build_moment_table<Float128>(Float128(0.2), 0, Float128(1e-12));
    cache_store(t, dir.string());
    const CacheLookup<Float128> hit = cache_load<Float128>(Float128(0.2), Float128(1e-12), 0, dir.string());
    REQUIRE(hit.table);
    require_equal(t, *hit.table);
    fs::remove_all(dir);
  }

  TEST_CASE("stale format version is rejected") {
    const MomentTable<double> t = build_moment_table<double>(0.3, 0, 1e-8);
    const std::string old = table_to_cache_json(t, kCacheFormatVersion + 1);
    const CacheLookup<double> r = table_from_cache_json<double>(old, 0.3, 1e-8, 0);
    CHECK(r.status == CacheStatus::VersionMismatch);
    CHECK_FALSE(r.table);
    CHECK(r.message.find("version") != std::string::npos);
  }

  TEST_CASE("corrupt and mismatched documents are rejected") {
    const MomentTable<double> t = build_moment_table<double>(0.3, 0, 1e-8);
    std::string doc = table_to_cache_json(t);
    nlohmann::json j = nlohmann::json::parse(doc);
    j["S"][0][1] = to_hex(1.5);
    CHECK(table_from_cache_json<double>(j.dump(), 0.3, 1e-8, 0).status == CacheStatus::Corrupt);
    CHECK(table_from_cache_json<double>("{not json", 0.3, 1e-8, 0).status == CacheStatus::Corrupt);
    CHECK(table_from_cache_json<double>(doc, 0.4, 1e-8, 0).status == CacheStatus::KeyMismatch);
    CHECK(table_from_cache_json<double>(doc, 0.3, 1e-8, 0).status == CacheStatus::Hit);
  }

  TEST_CASE("corrupt file on disk reads as a miss with a message") {
    const fs::path dir = fresh_dir("corrupt");
    const MomentTable<double> t = build_moment_table<double>(0.3, 0, 1e-8);
    cache_store(t, dir.string());
    const fs::path file = dir / cache_filename<double>(0.3, 1e-8, 0);
    std::string text = slurp(file);
    text[text.size() / 2] ^= 1;
    std::ofstream(file) << text;
    const CacheLookup<double> r = cache_load<double>(0.3, 1e-8, 0, dir.string());
    CHECK_FALSE(r.table);
    CHECK(r.status == CacheStatus::Corrupt);
    CHECK_FALSE(r.message.empty());
    fs::remove_all(dir);
  }

  TEST_CASE("readers never observe a partial file") {
    const fs::path dir = fresh_dir("concurrent");
    const MomentTable<double> t = build_moment_table<double>(0.3, 8, 1e-10);
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
      while (!done) {
        const CacheLookup<double> r = cache_load<double>(0.3, 1e-10, 8, dir.string());
        if (r.status != CacheStatus::Hit && r.status != CacheStatus::Missing) ++bad;
      }
    });
    for (int i = 0; i < 50; ++i) cache_store(t, dir.string());
    done = true;
    reader.join();
    CHECK(bad == 0);
    fs::remove_all(dir);
  }

  TEST_CASE("unwritable directory raises a cache error") {
    const MomentTable<double> t = build_moment_table<double>(0.3, 0, 1e-8);
    CHECK_THROWS_AS(cache_store(t, "/proc/ximod-not-writable"), CacheError);
  }
}
