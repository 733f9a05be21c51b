#include "ximod/cache.hpp"

#include <quadmath.h>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "json.hpp"

#include "ximod/errors.hpp"

namespace ximod {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <class Real>
const char* scalar_name();
template <>
const char* scalar_name<double>() { return "double"; }
template <>
const char* scalar_name<Float128>() { return "float128"; }

template <class Real>
json encode(const Estimate<Real>& e) {
  return json::array({to_hex(e.value), to_hex(e.err)});
}

template <class Real>
Estimate<Real> decode(const json& j) {
  return {from_hex<Real>(j.at(0).get<std::string>()), from_hex<Real>(j.at(1).get<std::string>())};
}

template <class Real>
json payload_of(const MomentTable<Real>& t) {
  json p;
  p["scalar"] = scalar_name<Real>();
  p["tau"] = to_hex(t.tau);
  p["tol"] = to_hex(t.tol_used);
  p["j_max"] = t.j_max;
  json s = json::array();
  for (const auto& [j, e] : t.S) s.push_back(json::array({j, to_hex(e.value), to_hex(e.err)}));
  json a = json::array();
  for (const auto& [j, e] : t.A) a.push_back(json::array({j, to_hex(e.value), to_hex(e.err)}));
  p["S"] = s;
  p["A"] = a;
  p["Jplus"] = encode(t.one_dim.Jplus);
  p["JminusLog"] = encode(t.one_dim.JminusLog);
  p["I1"] = encode(t.one_dim.I1);
  p["I2"] = encode(t.one_dim.I2);
  p["I3"] = encode(t.one_dim.I3);
  return p;
}

}  // namespace

const char* cache_status_name(CacheStatus s) {
  switch (s) {
    case CacheStatus::Hit: return "hit";
    case CacheStatus::Missing: return "missing";
    case CacheStatus::VersionMismatch: return "version_mismatch";
    case CacheStatus::Corrupt: return "corrupt";
    case CacheStatus::KeyMismatch: return "key_mismatch";
  }
  return "unknown";
}

template <>
std::string to_hex<double>(const double& x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

template <>
std::string to_hex<Float128>(const Float128& x) {
  char buf[96];
  quadmath_snprintf(buf, sizeof buf, "%Qa", x.backend().value());
  return buf;
}

template <>
double from_hex<double>(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw CacheError("malformed number '" + s + "'");
  return v;
}

template <>
Float128 from_hex<Float128>(const std::string& s) {
  char* end = nullptr;
  const __float128 v = strtoflt128(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw CacheError("malformed number '" + s + "'");
  return Float128(v);
}

template <class Real>
std::string cache_filename(Real tau, Real tol, int j_max) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "moments_tau%.12f_tol%.3e_j%d_%s.json", to_double(tau),
                to_double(tol), j_max, scalar_name<Real>());
  return buf;
}

template <class Real>
std::string table_to_cache_json(const MomentTable<Real>& table, int format_version) {
  const json payload = payload_of(table);
  json doc = payload;
  doc["format_version"] = format_version;
  doc["checksum"] = hex64(fnv1a64(payload.dump()));
  return doc.dump(1);
}

template <class Real>
CacheLookup<Real> table_from_cache_json(const std::string& text, Real tau, Real tol, int j_max) {
  CacheLookup<Real> out;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    out.status = CacheStatus::Corrupt;
    out.message = std::string("unparsable cache document: ") + e.what();
    return out;
  }
  if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    out.status = CacheStatus::Corrupt;
    out.message = "cache document has no format_version";
    return out;
  }
  const int version = doc["format_version"].get<int>();
  if (version != kCacheFormatVersion) {
    out.status = CacheStatus::VersionMismatch;
    out.message = "cache format_version " + std::to_string(version) + " does not match expected " +
                  std::to_string(kCacheFormatVersion) + "; table will be recomputed";
    return out;
  }
  try {
    const std::string checksum = doc.at("checksum").get<std::string>();
    json payload = doc;
    payload.erase("checksum");
    payload.erase("format_version");
    if (hex64(fnv1a64(payload.dump())) != checksum) {
      out.status = CacheStatus::Corrupt;
      out.message = "cache checksum mismatch; file ignored";
      return out;
    }
    MomentTable<Real> t;
    if (payload.at("scalar").get<std::string>() != scalar_name<Real>()) {
      out.status = CacheStatus::KeyMismatch;
      out.message = "cache file holds a table of a different scalar type";
      return out;
    }
    t.tau = from_hex<Real>(payload.at("tau").get<std::string>());
    t.tol_used = from_hex<Real>(payload.at("tol").get<std::string>());
    t.j_max = payload.at("j_max").get<int>();
    if (t.tau != tau || t.tol_used != tol || t.j_max != j_max) {
      out.status = CacheStatus::KeyMismatch;
      out.message = "cache file key does not match the request";
      return out;
    }
    for (const auto& row : payload.at("S")) {
      t.S[row.at(0).get<int>()] = {from_hex<Real>(row.at(1).get<std::string>()),
                                   from_hex<Real>(row.at(2).get<std::string>())};
    }
    for (const auto& row : payload.at("A")) {
      t.A[row.at(0).get<int>()] = {from_hex<Real>(row.at(1).get<std::string>()),
                                   from_hex<Real>(row.at(2).get<std::string>())};
    }
    t.one_dim.Jplus = decode<Real>(payload.at("Jplus"));
    t.one_dim.JminusLog = decode<Real>(payload.at("JminusLog"));
    t.one_dim.I1 = decode<Real>(payload.at("I1"));
    t.one_dim.I2 = decode<Real>(payload.at("I2"));
    t.one_dim.I3 = decode<Real>(payload.at("I3"));
    out.table = std::move(t);
    out.status = CacheStatus::Hit;
  } catch (const std::exception& e) {
    out.status = CacheStatus::Corrupt;
    out.message = std::string("malformed cache document: ") + e.what();
  }
  return out;
}

template <class Real>
void cache_store(const MomentTable<Real>& table, const std::string& dir) {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CacheError("cannot create cache directory '" + dir + "': " + ec.message());
  const fs::path target = fs::path(dir) / cache_filename(table.tau, table.tol_used, table.j_max);
  std::ostringstream tmpname;
  tmpname << target.filename().string() << ".tmp." << ::getpid() << "."
          << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
  const fs::path tmp = fs::path(dir) / tmpname.str();
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CacheError("cannot write cache file '" + tmp.string() + "'");
    os << table_to_cache_json(table);
    os.flush();
    if (!os) throw CacheError("cannot write cache file '" + tmp.string() + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CacheError("cannot move cache file into place: " + target.string());
  }
}

template <class Real>
CacheLookup<Real> cache_load(Real tau, Real tol, int j_max, const std::string& dir) {
  const fs::path file = fs::path(dir) / cache_filename(tau, tol, j_max);
  std::ifstream is(file, std::ios::binary);
  if (!is) return {};
  std::ostringstream ss;
  ss << is.rdbuf();
  CacheLookup<Real> r = table_from_cache_json(ss.str(), tau, tol, j_max);
  if (!r.message.empty()) r.message = file.string() + ": " + r.message;
  return r;
}

#define XIMOD_INSTANTIATE_CACHE(Real)                                                       \
  template std::string cache_filename<Real>(Real, Real, int);                              \
  template std::string table_to_cache_json<Real>(const MomentTable<Real>&, int);           \
  template CacheLookup<Real> table_from_cache_json<Real>(const std::string&, Real, Real, int); \
  template void cache_store<Real>(const MomentTable<Real>&, const std::string&);           \
  template CacheLookup<Real> cache_load<Real>(Real, Real, int, const std::string&);

XIMOD_INSTANTIATE_CACHE(double)
XIMOD_INSTANTIATE_CACHE(Float128)

}  // namespace ximod
