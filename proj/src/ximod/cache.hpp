#pragma once

// On-disk moment tables. One JSON document per (tau, tol, j_max, scalar);
// numbers are stored as hexadecimal floating literals so a load reproduces
// the stored table bit for bit. Writers go through a temporary file and an
// atomic rename, so readers never see a partial document.

#include <optional>
#include <string>

#include "ximod/moments.hpp"

namespace ximod {

inline constexpr int kCacheFormatVersion = 1;

enum class CacheStatus { Hit, Missing, VersionMismatch, Corrupt, KeyMismatch };

const char* cache_status_name(CacheStatus s);

template <class Real>
struct CacheLookup {
  std::optional<MomentTable<Real>> table;
  CacheStatus status{CacheStatus::Missing};
  std::string message;  // set for every status other than Hit and Missing
};

template <class Real>
std::string cache_filename(Real tau, Real tol, int j_max);

// Serialized document, including format_version and checksum.
template <class Real>
std::string table_to_cache_json(const MomentTable<Real>& table,
                                int format_version = kCacheFormatVersion);

template <class Real>
CacheLookup<Real> table_from_cache_json(const std::string& text, Real tau, Real tol, int j_max);

// Throws CacheError when the directory cannot be created or written.
template <class Real>
void cache_store(const MomentTable<Real>& table, const std::string& dir);

template <class Real>
CacheLookup<Real> cache_load(Real tau, Real tol, int j_max, const std::string& dir);

// Hexadecimal literal for x ("%a" style) and its exact inverse.
template <class Real>
std::string to_hex(const Real& x);

template <class Real>
Real from_hex(const std::string& s);

}  // namespace ximod
