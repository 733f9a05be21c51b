#pragma once

// tau-grid sweeps over f_{tau,n}: coefficients, positivity margin, root
// counts, discriminants. Output rows are ordered by (tau, n) regardless of
// how many worker threads ran.

#include <optional>
#include <string>
#include <vector>

#include "ximod/real.hpp"

namespace ximod {

enum class Positivity { Positive, Inconclusive, Violated };
enum class OutFormat { Csv, Jsonl };

const char* positivity_name(Positivity p);

struct ScanConfig {
  double tau_min{1.0 / 128};
  double tau_max{63.0 / 128};
  int steps{63};
  std::vector<double> tau_list;  // overrides the uniform grid when non-empty
  std::vector<int> n_list{1, 2};
  double tol{1e-10};
  int digits{14};
  int threads{0};  // 0: hardware concurrency
  std::string cache_dir;
  OutFormat format{OutFormat::Csv};
  Precision precision{Precision::Double};
  bool record_timing{true};
};

struct ScanRecord {
  double tau{0};
  int n{1};
  std::vector<double> a;  // a_tau(k), k = 0..2n-2
  std::vector<double> a_err;
  double trail_odd{0};
  double trail_odd_err{0};
  double trail_even{0};
  double trail_even_err{0};
  Positivity positivity{Positivity::Inconclusive};
  double min_s{0};
  double min_value{0};
  double min_err{0};
  double margin{0};  // min_value - 10 min_err
  int n_real{0};     // Sturm count of the quantized polynomial
  int n_distinct{0};
  bool stable{true};
  int n_real_hermite{0};
  int n_distinct_hermite{0};
  double discr{0};
  std::optional<double> discr_closed;   // n = 1
  std::optional<double> corollary_gap;  // n = 1
  bool gap_degenerate{false};
  bool retried{false};
  long runtime_ms{0};
  std::string error;  // non-empty when the cell could not be evaluated
};

struct ScanResult {
  std::vector<ScanRecord> records;
  std::vector<std::string> warnings;
  std::vector<std::string> reproducers;  // one command line per violated row
  int max_n{1};
};

// Throws DomainError on an invalid configuration.
void validate(const ScanConfig& cfg);

// Inclusive uniform grid tau_min .. tau_max with `steps` points (or tau_list).
std::vector<double> scan_taus(const ScanConfig& cfg);

ScanResult run_scan(const ScanConfig& cfg);

std::string csv_header(int max_n);
std::string to_csv(const ScanResult& r);
std::string to_jsonl(const ScanResult& r);

}  // namespace ximod
