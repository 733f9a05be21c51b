#pragma once

// Self-verification suites. Each suite evaluates an identity or inequality on
// a fixed grid and reports every point with its two sides.

#include <string>
#include <utility>
#include <vector>

#include "ximod/real.hpp"

namespace ximod {

struct VerifyOptions {
  double tol{1e-10};
  // Multiplies S_0 in every moment table the identity suite uses; 1 leaves
  // the tables untouched. Used to check that the suite can fail.
  double s0_scale{1.0};
  Precision precision{Precision::Double};
  // Grid and threshold overrides for the identity and grad suites; empty or zero keeps the
  // built-in grid and threshold.
  std::vector<double> tau_list;
  std::vector<double> t_list;
  double rel_tol{0};
};

struct CheckRow {
  std::vector<std::pair<std::string, double>> point;
  std::string what;
  double lhs{0};
  double rhs{0};
  double rel_err{0};  // residual for identities, relative margin for inequalities
  bool pass{false};
  std::vector<std::pair<std::string, double>> extra;
};

struct SuiteReport {
  std::string name;
  std::string description;
  double threshold{0};
  double worst{0};  // worst residual over rows (identities) or smallest margin
  bool pass{false};
  std::string error;
  std::vector<CheckRow> rows;
};

struct VerifyReport {
  std::vector<SuiteReport> suites;
  bool pass() const;
};

// Suite names in run order.
const std::vector<std::string>& suite_names();

// Throws DomainError for an unknown name. "thm1" is accepted for "identity".
SuiteReport verify_suite(const std::string& name, const VerifyOptions& opts);

VerifyReport verify_all(const VerifyOptions& opts);

std::string to_json(const VerifyReport& r, bool include_rows = true);

}  // namespace ximod
