#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qmdp {

struct VerifyCheck {
  std::string name;
  std::uint64_t passed = 0;
  std::uint64_t total = 0;
  double required_fraction = 1.0;  // probabilistic checks may pass below 100%

  bool ok() const {
    return total > 0 && static_cast<double>(passed) >= required_fraction * static_cast<double>(total);
  }
};

struct VerifySummary {
  std::string suite;
  std::vector<VerifyCheck> checks;

  bool ok() const;
  nlohmann::json to_json() const;
  /// One "PASS|FAIL name passed/total" line per check.
  std::string text() const;
};

/// Suite names: total-variance, oracle-normalization, monotone-iterates,
/// sandwich, gap-checks, closed-form. `trials` = 0 selects the suite default.
VerifySummary run_verify_suite(const std::string& suite, std::size_t trials, std::uint64_t seed);

std::vector<std::string> verify_suite_names();

}  // namespace qmdp
