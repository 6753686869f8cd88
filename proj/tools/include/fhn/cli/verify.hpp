#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fhn::cli {

struct SuiteResult {
  std::string name;
  bool passed = false;
  long checked = 0;
  long failures = 0;
  std::string detail;
};

struct VerifySettings {
  std::uint64_t seed = 1;
  long rotation_samples = 100000;
  int multistarts = 200;
  int search_budget = 400;
};

/// rotation, index, infinity, hopf, section, cusp, twocycle; "all" runs each.
std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, const VerifySettings& s);

}  // namespace fhn::cli
