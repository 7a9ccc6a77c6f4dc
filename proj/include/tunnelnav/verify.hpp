#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tunnelnav {

struct CheckResult {
  std::string name;
  bool passed = false;
  long cases = 0;
  std::string detail;  // first violation, or a short summary when passing
};

/// Names accepted by run_verify_suite, in canonical order.
std::vector<std::string> verify_suite_names();

/// Runs one named property suite on the built-in cylinder (R = 1) and torus
/// (R = 2, r = 0.5) fixtures. Random cases are drawn from `seed`.
CheckResult run_verify_suite(const std::string& name, std::uint64_t seed);

/// "name: PASS (N cases)" or "name: FAIL (detail)".
std::string format_check(const CheckResult& result);

}  // namespace tunnelnav
