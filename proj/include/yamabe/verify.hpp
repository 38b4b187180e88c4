#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace yamabe {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  /// Harness self-test: "warped-sign" flips the fiber sign of one fixture.
  std::string inject_fault;
};

/// One suite per module plus "paper", which runs every check.
const std::vector<std::string>& verify_suites();

/// Throws ConfigError for an unknown suite or fault name.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& options = {});

}  // namespace yamabe
