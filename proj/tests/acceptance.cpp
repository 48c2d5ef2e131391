// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <cstdio>

#include "inlsc/verification.hpp"

int main() {
  inlsc::VerifyOptions opt;
  opt.on_result = [](const inlsc::CheckResult& r) {
    std::printf("%s\n", inlsc::format_check(r).c_str());
    std::fflush(stdout);
  };
  const auto results = inlsc::run_verification(opt);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
