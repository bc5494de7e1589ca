// Acceptance gate: runs every verification criterion and prints one
// PASS/FAIL line per criterion plus a per-check audit trail.  Exits nonzero
// if any criterion fails.  Optional argv[1]: path to the command-line binary
// (enables the CLI determinism check).

#include <cstdio>
#include <exception>
#include <string>

#include "juliadyn/verify_suite.hpp"

int main(int argc, char** argv) {
  juliadyn::VerifySuiteOptions options;
  if (argc > 1) options.cli_path = argv[1];

  juliadyn::VerifySuite suite(options);
  int passed = 0;
  const int total = juliadyn::VerifySuite::criterion_count();
  for (int k = 1; k <= total; ++k) {
    juliadyn::CriterionResult result;
    try {
      result = suite.run(k);
    } catch (const std::exception& ex) {
      // A crashed criterion counts as a failure but must not end the gate.
      std::printf("criterion %d FAIL (exception) %s\n", k, ex.what());
      std::fflush(stdout);
      continue;
    }
    std::printf("criterion %d %s (%.1fs) %s\n", result.number,
                result.pass ? "PASS" : "FAIL", result.seconds,
                result.title.c_str());
    for (const auto& check : result.checks) {
      std::printf("    [%s] %-6s computed=%.12g target=%.12g tol=%.3g (%s)%s%s\n",
                  check.id.c_str(), check.pass ? "ok" : "FAIL", check.computed,
                  check.target, check.tolerance, check.tag.c_str(),
                  check.note.empty() ? "" : " note: ",
                  check.note.c_str());
    }
    std::fflush(stdout);
    if (result.pass) ++passed;
  }
  std::printf("ACCEPTANCE: %d/%d criteria passed\n", passed, total);
  return passed == total ? 0 : 1;
}
