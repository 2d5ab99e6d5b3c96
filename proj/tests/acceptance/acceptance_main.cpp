// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure.  Same checks as `spma verify`.

#include <cstdio>
#include <string>

#include "spma/verify.hpp"

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "all";
  try {
    const auto results = spma::run_acceptance_suite(suite);
    for (const auto& r : results) std::printf("%s\n", spma::format_criterion_line(r).c_str());
    const bool ok = spma::all_passed(results);
    std::printf("%s\n", ok ? "all criteria passed" : "ACCEPTANCE FAILURES PRESENT");
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
