// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>

#include "suite.hpp"

int main() {
  int passed = 0;
  const auto results = hypervekua::suite::run_all([&](const hypervekua::suite::Result& r) {
    std::printf("%s\n", hypervekua::suite::format_line(r).c_str());
    std::fflush(stdout);
    passed += r.pass ? 1 : 0;
  });
  std::printf("%d of %zu criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
