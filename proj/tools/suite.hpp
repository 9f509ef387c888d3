#pragma once

// The acceptance property suite, shared by the acceptance test and `hypervekua check`.

#include <string>
#include <vector>
#include <functional>

namespace hypervekua::suite {

struct Result {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

/// Runs every criterion in order; `on_result` sees each result as it finishes.
std::vector<Result> run_all(const std::function<void(const Result&)>& on_result = {});

/// "PASS  4. title  detail [0.01 s, limit 30 s]"
std::string format_line(const Result& r);

}  // namespace hypervekua::suite
