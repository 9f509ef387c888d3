#pragma once

#include <json.hpp>

#include "hypervekua/errors.hpp"
#include "run_config.hpp"

namespace hypervekua::cli {

/// An error carrying extra machine-readable fields for the error JSON.
class DetailedError : public Error {
 public:
  DetailedError(const Error& cause, nlohmann::json details)
      : Error(cause.code(), cause.what()), details_(std::move(details)) {}
  const nlohmann::json& details() const { return details_; }

 private:
  nlohmann::json details_;
};

struct Context {
  RunConfig config;
  int threads = 1;
};

// Each command writes its artifacts plus summary.json under config.out and
// returns whether every configured tolerance check passed.
bool cmd_powers(const Context& ctx);
bool cmd_modes(const Context& ctx);
bool cmd_spectral(const Context& ctx);
bool cmd_sequence(const Context& ctx);
bool cmd_check(const Context& ctx);

}  // namespace hypervekua::cli
