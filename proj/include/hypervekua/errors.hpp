#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypervekua {

/// Base of all library errors. `code()` is a stable machine-readable tag
/// used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define HYPERVEKUA_DEFINE_ERROR(Name, Code)                         \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(Code, what) {}   \
  };

HYPERVEKUA_DEFINE_ERROR(ZeroDivisor, "ZERO_DIVISOR")
HYPERVEKUA_DEFINE_ERROR(OutOfDomain, "OUT_OF_DOMAIN")
HYPERVEKUA_DEFINE_ERROR(NotHyperbolicAnalytic, "NOT_HYPERBOLIC_ANALYTIC")
HYPERVEKUA_DEFINE_ERROR(NoConvergence, "NO_CONVERGENCE")
HYPERVEKUA_DEFINE_ERROR(DegeneratePair, "DEGENERATE_PAIR")
HYPERVEKUA_DEFINE_ERROR(DomainMismatch, "DOMAIN_MISMATCH")
HYPERVEKUA_DEFINE_ERROR(ResidualTooLarge, "RESIDUAL_TOO_LARGE")
HYPERVEKUA_DEFINE_ERROR(DepthExceeded, "DEPTH_EXCEEDED")
HYPERVEKUA_DEFINE_ERROR(CenterSingular, "CENTER_SINGULAR")
HYPERVEKUA_DEFINE_ERROR(StepTooLarge, "STEP_TOO_LARGE")
HYPERVEKUA_DEFINE_ERROR(InvalidArgument, "INVALID_ARGUMENT")
HYPERVEKUA_DEFINE_ERROR(PotentialParse, "POTENTIAL_PARSE")
HYPERVEKUA_DEFINE_ERROR(FormatError, "FORMAT_ERROR")

#undef HYPERVEKUA_DEFINE_ERROR

}  // namespace hypervekua
