#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlab {

// Stable identifiers; the CLI prints them verbatim as the first token of its
// error line.
enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  InvalidState,
  SolverFailure,
  Precondition,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::InvalidState: return "invalid_state";
    case ErrorCode::SolverFailure: return "solver_failure";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace dlab
