#pragma once

#include <stdexcept>
#include <string>

namespace hisd {

enum class ErrorCode {
  invalid_argument,   // bad sizes, bad parameters, malformed input
  contract_violation, // a documented precondition does not hold
  rank_deficient,     // orthonormalization met a dependent column
  degenerate,         // an eigenvalue too close to zero for the requested use
  inadmissible,       // a theory-side admissibility condition fails
  no_convergence,     // an iteration cap was reached without meeting tolerance
  diverged,           // a run left the guarded region
  missing_data,       // an optional input (e.g. reference point) is required here
  io_failure,         // file could not be written/read
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

} // namespace hisd
