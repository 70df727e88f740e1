#pragma once

#include <stdexcept>
#include <string>

namespace ddestab {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Io,
  NotHermitian,
  NotPositiveDefinite,
  NoConvergence,
  Singular,
  ZeroPolynomial,
  DegenerateLeading,
  UnsupportedScheme,
  NotSimultaneouslyDiagonalizable,
  ComplexSpectrum,
  TimeOffGrid,
  StateNotRetained,
  InvalidParams,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code selects the failure class.
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

}  // namespace ddestab
