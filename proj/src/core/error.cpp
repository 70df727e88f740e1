#include "ddestab/error.hpp"

namespace ddestab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::DegenerateLeading: return "DegenerateLeading";
    case ErrorCode::UnsupportedScheme: return "UnsupportedScheme";
    case ErrorCode::NotSimultaneouslyDiagonalizable: return "NotSimultaneouslyDiagonalizable";
    case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorCode::TimeOffGrid: return "TimeOffGrid";
    case ErrorCode::StateNotRetained: return "StateNotRetained";
    case ErrorCode::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

}  // namespace ddestab
