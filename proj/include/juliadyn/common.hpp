#pragma once
// Shared scalar types, error codes and small numeric helpers used by every
// module of the library.

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace juliadyn {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{2*pi*i*t} for an angle t measured in turns (t in [0,1)).
inline cplx circle_point(double turns) {
  const double a = kTwoPi * turns;
  return {std::cos(a), std::sin(a)};
}

// Exact angle num/den (in turns, reduced or not; den > 0).  Used wherever
// multiplying an angle by the polynomial degree must stay exact: repeated
// doubling/tripling of a floating angle loses all precision after ~50 steps,
// while (num * d) mod den does not.
struct RationalAngle {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double turns() const { return static_cast<double>(num) / static_cast<double>(den); }
  cplx point() const { return circle_point(turns()); }
  RationalAngle times(std::int64_t d) const { return {(num * d) % den, den}; }
};

enum class ErrorCode {
  InvalidInput,
  ZeroLeadingCoefficient,
  AlphabetMismatch,
  OutOfFamily,
  BudgetExceeded,
  BranchFailure,
  BranchAmbiguity,
  NewtonDivergence,
  RootCountMismatch,
  SingularIntegrand,
  IllConditionedFit,
  ConvergenceBudget,
  BracketFailure,
  NoConvergence,
  VerificationFailed,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::OutOfFamily: return "OutOfFamily";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::BranchFailure: return "BranchFailure";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::RootCountMismatch: return "RootCountMismatch";
    case ErrorCode::SingularIntegrand: return "SingularIntegrand";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::ConvergenceBudget: return "ConvergenceBudget";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Deterministic uniform double in [0,1) from a 64-bit generator output.
// Avoids std::uniform_real_distribution, whose exact sequence is
// implementation defined.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace juliadyn
