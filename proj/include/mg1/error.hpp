#ifndef MG1_ERROR_HPP
#define MG1_ERROR_HPP

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mg1 {

enum class Errc {
  NotStochastic,
  Reducible,
  SingularSystem,
  IndexOutOfDomain,
  ToleranceUnreachable,
  ExponentMismatch,
  NoConvergence,
  GammaTooSmall,
  NegativeArgument,
  GridUnderflow,
  CutoffTooSmall,
  DimensionMismatch,
  CapTooSmall,
  ReferenceUnstable,
  NonNegativeDrift,
  InvalidSpec,
  PreconditionViolation,
  ParseError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above; the CLI
// maps them to `ERROR <code>: <message>` on stderr.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Short scientific rendering of a value for error messages.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mg1

#endif  // MG1_ERROR_HPP
