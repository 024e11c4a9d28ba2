#pragma once

#include <stdexcept>
#include <string>

namespace semispec {

/// Failure categories shared by every module. The C API maps them 1:1 onto
/// status codes and the CLI maps them onto exit codes.
enum class ErrorKind {
  InvalidArgument,
  Io,
  DataCorruption,
  TruncationFailure,
  DegenerateWell,
  NonConvergence,
  NotAnOracle,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace semispec
