#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace extgraph {

enum class ErrorKind {
  TooFewExceedances,
  GpdNonConvergence,
  DomainError,
  NonConvergence,
  DegenerateScale,
  NumericalUnderflow,
  InvalidNode,
  SingularCorrelation,
  NotConverged,
  DimensionMismatch,
  TooFewExcesses,
  InvalidArgument,
  PdProjectionFailed,
  InsufficientTailRows,
  TooFewJointExceedances,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}
  ErrorKind kind() const noexcept { return kind_; }
  // 1-based input line for parse errors, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace extgraph
