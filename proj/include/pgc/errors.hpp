#ifndef PGC_ERRORS_HPP
#define PGC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgc {

// Caller broke a documented precondition (dimension mismatch, index out of
// range, mismatched caps).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The input is well-formed but the operation declines it (n above an
// enumeration limit, non-decomposable circuit, disconnected graph).
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line),
        detail_(what) {}

  std::size_t line() const { return line_; }
  /// Message without the line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// Non-finite values, degenerate kernels, divergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two independent computations of the same quantity disagree.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pgc

#endif  // PGC_ERRORS_HPP
