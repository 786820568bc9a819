#ifndef KINLNA_ERRORS_HPP
#define KINLNA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kinlna {

// Machine-readable error kinds; every exception thrown by the library
// carries exactly one of these.
enum class ErrorKind {
  SyntaxError,        // DSL text violates the grammar
  UnknownIdentifier,  // identifier does not resolve against the network
  DuplicateName,      // species/param/const name declared twice
  EmptyReactionList,  // network has no reactions
  EvaluationError,    // division by zero etc. inside a rate expression
  StateInconsistency, // negative propensity where nonnegativity is required
  IntegrationFailure, // ODE/SDE integration blew up or exceeded max_steps
  FilterFailure,      // innovation covariance not positive definite
  RangeError,         // query outside a trajectory span / non-grid query
  UsageError,         // bad arguments to an operation
  NumericalFailure,   // overflow, non-finite intermediate
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

// Parse errors additionally carry a source location (1-based).
class ParseError : public Error {
public:
  ParseError(ErrorKind kind, std::string msg, int line, int column)
      : Error(kind, msg + " (line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ")"),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

} // namespace kinlna

#endif
