#pragma once

#include <stdexcept>
#include <string>

namespace smh {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  kMalformedHeader,
  kSyntax,
  kTerminalOutOfRange,
  kEdgeOutOfRange,
  kFractionalWeight,
  kNegativeWeight,
  kDisconnected,
  kNoTerminals,
};

const char* to_string(ParseErrorKind kind);

/// Malformed or semantically invalid input file.
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& detail)
      : Error(format(kind, line, detail)), kind_(kind), line_(line) {}

  ParseErrorKind kind() const { return kind_; }
  /// 1-based line number, or 0 if the error is not tied to a line.
  int line() const { return line_; }

 private:
  static std::string format(ParseErrorKind kind, int line, const std::string& detail) {
    std::string msg = to_string(kind);
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  ParseErrorKind kind_;
  int line_;
};

/// The terminals cannot be connected by the supplied edges.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Two operands disagree on the weight of a shared edge, or an argument
/// violates a structural precondition.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A dynamic program exceeded its bag-size or table-entry budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An exact oracle refused an instance beyond its configured size.
class RefusedError : public Error {
 public:
  using Error::Error;
};

/// A deadline expired while work was in progress.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace smh
