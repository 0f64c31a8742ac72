#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace evtrace {

/// Problem in a MiniC or FORMAN source text, with the 1-based position.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& bare_message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// Well-formed text that violates a static rule (undeclared name, break
/// outside a loop, unbound metavariable, ...).
class SemanticError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// Error raised while the target program runs.
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(const std::string& message, int line)
      : std::runtime_error(message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Error raised while evaluating a rule over a trace.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evtrace
