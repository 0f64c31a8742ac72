#pragma once

// Value-level semantics shared by the instrumented and the plain
// interpreter: operators, conditions and builtins.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evtrace/minic/ast.hpp"
#include "evtrace/value.hpp"

namespace evtrace::minic::ops {

/// Target-program I/O: captured output and line-oriented input.
class ProgramIo {
 public:
  explicit ProgramIo(std::string_view input);

  std::string& output() { return output_; }
  /// Next input line including its '\n', or "" at end of input.
  std::string next_line();

 private:
  std::string output_;
  std::string input_;
  std::size_t pos_ = 0;
};

Value binary(BinaryOp op, const Value& lhs, const Value& rhs, int line);
Value unary(UnaryOp op, const Value& v, int line);
bool condition(const Value& v, int line);
Value call_builtin(std::string_view name, std::span<const Value> args,
                   ProgramIo& io, int line);

}  // namespace evtrace::minic::ops
