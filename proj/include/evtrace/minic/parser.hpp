#pragma once

#include <string>
#include <string_view>

#include "evtrace/minic/ast.hpp"

namespace evtrace::minic {

/// Parses and checks a whole MiniC program. Throws SyntaxError or
/// SemanticError.
Program parse_program(std::string_view source, std::string program_name = "main");

/// Parses a standalone expression (probe text). Names are not resolved.
/// `line`/`column` give the position of the first character for diagnostics.
ExprPtr parse_expression(std::string_view text, int line = 1, int column = 1);

/// Names a builtin accepts, or false for unknown names.
bool is_builtin(std::string_view name);

}  // namespace evtrace::minic
