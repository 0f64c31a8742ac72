#pragma once

#include <string_view>

#include "evtrace/forman/ast.hpp"

namespace evtrace::forman {

/// Parses a rule file. Throws SyntaxError (bad syntax, malformed AT
/// expression, unknown event kind) or SemanticError (unbound metavariable).
RuleSet parse_rules(std::string_view source);

/// Parses a standalone path expression, e.g. "(func_call IS 'a')+".
PathExprPtr parse_path(std::string_view source);

}  // namespace evtrace::forman
