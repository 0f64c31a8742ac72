#pragma once

#include <set>
#include <string>

#include "evtrace/minic/ast.hpp"

namespace evtrace::minic::detail {

/// Throws SemanticError if `e` names a variable outside `visible` or calls
/// an unknown function or with the wrong number of arguments. `what`
/// prefixes the message.
void check_expression_names(const Program& program, const Expr& e,
                            const std::set<std::string>& visible,
                            const std::string& what);

}  // namespace evtrace::minic::detail
