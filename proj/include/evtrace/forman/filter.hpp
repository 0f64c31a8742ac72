#pragma once

// Static footprint of a rule set: which events the evaluator can examine
// and which probe expressions it reads.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evtrace/forman/ast.hpp"
#include "evtrace/minic/ast.hpp"
#include "evtrace/trace.hpp"

namespace evtrace {

struct Footprint {
  EventKind kind = EventKind::ExStmt;
  std::optional<std::string> name;  // whitespace-normalized
  std::optional<std::string> enclosing_function;

  /// `normalized_name` must already be whitespace-normalized.
  bool matches(EventKind k, std::string_view normalized_name,
               std::string_view function) const;
  std::string describe() const;

  friend auto operator<=>(const Footprint&, const Footprint&) = default;
};

struct Filter {
  bool pass_all = false;
  std::set<Footprint> footprints;
  std::set<Footprint> keep_structure;

  static Filter all() {
    Filter f;
    f.pass_all = true;
    return f;
  }

  /// One-line description stored in trace headers.
  std::string summary() const;
};

/// True iff the filter records an event with these attributes.
bool admits(const Filter& filter, EventKind kind, std::string_view name,
            std::string_view enclosing_function);

/// A target-language expression evaluated at the end of every recorded event
/// matching `target`.
struct ProbeRequest {
  Footprint target;
  std::shared_ptr<const minic::Expr> expr;
  std::string expr_text;
};

struct FilterPlan {
  Filter filter;
  std::vector<ProbeRequest> probes;
};

FilterPlan derive_footprint(const forman::RuleSet& rules);

}  // namespace evtrace
