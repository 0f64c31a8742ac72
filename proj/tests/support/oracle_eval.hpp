#pragma once

// Brute-force rule evaluation: scopes by parent walks, outermost checks by
// scanning ancestors, quantifiers over every match without stopping early,
// and path membership by dynamic programming over splits.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtrace/forman/eval.hpp"

namespace evtest {

using evtrace::EventId;
using evtrace::forman::Binding;
using evtrace::forman::TValue;

class BruteEvaluator {
 public:
  BruteEvaluator(const evtrace::Trace& trace, std::optional<std::string> within)
      : trace_(trace), within_(std::move(within)) {}

  bool matches(EventId e, const evtrace::forman::Pattern& p, const Binding& b) const;
  std::vector<EventId> select(EventId scope, bool all,
                              const evtrace::forman::Pattern& p, const Binding& b) const;
  std::vector<TValue> aggregate(const evtrace::forman::Aggregate& a, const Binding& b) const;
  evtrace::forman::QuantifierResult quantifier(const evtrace::forman::TExpr& q,
                                               const Binding& b) const;
  /// Throws evtrace::EvalError like the real evaluator.
  TValue eval(const evtrace::forman::TExpr& e, Binding& b) const;
  bool truth(const evtrace::forman::TExpr& e, Binding& b) const;

 private:
  bool inside(EventId e, EventId scope) const;
  EventId scope_of(const std::string& from, const Binding& b) const;

  const evtrace::Trace& trace_;
  std::optional<std::string> within_;
};

/// Whether the whole sequence `seq` is in the language of `px`, where a leaf
/// accepts one element when `leaf` says so.
bool brute_path_match(
    const evtrace::forman::PathExpr& px, std::span<const EventId> seq,
    const std::function<bool(EventId, const evtrace::forman::Pattern&)>& leaf);

}  // namespace evtest
