#pragma once

// Post-mortem evaluation of rules over a recorded trace.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtrace/forman/ast.hpp"
#include "evtrace/trace.hpp"

namespace evtrace::forman {

using Binding = std::map<std::string, EventId>;

/// Result of evaluating a rule-language expression.
struct TValue {
  enum class Type { Int, Bool, Str, Event, List };

  Type type = Type::Bool;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::string str_value;
  EventId event = 0;
  std::vector<TValue> items;

  static TValue integer(std::int64_t v);
  static TValue boolean(bool v);
  static TValue string(std::string v);
  static TValue event_ref(EventId id);
  static TValue list(std::vector<TValue> items);

  friend bool operator==(const TValue&, const TValue&) = default;
};

struct QuantifierResult {
  bool value = false;
  std::optional<Binding> witness;
  std::uint64_t events_visited = 0;
};

/// Evaluates expressions of one rule against one trace. `within` restricts
/// every selection to events lexically inside that function.
class Evaluator {
 public:
  explicit Evaluator(const Trace& trace,
                     std::optional<std::string> within = std::nullopt);

  bool match_pattern(EventId e, const Pattern& p, const Binding& b) const;

  /// Events inside `scope` matching `p`, in id order. Without `all` only the
  /// outermost matches are kept.
  std::vector<EventId> select(EventId scope, bool all, const Pattern& p,
                              const Binding& b) const;

  /// `q` must be a Quantified expression.
  QuantifierResult eval_quantifier(const TExpr& q, const Binding& b) const;

  std::vector<TValue> eval_aggregate(const Aggregate& agg, const Binding& b) const;

  bool match_path(std::span<const EventId> events, const PathExpr& px,
                  const Binding& b) const;

  /// Evaluates `e`. Quantifiers that decide the value (an EXISTS witness, a
  /// FOREACH counterexample) export their bindings into `b`.
  TValue eval(const TExpr& e, Binding& b) const;

  bool truth(const TExpr& e, Binding& b) const;

 private:
  EventId resolve_scope(const std::string& from, const Binding& b) const;
  TValue probe_value(const TExpr& e, const Binding& b) const;

  const Trace& trace_;
  std::optional<std::string> within_;
};

/// Two-line rendering used in messages:
///   <kind> :> '<name>' source line <n> within function <f>
///   Time= <begin> .. <end>
std::string render_event(const Event& e);

/// Rendering of a value inside a SAY clause.
std::string render_value(const Trace& trace, const TValue& v);

struct Message {
  std::size_t rule = 0;  // index into RuleSet::rules
  std::string text;
  bool error = false;
};

struct Report {
  std::vector<Message> messages;
  std::size_t onfail_fired = 0;
  std::size_t errors = 0;

  /// Every message text followed by a newline.
  std::string text() const;
};

Report run_rules(const Trace& trace, const RuleSet& rules);

}  // namespace evtrace::forman
