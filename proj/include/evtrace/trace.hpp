#pragma once

// Event trace model: events as step-counter intervals related by IN
// (containment) and PRECEDES (sequential order), plus the event grammar
// checker.
//
//   execute_program :: ( ex_stmt | eval_expr )*
//   ex_stmt         :: ( ex_stmt | eval_expr )*
//   eval_expr       :: func_call | eval_expr* destination? | { eval_expr }+
//   func_call       :: { eval_expr }* ex_stmt*

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evtrace/value.hpp"

namespace evtrace {

enum class EventKind : std::uint8_t {
  ExecuteProgram,
  ExStmt,
  EvalExpr,
  FuncCall,
  Destination,
};

inline constexpr int kEventKindCount = 5;

/// Rule-language spelling: execute_program, ex_stmt, eval_expr, ...
std::string_view kind_name(EventKind kind);
std::optional<EventKind> kind_from_name(std::string_view name);

using EventId = std::uint32_t;
using StepTime = std::uint64_t;
using GroupTag = std::uint64_t;

/// Value of a probe expression recorded at an event's end. Exactly one of
/// `value` or `error` is meaningful.
struct ProbeValue {
  std::optional<Value> value;
  std::string error;

  bool ok() const { return value.has_value(); }
  friend bool operator==(const ProbeValue&, const ProbeValue&) = default;
};

struct Event {
  EventId id = 0;
  EventKind kind = EventKind::ExStmt;
  std::string name;
  int source_line = 1;
  std::string enclosing_function;
  StepTime begin_time = 0;
  StepTime end_time = 0;
  std::optional<EventId> parent;
  std::optional<GroupTag> unordered_group;
  std::map<std::string, ProbeValue> probes;

  StepTime duration() const { return end_time - begin_time; }
  bool atomic() const { return begin_time == end_time; }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Immutable execution history. Event ids are dense and in begin order, so
/// the descendants of an event occupy the id range (id, subtree_end(id)].
class Trace {
 public:
  Trace() = default;

  /// Checks structural well-formedness (dense ids, single parentless root of
  /// kind ExecuteProgram, parents precede children, proper interval nesting)
  /// and throws std::invalid_argument on failure.
  Trace(std::string source_name, std::vector<Event> events);

  const std::string& source_name() const { return source_name_; }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  EventId root() const { return 0; }
  StepTime step_max() const { return step_max_; }

  /// Throws std::invalid_argument for an unknown id.
  const Event& at(EventId id) const;
  const std::vector<EventId>& children(EventId id) const;
  EventId subtree_end(EventId id) const;

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.source_name_ == b.source_name_ && a.events_ == b.events_;
  }

 private:
  void check_id(EventId id) const;

  std::string source_name_;
  std::vector<Event> events_;
  std::vector<std::vector<EventId>> children_;
  std::vector<EventId> subtree_end_;
  StepTime step_max_ = 0;
};

/// True iff `b` is a proper ancestor of `a`.
bool included_in(const Trace& trace, EventId a, EventId b);

/// True iff `a` ends before `b` begins, neither contains the other, and the
/// two do not sit (or sit inside) distinct members of one unordered group.
bool precedes(const Trace& trace, EventId a, EventId b);

/// All events that precede `a`, in id order.
std::vector<EventId> previous_path(const Trace& trace, EventId a);

struct GrammarViolation {
  EventId event = 0;
  int rule = 0;  // grammar rule number, see docs/minic.md
  std::string message;
};

struct GrammarReport {
  bool ok = true;
  std::vector<GrammarViolation> violations;
};

GrammarReport validate_grammar(const Trace& trace);

}  // namespace evtrace
