#include "evtrace/trace.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace evtrace {

namespace {

constexpr std::array<std::string_view, kEventKindCount> kKindNames = {
    "execute_program", "ex_stmt", "eval_expr", "func_call", "destination"};

}  // namespace

std::string_view kind_name(EventKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

Trace::Trace(std::string source_name, std::vector<Event> events)
    : source_name_(std::move(source_name)), events_(std::move(events)) {
  if (events_.empty()) throw std::invalid_argument("trace has no root event");
  const std::size_t n = events_.size();
  children_.resize(n);
  subtree_end_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Event& e = events_[i];
    if (e.id != i) {
      throw std::invalid_argument("event ids must be dense: expected " +
                                  std::to_string(i) + ", found " +
                                  std::to_string(e.id));
    }
    if (e.begin_time > e.end_time) {
      throw std::invalid_argument("event " + std::to_string(i) +
                                  " ends before it begins");
    }
    if (i == 0) {
      if (e.parent) throw std::invalid_argument("root event has a parent");
      if (e.kind != EventKind::ExecuteProgram) {
        throw std::invalid_argument("root event is not execute_program");
      }
      continue;
    }
    if (e.begin_time < events_[i - 1].begin_time) {
      throw std::invalid_argument("event " + std::to_string(i) +
                                  " is out of begin order");
    }
    if (!e.parent) {
      throw std::invalid_argument("event " + std::to_string(i) +
                                  " has no parent");
    }
    const EventId p = *e.parent;
    if (p >= i) {
      throw std::invalid_argument("event " + std::to_string(i) +
                                  " begins before its parent");
    }
    const Event& pe = events_[p];
    if (e.begin_time < pe.begin_time || e.end_time > pe.end_time) {
      throw std::invalid_argument("event " + std::to_string(i) +
                                  " is not nested inside its parent " +
                                  std::to_string(p));
    }
    if (!children_[p].empty()) {
      const Event& prev = events_[children_[p].back()];
      if (prev.end_time >= e.begin_time) {
        throw std::invalid_argument("event " + std::to_string(i) +
                                    " overlaps its preceding sibling " +
                                    std::to_string(prev.id));
      }
    }
    children_[p].push_back(static_cast<EventId>(i));
  }
  // Ids are in begin order, so walking backwards visits every child before
  // its parent.
  for (std::size_t i = n; i-- > 0;) {
    const auto& kids = children_[i];
    subtree_end_[i] = kids.empty() ? static_cast<EventId>(i)
                                   : subtree_end_[kids.back()];
  }
  step_max_ = events_[0].end_time;
  for (const Event& e : events_) step_max_ = std::max(step_max_, e.end_time);
}

void Trace::check_id(EventId id) const {
  if (id >= events_.size()) {
    throw std::invalid_argument("unknown event id " + std::to_string(id));
  }
}

const Event& Trace::at(EventId id) const {
  check_id(id);
  return events_[id];
}

const std::vector<EventId>& Trace::children(EventId id) const {
  check_id(id);
  return children_[id];
}

EventId Trace::subtree_end(EventId id) const {
  check_id(id);
  return subtree_end_[id];
}

bool included_in(const Trace& trace, EventId a, EventId b) {
  std::optional<EventId> cur = trace.at(a).parent;
  trace.at(b);
  while (cur) {
    if (*cur == b) return true;
    cur = trace.at(*cur).parent;
  }
  return false;
}

namespace {

// Ancestor-or-self chain of `id`, root last.
std::vector<EventId> lineage(const Trace& trace, EventId id) {
  std::vector<EventId> out;
  std::optional<EventId> cur = id;
  while (cur) {
    out.push_back(*cur);
    cur = trace.at(*cur).parent;
  }
  return out;
}

}  // namespace

bool precedes(const Trace& trace, EventId a, EventId b) {
  const Event& ea = trace.at(a);
  const Event& eb = trace.at(b);
  if (a == b) return false;
  if (ea.end_time >= eb.begin_time) return false;
  if (included_in(trace, a, b) || included_in(trace, b, a)) return false;

  // The two paths from the common ancestor diverge at a pair of siblings.
  // Distinct members of one unordered group carry no order, and neither do
  // the events nested inside them.
  const auto la = lineage(trace, a);
  const auto lb = lineage(trace, b);
  auto ia = la.rbegin();
  auto ib = lb.rbegin();
  while (ia != la.rend() && ib != lb.rend() && *ia == *ib) {
    ++ia;
    ++ib;
  }
  if (ia == la.rend() || ib == lb.rend()) return false;
  const Event& sa = trace.at(*ia);
  const Event& sb = trace.at(*ib);
  if (sa.unordered_group && sa.unordered_group == sb.unordered_group) {
    return false;
  }
  return true;
}

std::vector<EventId> previous_path(const Trace& trace, EventId a) {
  trace.at(a);
  std::vector<EventId> out;
  for (const Event& e : trace.events()) {
    if (e.id != a && precedes(trace, e.id, a)) out.push_back(e.id);
  }
  return out;
}

namespace {

class GrammarChecker {
 public:
  explicit GrammarChecker(const Trace& trace) : trace_(trace) {}

  GrammarReport run() {
    for (const Event& e : trace_.events()) {
      switch (e.kind) {
        case EventKind::ExecuteProgram:
          if (e.parent) report(e.id, 1, "execute_program nested in an event");
          statement_children(e, 1);
          break;
        case EventKind::ExStmt:
          statement_children(e, 2);
          break;
        case EventKind::EvalExpr:
          expression_children(e);
          break;
        case EventKind::FuncCall:
          call_children(e);
          break;
        case EventKind::Destination:
          if (!trace_.children(e.id).empty()) {
            report(e.id, 3, "destination event has nested events");
          }
          if (!e.atomic()) report(e.id, 3, "destination event is not atomic");
          break;
      }
    }
    report_.ok = report_.violations.empty();
    return std::move(report_);
  }

 private:
  void report(EventId id, int rule, std::string message) {
    report_.violations.push_back({id, rule, std::move(message)});
  }

  std::string child_desc(const Event& c) const {
    return std::string(kind_name(c.kind)) + " " + std::to_string(c.id);
  }

  // Rules 1 and 2: ( ex_stmt | eval_expr )*, ordered.
  void statement_children(const Event& e, int rule) {
    for (EventId c : trace_.children(e.id)) {
      const Event& ce = trace_.at(c);
      if (ce.kind != EventKind::ExStmt && ce.kind != EventKind::EvalExpr) {
        report(e.id, rule,
               std::string(kind_name(e.kind)) + " contains " + child_desc(ce));
      } else if (ce.unordered_group) {
        report(e.id, rule, child_desc(ce) + " is in an unordered group");
      }
    }
  }

  // Rule 3: func_call | eval_expr* destination? | { eval_expr }+
  void expression_children(const Event& e) {
    const auto& kids = trace_.children(e.id);
    if (kids.empty()) return;
    const Event& first = trace_.at(kids.front());
    if (first.kind == EventKind::FuncCall) {
      if (kids.size() != 1) {
        report(e.id, 3, "eval_expr contains a func_call and other events");
      }
      return;
    }
    if (first.unordered_group) {
      for (EventId c : kids) {
        const Event& ce = trace_.at(c);
        if (ce.kind != EventKind::EvalExpr ||
            ce.unordered_group != first.unordered_group) {
          report(e.id, 3,
                 "unordered eval_expr set mixed with " + child_desc(ce));
          return;
        }
      }
      return;
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const Event& ce = trace_.at(kids[i]);
      const bool last = i + 1 == kids.size();
      if (ce.kind == EventKind::Destination) {
        if (!last) report(e.id, 3, child_desc(ce) + " is not the last event");
      } else if (ce.kind != EventKind::EvalExpr) {
        report(e.id, 3, "eval_expr contains " + child_desc(ce));
      } else if (ce.unordered_group) {
        report(e.id, 3, child_desc(ce) + " mixes ordered and unordered events");
      }
    }
  }

  // Rule 4: { eval_expr }* ex_stmt*
  void call_children(const Event& e) {
    const auto& kids = trace_.children(e.id);
    bool in_body = false;
    std::optional<GroupTag> group;
    for (EventId c : kids) {
      const Event& ce = trace_.at(c);
      if (ce.kind == EventKind::EvalExpr) {
        if (in_body) {
          report(e.id, 4, "argument " + child_desc(ce) +
                              " follows a body statement");
        } else if (!ce.unordered_group ||
                   (group && group != ce.unordered_group)) {
          report(e.id, 4,
                 "argument " + child_desc(ce) + " is not in the argument set");
        }
        group = ce.unordered_group;
      } else if (ce.kind == EventKind::ExStmt) {
        in_body = true;
      } else {
        report(e.id, 4, "func_call contains " + child_desc(ce));
      }
    }
  }

  const Trace& trace_;
  GrammarReport report_;
};

}  // namespace

GrammarReport validate_grammar(const Trace& trace) {
  if (trace.empty()) return {};
  return GrammarChecker(trace).run();
}

}  // namespace evtrace
