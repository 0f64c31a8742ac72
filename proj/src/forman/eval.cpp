#include "evtrace/forman/eval.hpp"

#include <algorithm>
#include <cctype>

#include "evtrace/error.hpp"
#include "evtrace/minic/ast.hpp"

namespace evtrace::forman {

TValue TValue::integer(std::int64_t v) {
  TValue t;
  t.type = Type::Int;
  t.int_value = v;
  return t;
}

TValue TValue::boolean(bool v) {
  TValue t;
  t.type = Type::Bool;
  t.bool_value = v;
  return t;
}

TValue TValue::string(std::string v) {
  TValue t;
  t.type = Type::Str;
  t.str_value = std::move(v);
  return t;
}

TValue TValue::event_ref(EventId id) {
  TValue t;
  t.type = Type::Event;
  t.event = id;
  return t;
}

TValue TValue::list(std::vector<TValue> items) {
  TValue t;
  t.type = Type::List;
  t.items = std::move(items);
  return t;
}

namespace {

const char* type_name(TValue::Type t) {
  switch (t) {
    case TValue::Type::Int: return "int";
    case TValue::Type::Bool: return "bool";
    case TValue::Type::Str: return "str";
    case TValue::Type::Event: return "event";
    case TValue::Type::List: return "list";
  }
  return "?";
}

std::string short_event(const Event& e) {
  return std::string(kind_name(e.kind)) + " '" + e.name + "' at line " +
         std::to_string(e.source_line) + ", time " +
         std::to_string(e.begin_time) + ".." + std::to_string(e.end_time);
}

bool numeric(const TValue& v) {
  return v.type == TValue::Type::Int || v.type == TValue::Type::Bool;
}

std::int64_t number(const TValue& v) {
  return v.type == TValue::Type::Int ? v.int_value : (v.bool_value ? 1 : 0);
}

bool truthy(const TValue& v) {
  if (!numeric(v)) {
    throw EvalError(std::string("a ") + type_name(v.type) +
                    " value is not a truth value");
  }
  return number(v) != 0;
}

template <class T>
bool compare(CompareOp op, const T& a, const T& b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

// Thompson construction over pattern leaves.
class PathNfa {
 public:
  explicit PathNfa(const PathExpr& px) {
    const Fragment f = build(px);
    start_ = f.start;
    accept_ = f.accept;
  }

  template <class Match>
  bool accepts(std::span<const EventId> events, Match&& match) const {
    std::vector<char> current(states_.size(), 0);
    close(start_, current);
    for (EventId e : events) {
      std::vector<char> next(states_.size(), 0);
      bool any = false;
      for (std::size_t s = 0; s < states_.size(); ++s) {
        if (!current[s] || !states_[s].leaf) continue;
        if (match(e, *states_[s].leaf)) {
          close(states_[s].next, next);
          any = true;
        }
      }
      if (!any) return false;
      current = std::move(next);
    }
    return current[accept_] != 0;
  }

 private:
  struct State {
    const Pattern* leaf = nullptr;  // consuming edge to `next`
    int next = -1;
    std::vector<int> eps;
  };
  struct Fragment {
    int start;
    int accept;
  };

  int add() {
    states_.emplace_back();
    return static_cast<int>(states_.size()) - 1;
  }

  Fragment build(const PathExpr& p) {
    switch (p.kind) {
      case PathExpr::Kind::Leaf: {
        const int s = add();
        const int t = add();
        states_[s].leaf = &p.leaf;
        states_[s].next = t;
        return {s, t};
      }
      case PathExpr::Kind::Seq: {
        Fragment f = build(*p.items[0]);
        for (std::size_t i = 1; i < p.items.size(); ++i) {
          const Fragment g = build(*p.items[i]);
          states_[f.accept].eps.push_back(g.start);
          f.accept = g.accept;
        }
        return f;
      }
      case PathExpr::Kind::Alt: {
        const int s = add();
        const int t = add();
        for (const auto& item : p.items) {
          const Fragment g = build(*item);
          states_[s].eps.push_back(g.start);
          states_[g.accept].eps.push_back(t);
        }
        return {s, t};
      }
      case PathExpr::Kind::Star:
      case PathExpr::Kind::Plus:
      case PathExpr::Kind::Opt: {
        const int s = add();
        const int t = add();
        const Fragment g = build(*p.items[0]);
        states_[s].eps.push_back(g.start);
        states_[g.accept].eps.push_back(t);
        if (p.kind != PathExpr::Kind::Plus) states_[s].eps.push_back(t);
        if (p.kind != PathExpr::Kind::Opt) states_[g.accept].eps.push_back(g.start);
        return {s, t};
      }
    }
    return {0, 0};
  }

  void close(int s, std::vector<char>& set) const {
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (set[x]) continue;
      set[x] = 1;
      for (int y : states_[x].eps) stack.push_back(y);
    }
  }

  std::vector<State> states_;
  int start_ = 0;
  int accept_ = 0;
};

}  // namespace

Evaluator::Evaluator(const Trace& trace, std::optional<std::string> within)
    : trace_(trace), within_(std::move(within)) {}

bool Evaluator::match_pattern(EventId e, const Pattern& p, const Binding& b) const {
  const Event& ev = trace_.at(e);
  if (ev.kind != p.kind) return false;
  if (p.is_literal &&
      minic::normalize_ws(*p.is_literal) != minic::normalize_ws(ev.name)) {
    return false;
  }
  if (!p.context) return true;
  Binding local = b;
  if (!p.metavar.empty()) local[p.metavar] = e;
  return truth(*p.context, local);
}

EventId Evaluator::resolve_scope(const std::string& from, const Binding& b) const {
  if (from.empty()) return trace_.root();
  auto it = b.find(from);
  if (it == b.end()) {
    throw EvalError("FROM scope metavariable '" + from + "' is not bound");
  }
  return it->second;
}

std::vector<EventId> Evaluator::select(EventId scope, bool all, const Pattern& p,
                                       const Binding& b) const {
  std::vector<EventId> out;
  const EventId last = trace_.subtree_end(scope);
  for (EventId i = scope + 1; i <= last; ++i) {
    if (within_ && trace_.at(i).enclosing_function != *within_) continue;
    if (!match_pattern(i, p, b)) continue;
    out.push_back(i);
    // Ids of descendants follow their ancestor contiguously.
    if (!all) i = trace_.subtree_end(i);
  }
  return out;
}

QuantifierResult Evaluator::eval_quantifier(const TExpr& q, const Binding& b) const {
  QuantifierResult r;
  const bool exists = q.quantifier == Quantifier::Exists;
  const EventId scope = resolve_scope(q.from, b);
  for (EventId e : select(scope, true, q.pattern, b)) {
    ++r.events_visited;
    Binding local = b;
    local[q.pattern.metavar] = e;
    const bool holds = q.operands.empty() || truth(*q.operands[0], local);
    if (holds == exists) {
      r.value = exists;
      r.witness = std::move(local);
      return r;
    }
  }
  r.value = !exists;
  return r;
}

std::vector<TValue> Evaluator::eval_aggregate(const Aggregate& agg,
                                              const Binding& b) const {
  std::vector<TValue> out;
  const EventId scope = resolve_scope(agg.from, b);
  for (EventId e : select(scope, agg.all, agg.pattern, b)) {
    if (!agg.apply) {
      out.push_back(TValue::event_ref(e));
      continue;
    }
    Binding local = b;
    if (!agg.pattern.metavar.empty()) local[agg.pattern.metavar] = e;
    out.push_back(eval(*agg.apply, local));
  }
  return out;
}

bool Evaluator::match_path(std::span<const EventId> events, const PathExpr& px,
                           const Binding& b) const {
  const PathNfa nfa(px);
  return nfa.accepts(events, [&](EventId e, const Pattern& p) {
    return match_pattern(e, p, b);
  });
}

TValue Evaluator::probe_value(const TExpr& e, const Binding& b) const {
  auto it = b.find(e.text);
  if (it == b.end()) throw EvalError("metavariable '" + e.text + "' is not bound");
  const Event& ev = trace_.at(it->second);
  auto p = ev.probes.find(e.probe_text);
  if (p == ev.probes.end()) {
    throw EvalError("no recorded value of '" + e.probe_text + "' at " +
                    short_event(ev));
  }
  if (!p->second.ok()) {
    throw EvalError("'" + e.probe_text + "' failed at " + short_event(ev) +
                    ": " + p->second.error);
  }
  const Value& v = *p->second.value;
  switch (e.cast) {
    case CastType::Int:
      if (v.is_int()) return TValue::integer(v.as_int());
      if (v.is_bool()) return TValue::integer(v.as_bool() ? 1 : 0);
      break;
    case CastType::Bool:
      if (v.is_int()) return TValue::boolean(v.as_int() != 0);
      if (v.is_bool()) return TValue::boolean(v.as_bool());
      break;
    case CastType::Str:
      return TValue::string(v.display());
  }
  throw EvalError("cannot cast " + std::string(Value::type_name(v.type())) +
                  " value of '" + e.probe_text + "'");
}

bool Evaluator::truth(const TExpr& e, Binding& b) const { return truthy(eval(e, b)); }

TValue Evaluator::eval(const TExpr& e, Binding& b) const {
  const auto& ops = e.operands;
  switch (e.kind) {
    case TExpr::Kind::True: return TValue::boolean(true);
    case TExpr::Kind::False: return TValue::boolean(false);
    case TExpr::Kind::IntLit: return TValue::integer(e.int_value);
    case TExpr::Kind::StrLit: return TValue::string(e.text);
    case TExpr::Kind::MetaVar: {
      auto it = b.find(e.text);
      if (it == b.end()) throw EvalError("metavariable '" + e.text + "' is not bound");
      return TValue::event_ref(it->second);
    }
    case TExpr::Kind::ValueAt:
      return probe_value(e, b);
    case TExpr::Kind::SourceText: {
      auto it = b.find(e.text);
      if (it == b.end()) throw EvalError("metavariable '" + e.text + "' is not bound");
      return TValue::string(trace_.at(it->second).name);
    }
    case TExpr::Kind::Card:
      return TValue::integer(
          static_cast<std::int64_t>(eval_aggregate(*e.aggregate, b).size()));
    case TExpr::Kind::List:
      return TValue::list(eval_aggregate(*e.aggregate, b));
    case TExpr::Kind::Quantified: {
      QuantifierResult r = eval_quantifier(e, b);
      if (r.witness) b = std::move(*r.witness);
      return TValue::boolean(r.value);
    }
    case TExpr::Kind::Satisfies: {
      const Aggregate& a = *e.aggregate;
      const auto events = select(resolve_scope(a.from, b), a.all, a.pattern, b);
      return TValue::boolean(match_path(events, *e.path, b));
    }
    case TExpr::Kind::Not:
      return TValue::boolean(!truth(*ops[0], b));
    case TExpr::Kind::And:
      return TValue::boolean(truth(*ops[0], b) && truth(*ops[1], b));
    case TExpr::Kind::Or:
      return TValue::boolean(truth(*ops[0], b) || truth(*ops[1], b));
    case TExpr::Kind::Neg: {
      const TValue v = eval(*ops[0], b);
      if (!numeric(v)) throw EvalError("unary - applied to a " + std::string(type_name(v.type)));
      return TValue::integer(-number(v));
    }
    case TExpr::Kind::Compare: {
      const TValue l = eval(*ops[0], b);
      const TValue r = eval(*ops[1], b);
      if (numeric(l) && numeric(r)) {
        return TValue::boolean(compare(e.compare_op, number(l), number(r)));
      }
      if (l.type == TValue::Type::Str && r.type == TValue::Type::Str) {
        return TValue::boolean(compare(e.compare_op, l.str_value, r.str_value));
      }
      if (l.type == TValue::Type::Event && r.type == TValue::Type::Event &&
          (e.compare_op == CompareOp::Eq || e.compare_op == CompareOp::Ne)) {
        return TValue::boolean(compare(e.compare_op, l.event, r.event));
      }
      throw EvalError(std::string("cannot compare ") + type_name(l.type) +
                      " with " + type_name(r.type));
    }
    case TExpr::Kind::Arith: {
      const TValue l = eval(*ops[0], b);
      const TValue r = eval(*ops[1], b);
      if (!numeric(l) || !numeric(r)) {
        throw EvalError(std::string("arithmetic on ") + type_name(l.type) +
                        " and " + type_name(r.type));
      }
      const std::int64_t x = number(l);
      const std::int64_t y = number(r);
      switch (e.arith_op) {
        case ArithOp::Add: return TValue::integer(x + y);
        case ArithOp::Sub: return TValue::integer(x - y);
        case ArithOp::Mul: return TValue::integer(x * y);
        case ArithOp::Div:
        case ArithOp::Mod:
          if (y == 0) throw EvalError("division by zero");
          return TValue::integer(e.arith_op == ArithOp::Div ? x / y : x % y);
      }
      break;
    }
  }
  throw EvalError("unsupported expression");
}

std::string render_event(const Event& e) {
  return std::string(kind_name(e.kind)) + " :> '" + e.name + "' source line " +
         std::to_string(e.source_line) + " within function " +
         e.enclosing_function + "\nTime= " + std::to_string(e.begin_time) +
         " .. " + std::to_string(e.end_time);
}

std::string render_value(const Trace& trace, const TValue& v) {
  switch (v.type) {
    case TValue::Type::Int: return std::to_string(v.int_value);
    case TValue::Type::Bool: return v.bool_value ? "TRUE" : "FALSE";
    case TValue::Type::Str: return v.str_value;
    case TValue::Type::Event: return render_event(trace.at(v.event));
    case TValue::Type::List: {
      std::string out;
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i) out.push_back(' ');
        out += render_value(trace, v.items[i]);
      }
      return out;
    }
  }
  return {};
}

namespace {

// Adjacent items are separated by one space unless whitespace or trailing
// punctuation already separates them.
void append_item(std::string& line, const std::string& piece) {
  if (!line.empty() && !piece.empty()) {
    const unsigned char last = static_cast<unsigned char>(line.back());
    const unsigned char first = static_cast<unsigned char>(piece.front());
    const bool glued = std::isspace(last) || std::isspace(first) ||
                       std::string_view(",.;:!?)").find(static_cast<char>(first)) !=
                           std::string_view::npos;
    if (!glued) line.push_back(' ');
  }
  line += piece;
}

}  // namespace

std::string Report::text() const {
  std::string out;
  for (const auto& m : messages) {
    out += m.text;
    out.push_back('\n');
  }
  return out;
}

Report run_rules(const Trace& trace, const RuleSet& rules) {
  Report report;
  for (std::size_t i = 0; i < rules.rules.size(); ++i) {
    const Rule& rule = rules.rules[i];
    const Evaluator ev(trace, rule.within);
    try {
      Binding env;
      const bool holds = ev.truth(*rule.assertion, env);
      const auto& clauses = holds ? rule.say : rule.onfail;
      std::vector<std::string> lines;
      for (const auto& clause : clauses) {
        std::string line;
        for (const auto& item : clause) {
          Binding local = env;
          append_item(line, render_value(trace, ev.eval(*item, local)));
        }
        lines.push_back(std::move(line));
      }
      if (!holds && !rule.onfail.empty()) ++report.onfail_fired;
      for (auto& l : lines) report.messages.push_back({i, std::move(l), false});
    } catch (const EvalError& err) {
      ++report.errors;
      report.messages.push_back(
          {i,
           "error: rule " + std::to_string(i + 1) + " (line " +
               std::to_string(rule.line) + "): " + err.what(),
           true});
    }
  }
  return report;
}

}  // namespace evtrace::forman
