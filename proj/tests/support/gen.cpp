#include "gen.hpp"

#include <functional>

#include "evtrace/minic/parser.hpp"

namespace evtest {

namespace {

int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& choose(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(v.size()) - 1))];
}

// ---- MiniC programs ----

struct FunctionSig {
  std::string name;
  int arity;
};

class ProgramGen {
 public:
  ProgramGen(Rng& rng, int budget) : rng_(rng), budget_(budget) {}

  std::string run() {
    std::string out;
    const int globals = pick(rng_, 0, 2);
    for (int i = 0; i < globals; ++i) {
      globals_.push_back("g" + std::to_string(i));
      out += "var g" + std::to_string(i) + " = " + std::to_string(pick(rng_, 0, 9)) + ";\n";
    }
    const int helpers = pick(rng_, 0, 2);
    // Helpers share half of the budget; main keeps the rest.
    const int main_budget = budget_ / 2;
    budget_ -= main_budget;
    for (int i = 0; i < helpers && budget_ > 6; ++i) {
      FunctionSig sig{"f" + std::to_string(i), pick(rng_, 0, 2)};
      out += function(sig, false);
      funcs_.push_back(sig);
    }
    budget_ = main_budget;
    out += function({"main", 0}, true);
    return out;
  }

 private:
  std::string function(const FunctionSig& sig, bool is_main) {
    vars_ = globals_;
    counters_ = 0;
    labels_ = 0;
    in_main_ = is_main;
    std::string params;
    for (int i = 0; i < sig.arity; ++i) {
      if (i) params += ", ";
      params += "p" + std::to_string(i);
      vars_.push_back("p" + std::to_string(i));
    }
    std::string body;
    if (is_main) {
      // Every helper runs at least once.
      for (const FunctionSig& f : funcs_) {
        std::string call = f.name + "(";
        for (int i = 0; i < f.arity; ++i) call += (i ? ", " : "") + atom();
        body += "  print(" + call + "));\n";
        budget_ -= 2 + f.arity;
      }
    }
    const int n = pick(rng_, 2, 6);
    for (int i = 0; i < n && budget_ > 0; ++i) body += stmt(1, 0);
    if (!is_main) {
      --budget_;
      body += "  return " + int_expr(2) + ";\n";
    }
    return "func " + sig.name + "(" + params + ") {\n" + body + "}\n\n";
  }

  std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  std::string stmt(int depth, int loop_depth, bool allow_decl = true) {
    --budget_;
    const std::string in = indent(depth);
    int choice = pick(rng_, 0, depth > 3 ? 3 : 9);
    if (!allow_decl && (choice == 3 || choice == 5)) choice = 2;
    switch (choice) {
      case 0:
      case 1:
        if (!assignable().empty()) {
          return in + choose(rng_, assignable()) + " = " + int_expr(2) + ";\n";
        }
        [[fallthrough]];
      case 2:
        return in + "print(" + int_expr(2) + ");\n";
      case 3: {
        const std::string name = "v" + std::to_string(locals_++);
        std::string s = in + "var " + name + " = " + int_expr(2) + ";\n";
        vars_.push_back(name);
        return s;
      }
      case 4: {
        std::string s = in + "if (" + bool_expr(2) + ") {\n";
        s += block(depth + 1, loop_depth);
        s += in + "}";
        if (chance(rng_, 0.5)) s += " else {\n" + block(depth + 1, loop_depth) + in + "}";
        return s + "\n";
      }
      case 5: {
        if (loop_depth >= 2) return in + "print(" + int_expr(1) + ");\n";
        const std::string c = "w" + std::to_string(locals_++);
        budget_ -= 6;
        std::string s = in + "var " + c + " = 0;\n";
        s += in + "while (" + c + " < " + std::to_string(pick(rng_, 0, 4)) + ") {\n";
        s += block(depth + 1, loop_depth + 1);
        if (chance(rng_, 0.3)) {
          s += indent(depth + 1) + "if (" + bool_expr(1) + ") {\n" + indent(depth + 2) +
               "break;\n" + indent(depth + 1) + "}\n";
        }
        s += indent(depth + 1) + c + " = " + c + " + 1;\n";
        s += in + "}\n";
        return s;
      }
      case 6:
        return in + "L" + std::to_string(labels_++) + ":\n" + stmt(depth, loop_depth, false);
      case 7:
        if (!in_main_ && chance(rng_, 0.5)) return in + "return " + int_expr(1) + ";\n";
        return in + "{\n" + block(depth + 1, loop_depth) + in + "}\n";
      case 8:
        return in + int_expr(2) + ";\n";
      default:
        return in + "print(" + str_expr(1) + ");\n";
    }
  }

  std::string block(int depth, int loop_depth) {
    const std::size_t saved = vars_.size();
    std::string s;
    const int n = pick(rng_, 1, 3);
    for (int i = 0; i < n && budget_ > 0; ++i) s += stmt(depth, loop_depth);
    vars_.resize(saved);
    return s;
  }

  std::vector<std::string> assignable() const { return vars_; }

  std::string int_expr(int depth) {
    --budget_;
    if (depth <= 0 || budget_ <= 0) return atom();
    switch (pick(rng_, 0, 8)) {
      case 0:
      case 1:
        return atom();
      case 2: {
        static const std::vector<std::string> ops{"+", "-", "*"};
        return "(" + int_expr(depth - 1) + " " + choose(rng_, ops) + " " + int_expr(depth - 1) + ")";
      }
      case 3:
        return "(" + bool_expr(depth - 1) + " ? " + int_expr(depth - 1) + " : " +
               int_expr(depth - 1) + ")";
      case 4:
        return "(" + int_expr(depth - 1) + ", " + int_expr(depth - 1) + ")";
      case 5:
        if (!funcs_.empty()) {
          const FunctionSig& f = choose(rng_, funcs_);
          std::string s = f.name + "(";
          for (int i = 0; i < f.arity; ++i) {
            if (i) s += ", ";
            s += int_expr(depth - 1);
          }
          return s + ")";
        }
        return "strlen(" + str_expr(depth - 1) + ")";
      case 6:
        if (!vars_.empty()) return "(" + choose(rng_, vars_) + " = " + int_expr(depth - 1) + ")";
        return atom();
      case 7:
        return "-" + atom();
      default:
        return "strlen(" + str_expr(depth - 1) + ")";
    }
  }

  std::string bool_expr(int depth) {
    --budget_;
    static const std::vector<std::string> cmps{"<", "<=", ">", ">=", "==", "!="};
    if (depth <= 0 || budget_ <= 0) {
      return chance(rng_, 0.2) ? (chance(rng_, 0.5) ? "true" : "false")
                               : atom() + " " + choose(rng_, cmps) + " " + atom();
    }
    switch (pick(rng_, 0, 4)) {
      case 0:
        return "(" + bool_expr(depth - 1) + " && " + bool_expr(depth - 1) + ")";
      case 1:
        return "(" + bool_expr(depth - 1) + " || " + bool_expr(depth - 1) + ")";
      case 2:
        return "!(" + bool_expr(depth - 1) + ")";
      default:
        return int_expr(depth - 1) + " " + choose(rng_, cmps) + " " + int_expr(depth - 1);
    }
  }

  std::string str_expr(int depth) {
    --budget_;
    static const std::vector<std::string> lits{"\"\"", "\"ab\"", "\"xyz\""};
    if (depth <= 0 || chance(rng_, 0.4)) return choose(rng_, lits);
    if (chance(rng_, 0.5)) return "to_str(" + int_expr(depth - 1) + ")";
    return "(" + str_expr(depth - 1) + " + " + str_expr(depth - 1) + ")";
  }

  std::string atom() {
    if (!vars_.empty() && chance(rng_, 0.5)) return choose(rng_, vars_);
    return std::to_string(pick(rng_, 0, 9));
  }

  Rng& rng_;
  int budget_;
  std::vector<std::string> globals_;
  std::vector<std::string> vars_;
  std::vector<FunctionSig> funcs_;
  int locals_ = 0;
  int counters_ = 0;
  int labels_ = 0;
  bool in_main_ = false;
};

// ---- traces ----

class TraceGen {
 public:
  TraceGen(Rng& rng, std::size_t max_events) : rng_(rng), max_(max_events) {}

  evtrace::Trace run() {
    const std::size_t target = static_cast<std::size_t>(pick(rng_, 1, static_cast<int>(max_)));
    build(std::nullopt, 0, target);
    return evtrace::Trace("random", std::move(events_));
  }

 private:
  void build(std::optional<evtrace::EventId> parent, int depth, std::size_t target) {
    using evtrace::EventKind;
    static const std::vector<std::string> names{"a", "b", "c"};
    static const std::vector<std::string> fns{"main", "f"};
    static const std::vector<EventKind> kinds{EventKind::ExStmt, EventKind::EvalExpr,
                                              EventKind::FuncCall, EventKind::Destination};
    evtrace::Event e;
    e.id = static_cast<evtrace::EventId>(events_.size());
    e.kind = parent ? choose(rng_, kinds) : EventKind::ExecuteProgram;
    e.name = parent ? choose(rng_, names) : "random";
    e.enclosing_function = parent ? choose(rng_, fns) : "random";
    e.source_line = pick(rng_, 1, 20);
    e.parent = parent;
    e.begin_time = clock_;
    e.probes["p"] = {evtrace::Value::integer(pick(rng_, 0, 4)), ""};
    e.probes["q"] = {evtrace::Value::boolean(chance(rng_, 0.5)), ""};
    e.probes["s"] = {evtrace::Value::string(choose(rng_, names)), ""};
    if (parent) e.unordered_group = group_;
    events_.push_back(e);
    const std::size_t self = events_.size() - 1;

    const bool leaf = parent && (depth > 6 || events_.size() >= target || chance(rng_, 0.35));
    if (leaf && chance(rng_, 0.5)) {
      events_[self].end_time = clock_++;  // atomic
      return;
    }
    ++clock_;
    if (!leaf) {
      const int children = pick(rng_, 1, 4);
      std::optional<evtrace::GroupTag> group;
      for (int i = 0; i < children && events_.size() < target; ++i) {
        // Siblings share a tag for a while, then switch to a fresh one or none.
        if (i == 0 || chance(rng_, 0.4)) {
          group = chance(rng_, 0.5) ? std::optional<evtrace::GroupTag>(next_group_++)
                                    : std::nullopt;
        }
        group_ = group;
        build(static_cast<evtrace::EventId>(self), depth + 1, target);
      }
    }
    events_[self].end_time = clock_++;
  }

  Rng& rng_;
  std::size_t max_;
  std::vector<evtrace::Event> events_;
  evtrace::StepTime clock_ = 0;
  std::optional<evtrace::GroupTag> group_;
  evtrace::GroupTag next_group_ = 1;
};

// ---- rules ----

class RuleGen {
 public:
  explicit RuleGen(Rng& rng) : rng_(rng) {}

  std::string rule() {
    std::string body = assertion(3, "");
    std::string text = body + " SAY('holds') ONFAIL SAY('fails');";
    if (chance(rng_, 0.25)) {
      text = "WITHIN " + std::string(chance(rng_, 0.5) ? "main" : "f") + " " + text + " END";
    }
    return text;
  }

 private:
  std::string fresh() { return "M" + std::to_string(next_var_++); }

  std::string kind() {
    static const std::vector<std::string> ks{"ex_stmt", "eval_expr", "func_call", "destination"};
    return choose(rng_, ks);
  }

  std::string pattern(const std::string& var, int depth) {
    std::string p = kind();
    if (chance(rng_, 0.4)) p += std::string(" IS '") + "abc"[pick(rng_, 0, 2)] + "'";
    if (!var.empty() && chance(rng_, 0.3)) p += " & " + condition(var, depth - 1);
    return p;
  }

  std::string scope(const std::string& outer) {
    return outer.empty() || chance(rng_, 0.3) ? "execute_program" : outer;
  }

  std::string aggregate(const std::string& outer, int depth, bool apply) {
    const bool all = chance(rng_, 0.5);
    const std::string m = fresh();
    std::string s = "[ ";
    if (all) s += "ALL ";
    s += m + ": " + pattern(m, depth) + " FROM " + scope(outer);
    if (apply) s += " APPLY VALUE(int)(AT " + m + " p)";
    return s + " ]";
  }

  std::string number() { return std::to_string(pick(rng_, 0, 6)); }

  std::string cmp() {
    static const std::vector<std::string> c{"==", "!=", "<", "<=", ">", ">="};
    return choose(rng_, c);
  }

  // Condition about event `var`.
  std::string condition(const std::string& var, int depth) {
    switch (pick(rng_, 0, depth > 0 ? 7 : 4)) {
      case 0:
        return "VALUE(int)(AT " + var + " p) " + cmp() + " " + number();
      case 1:
        return "VALUE(bool)(AT " + var + " q)";
      case 2:
        return "SOURCE_TEXT(" + var + ") == '" + std::string(1, "abc"[pick(rng_, 0, 2)]) + "'";
      case 3:
        return "VALUE(str)(AT " + var + " s) " + cmp() + " 'b'";
      case 4:
        return "VALUE(int)(AT " + var + " p) * 2 - VALUE(int)(AT " + var + " q) " +
               cmp() + " " + number();
      case 5:
        return "(" + condition(var, depth - 1) + (chance(rng_, 0.5) ? " AND " : " OR ") +
               condition(var, depth - 1) + ")";
      case 6:
        return quantified(var, depth - 1);
      default:
        return "CARD " + aggregate(var, depth - 1, false) + " " + cmp() + " " + number();
    }
  }

  std::string quantified(const std::string& outer, int depth) {
    const std::string m = fresh();
    std::string s = chance(rng_, 0.5) ? "EXISTS " : "FOREACH ";
    s += m + ": " + pattern(m, depth) + " FROM " + scope(outer);
    if (chance(rng_, 0.85)) s += " " + condition(m, depth);
    return "(" + s + ")";
  }

  std::string assertion(int depth, const std::string& outer) {
    switch (pick(rng_, 0, depth > 0 ? 6 : 3)) {
      case 0:
      case 1:
        return quantified(outer, depth);
      case 2:
        return "CARD " + aggregate(outer, depth, chance(rng_, 0.3)) + " " + cmp() + " " + number();
      case 3:
        return aggregate(outer, depth, false) + " SATISFIES " + random_path(rng_, 2);
      case 4:
        return "NOT " + assertion(depth - 1, outer);
      default:
        return "(" + assertion(depth - 1, outer) + (chance(rng_, 0.5) ? " AND " : " OR ") +
               assertion(depth - 1, outer) + ")";
    }
  }

  Rng& rng_;
  int next_var_ = 0;
};

}  // namespace

std::size_t count_nodes(const evtrace::minic::Expr& e) {
  std::size_t n = 1;
  for (const auto& o : e.operands) n += count_nodes(*o);
  return n;
}

std::size_t count_nodes(const evtrace::minic::Stmt& s) {
  std::size_t n = 1;
  if (s.expr) n += count_nodes(*s.expr);
  for (const auto* c : {s.then_branch.get(), s.else_branch.get(), s.body.get()}) {
    if (c) n += count_nodes(*c);
  }
  for (const auto& c : s.stmts) n += count_nodes(*c);
  return n;
}

std::size_t count_nodes(const evtrace::minic::Program& p) {
  std::size_t n = p.globals.size();
  for (const auto& f : p.functions) n += count_nodes(*f.body);
  return n;
}

std::string random_program(Rng& rng, int max_nodes) {
  // The budget is approximate; oversized results are drawn again.
  while (true) {
    std::string text = ProgramGen(rng, max_nodes * 3 / 4).run();
    if (count_nodes(evtrace::minic::parse_program(text)) <= static_cast<std::size_t>(max_nodes)) {
      return text;
    }
  }
}

evtrace::Trace random_trace(Rng& rng, std::size_t max_events) {
  return TraceGen(rng, max_events).run();
}

std::string random_rule(Rng& rng) { return RuleGen(rng).rule(); }

std::string random_path(Rng& rng, int depth) {
  static const std::vector<std::string> leaves{"func_call IS 'a'", "func_call IS 'b'",
                                               "ex_stmt", "func_call"};
  if (depth <= 0 || chance(rng, 0.3)) return choose(rng, leaves);
  switch (pick(rng, 0, 5)) {
    case 0:
      return "(" + random_path(rng, depth - 1) + " " + random_path(rng, depth - 1) + ")";
    case 1:
      return "(" + random_path(rng, depth - 1) + " | " + random_path(rng, depth - 1) + ")";
    case 2:
      return "(" + random_path(rng, depth - 1) + ")*";
    case 3:
      return "(" + random_path(rng, depth - 1) + ")+";
    case 4:
      return "(" + random_path(rng, depth - 1) + ")?";
    default:
      return random_path(rng, depth - 1) + " " + random_path(rng, depth - 1);
  }
}

}  // namespace evtest
