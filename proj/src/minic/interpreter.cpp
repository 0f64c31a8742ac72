#include "evtrace/minic/interpreter.hpp"

#include <algorithm>
#include <set>

#include "evtrace/error.hpp"
#include "operations.hpp"
#include "parser_support.hpp"

namespace evtrace::minic {

namespace {

constexpr int kMaxCallDepth = 1000;

enum class Flow { Normal, Break, Return };

struct Frame {
  const FunctionDef* function = nullptr;
  std::vector<std::unordered_map<std::string, Value>> scopes;
};

class Machine {
 public:
  Machine(const Program& program, const ExecOptions& options)
      : program_(program), options_(options), io_(options.input) {
    for (const auto& g : program.globals) globals_[g.name] = g.initial;
  }

  RunResult run() {
    const FunctionDef* main = program_.find_function("main");
    frames_.push_back({main, {{}}});
    begin(EventKind::ExecuteProgram, program_.name, 1, std::nullopt,
          program_.name);
    try {
      body(*main);
      end();
    } catch (const RuntimeError& err) {
      fail(err.what(), err.line());
    }
    return finish();
  }

 private:
  struct Open {
    std::optional<EventId> id;
    EventKind kind;
  };

  // --- event records -----------------------------------------------------

  const std::string& current_function() const {
    return frames_.back().function->name;
  }

  void count_generated(EventKind kind) {
    ++generated_;
    ++result_.generated_by_kind[static_cast<int>(kind)];
    if (generated_ > options_.max_events) {
      throw RuntimeError("event limit of " + std::to_string(options_.max_events) +
                             " exceeded",
                         0);
    }
  }

  // Returns the id of the recorded event, if recorded.
  std::optional<EventId> record(EventKind kind, const std::string& name,
                                int line, std::optional<GroupTag> group,
                                const std::string& function, StepTime t) {
    const bool admitted = kind == EventKind::ExecuteProgram ||
                          admits(options_.filter, kind, name, function);
    if (!admitted) {
      ++result_.events_suppressed;
      return std::nullopt;
    }
    ++result_.events_emitted;
    ++result_.emitted_by_kind[static_cast<int>(kind)];
    Event e;
    e.id = static_cast<EventId>(events_.size());
    e.kind = kind;
    e.name = name;
    e.source_line = line;
    e.enclosing_function = function;
    e.begin_time = t;
    e.end_time = t;
    if (!admitted_.empty()) e.parent = admitted_.back();
    e.unordered_group = group;
    events_.push_back(std::move(e));
    return events_.back().id;
  }

  void begin(EventKind kind, const std::string& name, int line,
             std::optional<GroupTag> group = std::nullopt) {
    begin(kind, name, line, group, current_function());
  }

  void begin(EventKind kind, const std::string& name, int line,
             std::optional<GroupTag> group, const std::string& function) {
    if (probing_) return;
    count_generated(kind);
    const StepTime t = clock_++;
    auto id = record(kind, name, line, group, function, t);
    open_.push_back({id, kind});
    if (id) admitted_.push_back(*id);
  }

  void end() {
    if (probing_) return;
    const StepTime t = clock_++;
    const Open o = open_.back();
    open_.pop_back();
    if (!o.id) return;
    admitted_.pop_back();
    events_[*o.id].end_time = t;
    probe(*o.id);
  }

  void atomic(EventKind kind, const std::string& name, int line) {
    if (probing_) return;
    count_generated(kind);
    const StepTime t = clock_++;
    auto id = record(kind, name, line, std::nullopt, current_function(), t);
    if (id) probe(*id);
  }

  GroupTag new_group() { return next_group_++; }

  // --- probes ------------------------------------------------------------

  void probe(EventId id) {
    if (options_.probes.empty()) return;
    Event& e = events_[id];
    std::string normalized;
    bool have_normalized = false;
    for (const ProbeRequest& req : options_.probes) {
      if (req.target.kind != e.kind) continue;
      if (req.target.name && !have_normalized) {
        normalized = normalize_ws(e.name);
        have_normalized = true;
      }
      if (!req.target.matches(e.kind, req.target.name ? normalized : e.name,
                              e.enclosing_function)) {
        continue;
      }
      if (e.probes.count(req.expr_text)) continue;
      ProbeValue pv;
      probing_ = true;
      try {
        pv.value = eval(*req.expr);
      } catch (const RuntimeError& err) {
        pv.error = err.what();
      }
      probing_ = false;
      e.probes.emplace(req.expr_text, std::move(pv));
    }
  }

  // --- failure -----------------------------------------------------------

  void fail(const std::string& message, int line) {
    probing_ = false;
    RunFailure f{message, line, std::nullopt};
    if (!admitted_.empty()) f.event = admitted_.back();
    result_.failure = std::move(f);
    while (!open_.empty()) {
      const StepTime t = clock_++;
      const Open o = open_.back();
      open_.pop_back();
      if (o.id) events_[*o.id].end_time = t;
    }
    admitted_.clear();
  }

  RunResult finish() {
    result_.program_output = std::move(io_.output());
    result_.steps = clock_;
    result_.trace = Trace(program_.name, std::move(events_));
    return std::move(result_);
  }

  // --- variables ---------------------------------------------------------

  Value* find_var(const std::string& name) {
    auto& scopes = frames_.back().scopes;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    auto g = globals_.find(name);
    return g == globals_.end() ? nullptr : &g->second;
  }

  Value& var(const Expr& e) {
    Value* v = find_var(e.name);
    if (!v) {
      throw RuntimeError("variable '" + e.name + "' is not in scope", e.line);
    }
    return *v;
  }

  // --- expressions -------------------------------------------------------

  Value eval(const Expr& e, std::optional<GroupTag> group = std::nullopt) {
    if (e.kind == Expr::Kind::Var) return var(e);
    begin(EventKind::EvalExpr, e.text, e.line, group);
    Value v = eval_inner(e);
    end();
    return v;
  }

  Value eval_inner(const Expr& e) {
    const auto& ops = e.operands;
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return Value::integer(e.int_value);
      case Expr::Kind::StrLit:
        return Value::string(e.name);
      case Expr::Kind::BoolLit:
        return Value::boolean(e.bool_value);
      case Expr::Kind::Var:
        return var(e);
      case Expr::Kind::Assign: {
        Value v = eval(*ops[0]);
        var(e) = v;
        atomic(EventKind::Destination, e.name, e.line);
        return v;
      }
      case Expr::Kind::Binary: {
        if (e.binary_op == BinaryOp::And || e.binary_op == BinaryOp::Or) {
          const bool lhs = ops::condition(eval(*ops[0]), e.line);
          if (lhs == (e.binary_op == BinaryOp::Or)) return Value::boolean(lhs);
          return Value::boolean(ops::condition(eval(*ops[1]), e.line));
        }
        const GroupTag g = new_group();
        Value lhs = eval(*ops[0], g);
        Value rhs = eval(*ops[1], g);
        return ops::binary(e.binary_op, lhs, rhs, e.line);
      }
      case Expr::Kind::Unary:
        return ops::unary(e.unary_op, eval(*ops[0]), e.line);
      case Expr::Kind::Call:
        return call(e);
      case Expr::Kind::Comma:
        eval(*ops[0]);
        return eval(*ops[1]);
      case Expr::Kind::Ternary:
        return ops::condition(eval(*ops[0]), e.line) ? eval(*ops[1])
                                                     : eval(*ops[2]);
    }
    return Value::unit();
  }

  Value call(const Expr& e) {
    begin(EventKind::FuncCall, e.name, e.line);
    const GroupTag g = new_group();
    std::vector<Value> args;
    args.reserve(e.operands.size());
    for (const auto& a : e.operands) args.push_back(eval(*a, g));
    Value result;
    if (const FunctionDef* f = program_.find_function(e.name)) {
      if (frames_.size() >= kMaxCallDepth) {
        throw RuntimeError("call depth limit exceeded", e.line);
      }
      Frame frame{f, {{}}};
      for (std::size_t i = 0; i < args.size(); ++i) {
        frame.scopes.front()[f->params[i]] = std::move(args[i]);
      }
      frames_.push_back(std::move(frame));
      result = body(*f);
      frames_.pop_back();
    } else {
      result = ops::call_builtin(e.name, args, io_, e.line);
    }
    end();
    return result;
  }

  Value body(const FunctionDef& f) {
    return_value_ = Value::unit();
    for (const auto& s : f.body->stmts) {
      if (exec(*s) == Flow::Return) break;
    }
    Value v = std::move(return_value_);
    return_value_ = Value::unit();
    return v;
  }

  // --- statements --------------------------------------------------------

  Flow exec(const Stmt& s) {
    if (s.kind == Stmt::Kind::Labeled) {
      atomic(EventKind::ExStmt, s.label_text, s.line);
      return exec(*s.body);
    }
    begin(EventKind::ExStmt, s.text, s.line);
    const Flow flow = exec_inner(s);
    end();
    return flow;
  }

  Flow exec_inner(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Expr:
        eval(*s.expr);
        return Flow::Normal;
      case Stmt::Kind::VarDecl: {
        Value v = s.expr ? eval(*s.expr) : Value::integer(0);
        frames_.back().scopes.back()[s.name] = std::move(v);
        return Flow::Normal;
      }
      case Stmt::Kind::If:
        if (ops::condition(eval(*s.expr), s.line)) return exec(*s.then_branch);
        if (s.else_branch) return exec(*s.else_branch);
        return Flow::Normal;
      case Stmt::Kind::While:
        while (ops::condition(eval(*s.expr), s.line)) {
          const Flow f = exec(*s.body);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      case Stmt::Kind::Return:
        return_value_ = s.expr ? eval(*s.expr) : Value::unit();
        return Flow::Return;
      case Stmt::Kind::Break:
        return Flow::Break;
      case Stmt::Kind::Block: {
        frames_.back().scopes.emplace_back();
        Flow f = Flow::Normal;
        for (const auto& c : s.stmts) {
          f = exec(*c);
          if (f != Flow::Normal) break;
        }
        frames_.back().scopes.pop_back();
        return f;
      }
      case Stmt::Kind::Labeled:
        break;
    }
    return Flow::Normal;
  }

  const Program& program_;
  const ExecOptions& options_;
  ops::ProgramIo io_;
  std::unordered_map<std::string, Value> globals_;
  std::vector<Frame> frames_;
  Value return_value_;

  std::vector<Event> events_;
  std::vector<Open> open_;
  std::vector<EventId> admitted_;
  StepTime clock_ = 0;
  GroupTag next_group_ = 1;
  std::uint64_t generated_ = 0;
  bool probing_ = false;
  RunResult result_;
};

}  // namespace

void check_probes(const Program& program,
                  const std::vector<ProbeRequest>& probes) {
  for (const ProbeRequest& req : probes) {
    std::set<std::string> visible;
    for (const auto& g : program.globals) visible.insert(g.name);
    for (const auto& f : program.functions) {
      if (!req.target.enclosing_function ||
          *req.target.enclosing_function == f.name) {
        visible.insert(f.locals.begin(), f.locals.end());
      }
    }
    detail::check_expression_names(program, *req.expr, visible,
                                   "probe '" + req.expr_text + "'");
  }
}

RunResult execute(const Program& program, const ExecOptions& options) {
  check_probes(program, options.probes);
  return Machine(program, options).run();
}

}  // namespace evtrace::minic
