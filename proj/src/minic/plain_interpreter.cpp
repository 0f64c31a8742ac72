#include <unordered_map>

#include "evtrace/error.hpp"
#include "evtrace/minic/interpreter.hpp"
#include "operations.hpp"

namespace evtrace::minic {

namespace {

constexpr std::size_t kMaxCallDepth = 1000;

enum class Flow { Normal, Break, Return };

// Straight evaluation, no trace. Kept deliberately separate from the
// instrumented machine so the two can be compared.
class PlainMachine {
 public:
  PlainMachine(const Program& p, std::string_view input, PlainObserver* observer)
      : program_(p), io_(input), observer_(observer) {
    for (const auto& g : p.globals) globals_[g.name] = g.initial;
  }

  PlainResult run() {
    PlainResult out;
    try {
      invoke(*program_.find_function("main"), {}, 0);
    } catch (const RuntimeError& err) {
      out.failure = RunFailure{err.what(), err.line(), std::nullopt};
    }
    out.output = std::move(io_.output());
    return out;
  }

 private:
  using Scope = std::unordered_map<std::string, Value>;

  void enter(const void* node) {
    if (observer_) observer_->enter(node);
  }

  void leave(const void* node) {
    if (observer_) observer_->leave(node);
  }

  Value& var(const std::string& name, int line) {
    auto& scopes = frames_.back();
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    auto g = globals_.find(name);
    if (g == globals_.end()) {
      throw RuntimeError("variable '" + name + "' is not in scope", line);
    }
    return g->second;
  }

  Value invoke(const FunctionDef& f, std::vector<Value> args, int line) {
    if (frames_.size() >= kMaxCallDepth) {
      throw RuntimeError("call depth limit exceeded", line);
    }
    Scope params;
    for (std::size_t i = 0; i < args.size(); ++i) params[f.params[i]] = args[i];
    frames_.push_back({std::move(params)});
    ret_ = Value::unit();
    for (const auto& s : f.body->stmts) {
      if (exec(*s) == Flow::Return) break;
    }
    frames_.pop_back();
    Value v = ret_;
    ret_ = Value::unit();
    return v;
  }

  Value eval(const Expr& e) {
    enter(&e);
    Value v = eval_node(e);
    leave(&e);
    return v;
  }

  Value eval_node(const Expr& e) {
    const auto& o = e.operands;
    switch (e.kind) {
      case Expr::Kind::IntLit: return Value::integer(e.int_value);
      case Expr::Kind::StrLit: return Value::string(e.name);
      case Expr::Kind::BoolLit: return Value::boolean(e.bool_value);
      case Expr::Kind::Var: return var(e.name, e.line);
      case Expr::Kind::Assign: {
        Value v = eval(*o[0]);
        var(e.name, e.line) = v;
        return v;
      }
      case Expr::Kind::Binary:
        if (e.binary_op == BinaryOp::And) {
          return Value::boolean(ops::condition(eval(*o[0]), e.line) &&
                                ops::condition(eval(*o[1]), e.line));
        }
        if (e.binary_op == BinaryOp::Or) {
          return Value::boolean(ops::condition(eval(*o[0]), e.line) ||
                                ops::condition(eval(*o[1]), e.line));
        }
        {
          Value l = eval(*o[0]);
          Value r = eval(*o[1]);
          return ops::binary(e.binary_op, l, r, e.line);
        }
      case Expr::Kind::Unary:
        return ops::unary(e.unary_op, eval(*o[0]), e.line);
      case Expr::Kind::Call: {
        std::vector<Value> args;
        for (const auto& a : o) args.push_back(eval(*a));
        if (const FunctionDef* f = program_.find_function(e.name)) {
          return invoke(*f, std::move(args), e.line);
        }
        return ops::call_builtin(e.name, args, io_, e.line);
      }
      case Expr::Kind::Comma:
        eval(*o[0]);
        return eval(*o[1]);
      case Expr::Kind::Ternary:
        return ops::condition(eval(*o[0]), e.line) ? eval(*o[1]) : eval(*o[2]);
    }
    return Value::unit();
  }

  Flow exec(const Stmt& s) {
    enter(&s);
    const Flow f = exec_node(s);
    leave(&s);
    return f;
  }

  Flow exec_node(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Expr:
        eval(*s.expr);
        return Flow::Normal;
      case Stmt::Kind::VarDecl:
        frames_.back().back()[s.name] = s.expr ? eval(*s.expr) : Value::integer(0);
        return Flow::Normal;
      case Stmt::Kind::If:
        if (ops::condition(eval(*s.expr), s.line)) return exec(*s.then_branch);
        return s.else_branch ? exec(*s.else_branch) : Flow::Normal;
      case Stmt::Kind::While:
        while (ops::condition(eval(*s.expr), s.line)) {
          const Flow f = exec(*s.body);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      case Stmt::Kind::Return:
        ret_ = s.expr ? eval(*s.expr) : Value::unit();
        return Flow::Return;
      case Stmt::Kind::Break:
        return Flow::Break;
      case Stmt::Kind::Labeled:
        return exec(*s.body);
      case Stmt::Kind::Block: {
        frames_.back().emplace_back();
        Flow f = Flow::Normal;
        for (const auto& c : s.stmts) {
          f = exec(*c);
          if (f != Flow::Normal) break;
        }
        frames_.back().pop_back();
        return f;
      }
    }
    return Flow::Normal;
  }

  const Program& program_;
  ops::ProgramIo io_;
  PlainObserver* observer_;
  std::unordered_map<std::string, Value> globals_;
  std::vector<std::vector<Scope>> frames_;
  Value ret_;
};

}  // namespace

PlainResult run_plain(const Program& program, std::string_view input,
                      PlainObserver* observer) {
  return PlainMachine(program, input, observer).run();
}

PlainResult run_plain(const Program& program, std::string_view input,
                      VisitCounts* visits) {
  struct Counter : PlainObserver {
    VisitCounts* counts;
    void enter(const void* node) override { ++(*counts)[node]; }
  } counter;
  counter.counts = visits;
  return run_plain(program, input, visits ? &counter : nullptr);
}

}  // namespace evtrace::minic
