#include "oracle_minic.hpp"

#include <unordered_map>

namespace evtest {

using evtrace::EventKind;
using evtrace::minic::Expr;
using evtrace::minic::Program;
using evtrace::minic::Stmt;

namespace {

struct NodeInfo {
  bool is_stmt = false;
  const Expr* expr = nullptr;
  const Stmt* stmt = nullptr;
};

void index_expr(const Expr& e, std::unordered_map<const void*, NodeInfo>& out) {
  out[&e] = {false, &e, nullptr};
  for (const auto& o : e.operands) index_expr(*o, out);
}

void index_stmt(const Stmt& s, std::unordered_map<const void*, NodeInfo>& out) {
  out[&s] = {true, nullptr, &s};
  if (s.expr) index_expr(*s.expr, out);
  for (const Stmt* c : {s.then_branch.get(), s.else_branch.get(), s.body.get()}) {
    if (c) index_stmt(*c, out);
  }
  for (const auto& c : s.stmts) index_stmt(*c, out);
}

// Tick weights per node: events begun on entry, records written on entry
// and on exit.
class Ledger : public evtrace::minic::PlainObserver {
 public:
  explicit Ledger(const Program& p) {
    for (const auto& f : p.functions) index_stmt(*f.body, nodes_);
    counts.events = 1;
    counts.by_kind[static_cast<int>(EventKind::ExecuteProgram)] = 1;
    counts.ticks = 1;  // root begin
  }

  void enter(const void* node) override {
    const NodeInfo& n = nodes_.at(node);
    if (n.is_stmt) {
      if (n.stmt->kind == Stmt::Kind::Labeled) {
        if (n.stmt->label_text == watched_label) label_times.push_back(counts.ticks);
        add(EventKind::ExStmt);
        counts.ticks += 1;
      } else {
        add(EventKind::ExStmt);
        counts.ticks += 1;
      }
      return;
    }
    switch (n.expr->kind) {
      case Expr::Kind::Var:
        return;
      case Expr::Kind::Call:
        ++counts.calls_by_callee[n.expr->name];
        add(EventKind::EvalExpr);
        add(EventKind::FuncCall);
        counts.ticks += 2;
        return;
      default:
        add(EventKind::EvalExpr);
        counts.ticks += 1;
    }
  }

  void leave(const void* node) override {
    const NodeInfo& n = nodes_.at(node);
    if (n.is_stmt) {
      if (n.stmt->kind != Stmt::Kind::Labeled) counts.ticks += 1;
      return;
    }
    switch (n.expr->kind) {
      case Expr::Kind::Var:
        return;
      case Expr::Kind::Call:
        counts.ticks += 2;
        return;
      case Expr::Kind::Assign:
        add(EventKind::Destination);
        counts.ticks += 2;  // atomic destination, then the assignment's end
        return;
      default:
        counts.ticks += 1;
    }
  }

  OracleCounts counts;
  std::string watched_label;
  std::vector<std::uint64_t> label_times;

 private:
  void add(EventKind k) {
    ++counts.events;
    ++counts.by_kind[static_cast<int>(k)];
  }

  std::unordered_map<const void*, NodeInfo> nodes_;
};

}  // namespace

OracleCounts oracle_counts(const Program& program, const std::string& input) {
  Ledger ledger(program);
  const auto r = evtrace::minic::run_plain(program, input, &ledger);
  ledger.counts.ticks += 1;  // root end
  ledger.counts.output = r.output;
  ledger.counts.failed = r.failure.has_value();
  return ledger.counts;
}

std::vector<std::uint64_t> oracle_label_times(const Program& program,
                                              const std::string& input,
                                              const std::string& label) {
  Ledger ledger(program);
  ledger.watched_label = label;
  evtrace::minic::run_plain(program, input, &ledger);
  return ledger.label_times;
}

}  // namespace evtest
