#include "evtrace/minic/ast.hpp"

#include <cctype>
#include <sstream>

namespace evtrace::minic {

std::string_view op_spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

std::string_view op_spelling(UnaryOp op) {
  return op == UnaryOp::Neg ? "-" : "!";
}

const FunctionDef* Program::find_function(std::string_view fn) const {
  for (const auto& f : functions) {
    if (f.name == fn) return &f;
  }
  return nullptr;
}

const GlobalDecl* Program::find_global(std::string_view var) const {
  for (const auto& g : globals) {
    if (g.name == var) return &g;
  }
  return nullptr;
}

SourceRef node_source(const Expr& e) {
  if (e.kind == Expr::Kind::Call) return {e.name, e.line};
  return {e.text, e.line};
}

SourceRef node_source(const Stmt& s) {
  if (s.kind == Stmt::Kind::Labeled) return {s.label_text, s.line};
  return {s.text, s.line};
}

std::string normalize_ws(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

namespace {

// Binding strength, loosest first.
enum Prec { kComma, kAssign, kTernary, kOr, kAnd, kEquality, kRelational,
            kAdditive, kMultiplicative, kUnary, kPrimary };

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Eq: case BinaryOp::Ne: return kEquality;
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge:
      return kRelational;
    case BinaryOp::Add: case BinaryOp::Sub: return kAdditive;
    default: return kMultiplicative;
  }
}

int prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Comma: return kComma;
    case Expr::Kind::Assign: return kAssign;
    case Expr::Kind::Ternary: return kTernary;
    case Expr::Kind::Binary: return binary_prec(e.binary_op);
    case Expr::Kind::Unary: return kUnary;
    default: return kPrimary;
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

void print(std::ostream& os, const Expr& e, int min_prec);

void print_operand(std::ostream& os, const Expr& e, int min_prec) {
  if (prec(e) < min_prec) {
    os << '(';
    print(os, e, kComma);
    os << ')';
  } else {
    print(os, e, min_prec);
  }
}

void print(std::ostream& os, const Expr& e, int) {
  const auto& ops = e.operands;
  switch (e.kind) {
    case Expr::Kind::IntLit:
      os << e.int_value;
      break;
    case Expr::Kind::StrLit:
      os << quote(e.name);
      break;
    case Expr::Kind::BoolLit:
      os << (e.bool_value ? "true" : "false");
      break;
    case Expr::Kind::Var:
      os << e.name;
      break;
    case Expr::Kind::Assign:
      os << e.name << " = ";
      print_operand(os, *ops[0], kAssign);
      break;
    case Expr::Kind::Binary: {
      const int p = binary_prec(e.binary_op);
      print_operand(os, *ops[0], p);
      os << ' ' << op_spelling(e.binary_op) << ' ';
      print_operand(os, *ops[1], p + 1);
      break;
    }
    case Expr::Kind::Unary:
      os << op_spelling(e.unary_op);
      // Keep "- -x" from reading as a different token sequence.
      if (ops[0]->kind == Expr::Kind::Unary) os << ' ';
      print_operand(os, *ops[0], kUnary);
      break;
    case Expr::Kind::Call:
      os << e.name << '(';
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i) os << ", ";
        print_operand(os, *ops[i], kAssign);
      }
      os << ')';
      break;
    case Expr::Kind::Comma:
      print_operand(os, *ops[0], kComma);
      os << ", ";
      print_operand(os, *ops[1], kAssign);
      break;
    case Expr::Kind::Ternary:
      print_operand(os, *ops[0], kOr);
      os << " ? ";
      print_operand(os, *ops[1], kAssign);
      os << " : ";
      print_operand(os, *ops[2], kAssign);
      break;
  }
}

void indent(std::ostream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void print_stmt(std::ostream& os, const Stmt& s, int depth);

void print_block_body(std::ostream& os, const Stmt& s, int depth) {
  os << "{\n";
  for (const auto& c : s.stmts) {
    indent(os, depth + 1);
    print_stmt(os, *c, depth + 1);
    os << '\n';
  }
  indent(os, depth);
  os << '}';
}

void print_stmt(std::ostream& os, const Stmt& s, int depth) {
  switch (s.kind) {
    case Stmt::Kind::Expr:
      print(os, *s.expr, kComma);
      os << ';';
      break;
    case Stmt::Kind::If:
      os << "if (";
      print(os, *s.expr, kComma);
      os << ") ";
      print_stmt(os, *s.then_branch, depth);
      if (s.else_branch) {
        os << " else ";
        print_stmt(os, *s.else_branch, depth);
      }
      break;
    case Stmt::Kind::While:
      os << "while (";
      print(os, *s.expr, kComma);
      os << ") ";
      print_stmt(os, *s.body, depth);
      break;
    case Stmt::Kind::Return:
      os << "return";
      if (s.expr) {
        os << ' ';
        print(os, *s.expr, kComma);
      }
      os << ';';
      break;
    case Stmt::Kind::Break:
      os << "break;";
      break;
    case Stmt::Kind::Labeled:
      os << s.name << ": ";
      print_stmt(os, *s.body, depth);
      break;
    case Stmt::Kind::Block:
      print_block_body(os, s, depth);
      break;
    case Stmt::Kind::VarDecl:
      os << "var " << s.name;
      if (s.expr) {
        os << " = ";
        print_operand(os, *s.expr, kAssign);
      }
      os << ';';
      break;
  }
}

}  // namespace

std::string to_source(const Expr& e) {
  std::ostringstream os;
  print(os, e, kComma);
  return os.str();
}

std::string to_source(const Program& p) {
  std::ostringstream os;
  for (const auto& g : p.globals) {
    os << "var " << g.name;
    if (g.initial.is_str()) {
      os << " = " << quote(g.initial.as_str());
    } else if (!g.initial.is_unit()) {
      os << " = " << g.initial.display();
    }
    os << ";\n";
  }
  for (const auto& f : p.functions) {
    os << "\nfunc " << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << f.params[i];
    }
    os << ") ";
    print_block_body(os, *f.body, 0);
    os << '\n';
  }
  return os.str();
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit:
      if (a.int_value != b.int_value) return false;
      break;
    case Expr::Kind::BoolLit:
      if (a.bool_value != b.bool_value) return false;
      break;
    case Expr::Kind::StrLit:
    case Expr::Kind::Var:
    case Expr::Kind::Assign:
    case Expr::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case Expr::Kind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (!same_structure(*a.operands[i], *b.operands[i])) return false;
  }
  return true;
}

namespace {

template <class T>
bool same_opt(const std::unique_ptr<T>& a, const std::unique_ptr<T>& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

}  // namespace

bool same_structure(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name ||
      a.stmts.size() != b.stmts.size()) {
    return false;
  }
  if (!same_opt(a.expr, b.expr) || !same_opt(a.then_branch, b.then_branch) ||
      !same_opt(a.else_branch, b.else_branch) || !same_opt(a.body, b.body)) {
    return false;
  }
  for (std::size_t i = 0; i < a.stmts.size(); ++i) {
    if (!same_structure(*a.stmts[i], *b.stmts[i])) return false;
  }
  return true;
}

bool same_structure(const Program& a, const Program& b) {
  if (a.globals.size() != b.globals.size() ||
      a.functions.size() != b.functions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    if (a.globals[i].name != b.globals[i].name ||
        !(a.globals[i].initial == b.globals[i].initial)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || fa.params != fb.params ||
        !same_structure(*fa.body, *fb.body)) {
      return false;
    }
  }
  return true;
}

}  // namespace evtrace::minic
