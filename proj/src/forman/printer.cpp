#include <sstream>

#include "evtrace/forman/ast.hpp"

namespace evtrace::forman {

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "''";
    } else if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out.push_back(c);
    }
  }
  return out + "'";
}

std::string_view spelling(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::string_view spelling(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::Mod: return "%";
  }
  return "?";
}

std::string_view spelling(CastType t) {
  switch (t) {
    case CastType::Int: return "int";
    case CastType::Bool: return "bool";
    case CastType::Str: return "str";
  }
  return "?";
}

void print(std::ostream& os, const TExpr& e);

void print_pattern(std::ostream& os, const Pattern& p) {
  if (!p.metavar.empty()) os << p.metavar << ": ";
  os << kind_name(p.kind);
  if (p.is_literal) os << " IS " << quote(*p.is_literal);
  if (p.context) {
    os << " & (";
    print(os, *p.context);
    os << ')';
  }
}

void print_from(std::ostream& os, const std::string& from) {
  os << " FROM " << (from.empty() ? "execute_program" : from);
}

void print_aggregate(std::ostream& os, const Aggregate& a) {
  os << '[';
  if (a.all) os << "ALL ";
  print_pattern(os, a.pattern);
  print_from(os, a.from);
  if (a.apply) {
    os << " APPLY ";
    print(os, *a.apply);
  }
  os << ']';
}

void print_path(std::ostream& os, const PathExpr& p) {
  switch (p.kind) {
    case PathExpr::Kind::Leaf:
      print_pattern(os, p.leaf);
      break;
    case PathExpr::Kind::Seq:
    case PathExpr::Kind::Alt:
      os << '(';
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (i) os << (p.kind == PathExpr::Kind::Alt ? " | " : " ");
        print_path(os, *p.items[i]);
      }
      os << ')';
      break;
    case PathExpr::Kind::Star:
    case PathExpr::Kind::Plus:
    case PathExpr::Kind::Opt:
      os << '(';
      print_path(os, *p.items[0]);
      os << ')'
         << (p.kind == PathExpr::Kind::Star ? '*'
                                            : p.kind == PathExpr::Kind::Plus ? '+' : '?');
      break;
  }
}

void print_binary(std::ostream& os, const TExpr& e, std::string_view op) {
  os << '(';
  print(os, *e.operands[0]);
  os << ' ' << op << ' ';
  print(os, *e.operands[1]);
  os << ')';
}

void print(std::ostream& os, const TExpr& e) {
  switch (e.kind) {
    case TExpr::Kind::True: os << "TRUE"; break;
    case TExpr::Kind::False: os << "FALSE"; break;
    case TExpr::Kind::IntLit: os << e.int_value; break;
    case TExpr::Kind::StrLit: os << quote(e.text); break;
    case TExpr::Kind::MetaVar: os << e.text; break;
    case TExpr::Kind::ValueAt:
      os << "VALUE(" << spelling(e.cast) << ")(AT " << e.text << ' '
         << e.probe_text << ')';
      break;
    case TExpr::Kind::SourceText: os << "SOURCE_TEXT(" << e.text << ')'; break;
    case TExpr::Kind::Card:
      os << "CARD ";
      print_aggregate(os, *e.aggregate);
      break;
    case TExpr::Kind::List: print_aggregate(os, *e.aggregate); break;
    case TExpr::Kind::Quantified:
      os << '(' << (e.quantifier == Quantifier::Exists ? "EXISTS " : "FOREACH ");
      print_pattern(os, e.pattern);
      print_from(os, e.from);
      if (!e.operands.empty()) {
        os << ' ';
        print(os, *e.operands[0]);
      }
      os << ')';
      break;
    case TExpr::Kind::Satisfies:
      os << '(';
      print_aggregate(os, *e.aggregate);
      os << " SATISFIES ";
      print_path(os, *e.path);
      os << ')';
      break;
    case TExpr::Kind::Not:
      os << "(NOT ";
      print(os, *e.operands[0]);
      os << ')';
      break;
    case TExpr::Kind::Neg:
      os << "(-";
      print(os, *e.operands[0]);
      os << ')';
      break;
    case TExpr::Kind::And: print_binary(os, e, "AND"); break;
    case TExpr::Kind::Or: print_binary(os, e, "OR"); break;
    case TExpr::Kind::Compare: print_binary(os, e, spelling(e.compare_op)); break;
    case TExpr::Kind::Arith: print_binary(os, e, spelling(e.arith_op)); break;
  }
}

void print_clause(std::ostream& os, const SayClause& c) {
  os << "SAY(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ' ';
    print(os, *c[i]);
  }
  os << ')';
}

}  // namespace

std::string to_source(const TExpr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::string to_source(const PathExpr& p) {
  std::ostringstream os;
  print_path(os, p);
  return os.str();
}

std::string to_source(const RuleSet& rules) {
  std::ostringstream os;
  for (const Rule& r : rules.rules) {
    if (r.within) os << "WITHIN " << *r.within << '\n';
    print(os, *r.assertion);
    for (const auto& c : r.say) {
      os << "\n  ";
      print_clause(os, c);
    }
    if (!r.onfail.empty()) {
      os << "\n  ONFAIL";
      for (const auto& c : r.onfail) {
        os << ' ';
        print_clause(os, c);
      }
    }
    os << ";\n";
    if (r.within) os << "END\n";
  }
  return os.str();
}

bool same_structure(const RuleSet& a, const RuleSet& b) {
  return to_source(a) == to_source(b);
}

}  // namespace evtrace::forman
