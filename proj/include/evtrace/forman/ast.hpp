#pragma once

// Abstract syntax of the rule language.
//
//   [WITHIN f] assertion SAY(items) ... [ONFAIL SAY(items) ...] ;

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evtrace/minic/ast.hpp"
#include "evtrace/trace.hpp"

namespace evtrace::forman {

enum class CastType { Int, Bool, Str };
enum class Quantifier { Exists, Foreach };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div, Mod };

struct TExpr;
using TExprPtr = std::unique_ptr<TExpr>;

/// `[M:] kind [IS literal] [& context]`
struct Pattern {
  std::string metavar;  // empty when the pattern binds nothing
  EventKind kind = EventKind::ExStmt;
  std::optional<std::string> is_literal;
  TExprPtr context;
};

/// `[ [ALL] [M:] pattern FROM scope [APPLY expr] ]`
struct Aggregate {
  bool all = false;
  Pattern pattern;
  std::string from;  // empty: execute_program
  TExprPtr apply;
};

/// Regular expression over patterns.
struct PathExpr {
  enum class Kind { Leaf, Seq, Alt, Star, Plus, Opt };
  Kind kind = Kind::Leaf;
  Pattern leaf;  // Leaf only; never binds a metavar
  std::vector<std::unique_ptr<PathExpr>> items;
};
using PathExprPtr = std::unique_ptr<PathExpr>;

struct TExpr {
  enum class Kind {
    True,
    False,
    IntLit,
    StrLit,
    MetaVar,
    ValueAt,     // VALUE(cast)(AT metavar expr)
    SourceText,  // SOURCE_TEXT(metavar)
    Card,        // CARD aggregate
    List,        // aggregate
    Quantified,  // EXISTS/FOREACH metavar: pattern FROM scope [body]
    Satisfies,   // aggregate SATISFIES path
    Not,
    And,
    Or,
    Compare,
    Arith,
    Neg,
  };

  Kind kind = Kind::True;
  int line = 1;
  int column = 1;

  std::int64_t int_value = 0;
  std::string text;  // StrLit contents, or the referenced metavar

  CastType cast = CastType::Int;
  std::shared_ptr<const minic::Expr> probe;
  std::string probe_text;  // canonical MiniC text, the probe key

  Quantifier quantifier = Quantifier::Exists;
  Pattern pattern;
  std::string from;  // empty: execute_program

  std::unique_ptr<Aggregate> aggregate;
  PathExprPtr path;

  CompareOp compare_op = CompareOp::Eq;
  ArithOp arith_op = ArithOp::Add;
  // Not/Neg: [x]; And/Or/Compare/Arith: [lhs, rhs]; Quantified: [body] or [].
  std::vector<TExprPtr> operands;
};

using SayClause = std::vector<TExprPtr>;

struct Rule {
  std::optional<std::string> within;
  TExprPtr assertion;
  std::vector<SayClause> say;
  std::vector<SayClause> onfail;
  int line = 1;
};

struct RuleSet {
  std::vector<Rule> rules;
};

/// Canonical text; parsing it yields a structurally equal rule set.
std::string to_source(const RuleSet& rules);
std::string to_source(const TExpr& e);
std::string to_source(const PathExpr& p);

bool same_structure(const RuleSet& a, const RuleSet& b);

}  // namespace evtrace::forman
