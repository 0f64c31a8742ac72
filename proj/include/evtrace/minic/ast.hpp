#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "evtrace/value.hpp"

namespace evtrace::minic {

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp { Neg, Not };

std::string_view op_spelling(BinaryOp op);
std::string_view op_spelling(UnaryOp op);

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

struct Expr {
  enum class Kind {
    IntLit,
    StrLit,
    BoolLit,
    Var,
    Assign,
    Binary,
    Unary,
    Call,
    Comma,
    Ternary,
  };

  Kind kind = Kind::IntLit;
  std::string text;  // exact source span
  int line = 1;
  int column = 1;

  std::int64_t int_value = 0;
  bool bool_value = false;
  // Variable name (Var, Assign target), callee (Call) or the decoded
  // contents of a string literal (StrLit).
  std::string name;
  BinaryOp binary_op = BinaryOp::Add;
  UnaryOp unary_op = UnaryOp::Neg;
  // Assign: [value]; Binary and Comma: [lhs, rhs]; Unary: [operand];
  // Call: arguments; Ternary: [cond, then, else].
  std::vector<ExprPtr> operands;
};

struct Stmt {
  enum class Kind { Expr, If, While, Return, Break, Labeled, Block, VarDecl };

  Kind kind = Kind::Block;
  std::string text;  // exact source span
  int line = 1;
  int column = 1;

  // Expr: the expression; If/While: condition; Return: optional value;
  // VarDecl: optional initializer.
  ExprPtr expr;
  StmtPtr then_branch;  // If
  StmtPtr else_branch;  // If, optional
  StmtPtr body;         // While body, Labeled statement
  std::vector<StmtPtr> stmts;  // Block

  // VarDecl: variable; Labeled: label identifier.
  std::string name;
  // Labeled: the label as written, e.g. "Get_Line:".
  std::string label_text;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  StmtPtr body;  // always a Block
  int line = 1;
  // Every parameter and local declared anywhere in the body.
  std::vector<std::string> locals;
};

struct GlobalDecl {
  std::string name;
  Value initial = Value::integer(0);
  int line = 1;
};

struct Program {
  std::string name;  // program name used for the execute_program event
  std::vector<GlobalDecl> globals;
  std::vector<FunctionDef> functions;

  const FunctionDef* find_function(std::string_view fn) const;
  const GlobalDecl* find_global(std::string_view var) const;
};

/// Source text and 1-based line of a node. For a call this is the callee
/// name; for a labeled statement the label ("Get_Line:").
struct SourceRef {
  std::string text;
  int line = 1;
};

SourceRef node_source(const Expr& e);
SourceRef node_source(const Stmt& s);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_ws(std::string_view text);

/// Canonical source forms. Parsing the output yields a structurally equal
/// tree.
std::string to_source(const Expr& e);
std::string to_source(const Program& p);

/// Structural equality that ignores source text and positions.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Stmt& a, const Stmt& b);
bool same_structure(const Program& a, const Program& b);

}  // namespace evtrace::minic
