#include "evtrace/minic/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "evtrace/error.hpp"
#include "parser_support.hpp"

namespace evtrace::minic {

namespace {

struct BuiltinSpec {
  std::string_view name;
  int min_args;
  int max_args;  // -1: variadic
};

constexpr std::array<BuiltinSpec, 7> kBuiltins = {{
    {"print", 0, -1},
    {"printf", 1, -1},
    {"strlen", 1, 1},
    {"getline", 0, 0},
    {"substr", 3, 3},
    {"char_at", 2, 2},
    {"to_str", 1, 1},
}};

const BuiltinSpec* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const std::set<std::string_view> kKeywords = {
    "func", "var", "if", "else", "while", "return", "break", "true", "false"};

enum class Tok { Ident, Keyword, Int, Str, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;   // spelling (decoded contents for Str)
  std::int64_t number = 0;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  Lexer(std::string_view src, int line, int column)
      : src_(src), line_(line), column_(column) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.begin = pos_;
      t.line = line_;
      t.column = column_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        t.end = pos_;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          advance();
        }
        t.text = std::string(src_.substr(t.begin, pos_ - t.begin));
        t.kind = kKeywords.count(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::int64_t v = 0;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          const int d = src_[pos_] - '0';
          if (v > (std::numeric_limits<std::int64_t>::max() - d) / 10) {
            throw SyntaxError("integer literal out of range", t.line, t.column);
          }
          v = v * 10 + d;
          advance();
        }
        t.kind = Tok::Int;
        t.number = v;
      } else if (c == '"') {
        advance();
        t.kind = Tok::Str;
        t.text = quoted('"', t);
      } else if (c == '\'') {
        advance();
        const std::string s = quoted('\'', t);
        if (s.size() != 1) {
          throw SyntaxError("character literal must hold one character",
                            t.line, t.column);
        }
        t.kind = Tok::Int;
        t.number = static_cast<unsigned char>(s[0]);
      } else {
        static const std::array<std::string_view, 6> two = {
            "<=", ">=", "==", "!=", "&&", "||"};
        t.kind = Tok::Punct;
        bool matched = false;
        for (auto op : two) {
          if (src_.substr(pos_, 2) == op) {
            advance();
            advance();
            t.text = std::string(op);
            matched = true;
            break;
          }
        }
        if (!matched) {
          static const std::string_view one = "+-*/%<>=!(){},;:?";
          if (one.find(c) == std::string_view::npos) {
            throw SyntaxError(std::string("unexpected character '") + c + "'",
                              t.line, t.column);
          }
          advance();
          t.text = std::string(1, c);
        }
      }
      t.end = pos_;
      out.push_back(t);
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        const int l = line_, col = column_;
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw SyntaxError("unterminated comment", l, col);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string quoted(char close, const Token& t) {
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw SyntaxError("unterminated literal", t.line, t.column);
      }
      char c = src_[pos_];
      advance();
      if (c == close) return out;
      if (c == '\\') {
        if (pos_ >= src_.size()) break;
        const char e = src_[pos_];
        advance();
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case 'r': c = '\r'; break;
          case '0': c = '\0'; break;
          case '\\': case '\'': case '"': c = e; break;
          default:
            throw SyntaxError(std::string("unknown escape \\") + e, line_,
                              column_ - 1);
        }
      }
      out.push_back(c);
    }
    throw SyntaxError("unterminated literal", t.line, t.column);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_;
  int column_;
};

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks)
      : src_(src), toks_(std::move(toks)) {}

  Program program(std::string name) {
    Program prog;
    prog.name = std::move(name);
    while (peek().kind != Tok::End) {
      if (is_kw("var")) {
        prog.globals.push_back(global());
      } else if (is_kw("func")) {
        prog.functions.push_back(function());
      } else {
        fail("expected 'func' or 'var' at top level");
      }
    }
    return prog;
  }

  ExprPtr standalone_expression() {
    ExprPtr e = expression();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after expression");
    return e;
  }

 private:
  // --- token helpers -----------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_end_ = t.end;
    return t;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool is_kw(std::string_view k) const {
    return peek().kind == Tok::Keyword && peek().text == k;
  }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      take();
      return true;
    }
    return false;
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      fail("expected '" + std::string(p) + "' but found " + describe(peek()));
    }
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) {
      fail(std::string("expected ") + what + " but found " + describe(peek()));
    }
    return take().text;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Str: return "string literal";
      case Tok::Int: return "number";
      default: return "'" + t.text + "'";
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().column);
  }

  template <class Node>
  void start(Node& n, const Token& t) {
    n.line = t.line;
    n.column = t.column;
  }
  std::string span(std::size_t begin) const {
    return std::string(src_.substr(begin, last_end_ - begin));
  }

  // --- declarations --------------------------------------------------------
  GlobalDecl global() {
    GlobalDecl g;
    g.line = take().line;  // var
    g.name = ident("variable name");
    if (accept("=")) {
      const Token& t = peek();
      bool negative = false;
      if (is_punct("-")) {
        take();
        negative = true;
      }
      const Token& lit = take();
      if (lit.kind == Tok::Int) {
        g.initial = Value::integer(negative ? -lit.number : lit.number);
      } else if (!negative && lit.kind == Tok::Str) {
        g.initial = Value::string(lit.text);
      } else if (!negative && lit.kind == Tok::Keyword &&
                 (lit.text == "true" || lit.text == "false")) {
        g.initial = Value::boolean(lit.text == "true");
      } else {
        throw SyntaxError("global initializer must be a literal", t.line,
                          t.column);
      }
    }
    expect(";");
    return g;
  }

  FunctionDef function() {
    FunctionDef f;
    f.line = take().line;  // func
    f.name = ident("function name");
    expect("(");
    if (!is_punct(")")) {
      do {
        f.params.push_back(ident("parameter name"));
      } while (accept(","));
    }
    expect(")");
    if (!is_punct("{")) fail("expected function body");
    f.body = statement();
    return f;
  }

  // --- statements ----------------------------------------------------------
  StmtPtr statement() {
    auto s = std::make_unique<Stmt>();
    const Token& first = peek();
    start(*s, first);
    const std::size_t begin = first.begin;
    if (is_punct("{")) {
      take();
      s->kind = Stmt::Kind::Block;
      while (!is_punct("}")) {
        if (peek().kind == Tok::End) fail("unterminated block");
        s->stmts.push_back(statement());
      }
      take();
    } else if (is_kw("var")) {
      take();
      s->kind = Stmt::Kind::VarDecl;
      s->name = ident("variable name");
      if (accept("=")) s->expr = assignment();
      expect(";");
    } else if (is_kw("if")) {
      take();
      s->kind = Stmt::Kind::If;
      expect("(");
      s->expr = expression();
      expect(")");
      s->then_branch = statement();
      if (is_kw("else")) {
        take();
        s->else_branch = statement();
      }
    } else if (is_kw("while")) {
      take();
      s->kind = Stmt::Kind::While;
      expect("(");
      s->expr = expression();
      expect(")");
      s->body = statement();
    } else if (is_kw("return")) {
      take();
      s->kind = Stmt::Kind::Return;
      if (!is_punct(";")) s->expr = expression();
      expect(";");
    } else if (is_kw("break")) {
      take();
      s->kind = Stmt::Kind::Break;
      expect(";");
    } else if (peek().kind == Tok::Ident && is_punct(":", 1)) {
      s->kind = Stmt::Kind::Labeled;
      s->name = take().text;
      take();
      s->label_text = span(begin);
      s->body = statement();
    } else {
      s->kind = Stmt::Kind::Expr;
      s->expr = expression();
      expect(";");
    }
    s->text = span(begin);
    return s;
  }

  // --- expressions -------------------------------------------------------
  ExprPtr finish(ExprPtr e, std::size_t begin) {
    e->text = span(begin);
    return e;
  }

  ExprPtr expression() {
    const Token& first = peek();
    ExprPtr lhs = assignment();
    while (is_punct(",")) {
      take();
      auto e = std::make_unique<Expr>();
      start(*e, first);
      e->kind = Expr::Kind::Comma;
      e->operands.push_back(std::move(lhs));
      e->operands.push_back(assignment());
      lhs = finish(std::move(e), first.begin);
    }
    return lhs;
  }

  ExprPtr assignment() {
    const Token& first = peek();
    if (first.kind == Tok::Ident && is_punct("=", 1)) {
      auto e = std::make_unique<Expr>();
      start(*e, first);
      e->kind = Expr::Kind::Assign;
      e->name = take().text;
      take();
      e->operands.push_back(assignment());
      return finish(std::move(e), first.begin);
    }
    return ternary();
  }

  ExprPtr ternary() {
    const Token& first = peek();
    ExprPtr cond = binary(0);
    if (!is_punct("?")) return cond;
    take();
    auto e = std::make_unique<Expr>();
    start(*e, first);
    e->kind = Expr::Kind::Ternary;
    e->operands.push_back(std::move(cond));
    e->operands.push_back(assignment());
    expect(":");
    e->operands.push_back(assignment());
    return finish(std::move(e), first.begin);
  }

  struct Level {
    std::vector<std::pair<std::string_view, BinaryOp>> ops;
  };

  static const std::vector<Level>& levels() {
    static const std::vector<Level> table = {
        {{{"||", BinaryOp::Or}}},
        {{{"&&", BinaryOp::And}}},
        {{{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}}},
        {{{"<", BinaryOp::Lt}, {"<=", BinaryOp::Le}, {">", BinaryOp::Gt},
          {">=", BinaryOp::Ge}}},
        {{{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}}},
        {{{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}}},
    };
    return table;
  }

  ExprPtr binary(std::size_t level) {
    if (level == levels().size()) return unary();
    const Token& first = peek();
    ExprPtr lhs = binary(level + 1);
    for (;;) {
      const auto& ops = levels()[level].ops;
      auto it = std::find_if(ops.begin(), ops.end(),
                             [&](const auto& o) { return is_punct(o.first); });
      if (it == ops.end()) return lhs;
      take();
      auto e = std::make_unique<Expr>();
      start(*e, first);
      e->kind = Expr::Kind::Binary;
      e->binary_op = it->second;
      e->operands.push_back(std::move(lhs));
      e->operands.push_back(binary(level + 1));
      lhs = finish(std::move(e), first.begin);
    }
  }

  ExprPtr unary() {
    const Token& first = peek();
    if (is_punct("-") || is_punct("!")) {
      take();
      auto e = std::make_unique<Expr>();
      start(*e, first);
      e->kind = Expr::Kind::Unary;
      e->unary_op = first.text == "-" ? UnaryOp::Neg : UnaryOp::Not;
      e->operands.push_back(unary());
      return finish(std::move(e), first.begin);
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& first = peek();
    auto e = std::make_unique<Expr>();
    start(*e, first);
    switch (first.kind) {
      case Tok::Int:
        take();
        e->kind = Expr::Kind::IntLit;
        e->int_value = first.number;
        return finish(std::move(e), first.begin);
      case Tok::Str:
        take();
        e->kind = Expr::Kind::StrLit;
        e->name = first.text;
        return finish(std::move(e), first.begin);
      case Tok::Keyword:
        if (first.text == "true" || first.text == "false") {
          take();
          e->kind = Expr::Kind::BoolLit;
          e->bool_value = first.text == "true";
          return finish(std::move(e), first.begin);
        }
        break;
      case Tok::Ident:
        take();
        e->name = first.text;
        if (accept("(")) {
          e->kind = Expr::Kind::Call;
          if (!is_punct(")")) {
            do {
              e->operands.push_back(assignment());
            } while (accept(","));
          }
          expect(")");
        } else {
          e->kind = Expr::Kind::Var;
        }
        return finish(std::move(e), first.begin);
      case Tok::Punct:
        if (first.text == "(") {
          take();
          ExprPtr inner = expression();
          expect(")");
          return inner;
        }
        break;
      default:
        break;
    }
    fail("expected an expression but found " + describe(first));
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t last_end_ = 0;
};

void check_call_arity(const Program& prog, const Expr& e,
                      const std::string& prefix) {
  const int n = static_cast<int>(e.operands.size());
  if (const BuiltinSpec* b = find_builtin(e.name)) {
    if (n < b->min_args || (b->max_args >= 0 && n > b->max_args)) {
      throw SemanticError(prefix + "wrong number of arguments to '" + e.name + "'",
                          e.line, e.column);
    }
    return;
  }
  const FunctionDef* f = prog.find_function(e.name);
  if (!f) {
    throw SemanticError(prefix + "call to undeclared function '" + e.name + "'",
                        e.line, e.column);
  }
  if (static_cast<std::size_t>(n) != f->params.size()) {
    throw SemanticError(prefix + "wrong number of arguments to '" + e.name +
                            "': expected " + std::to_string(f->params.size()) +
                            ", got " + std::to_string(n),
                        e.line, e.column);
  }
}

// Name resolution and structural rules.
class Checker {
 public:
  explicit Checker(Program& p) : prog_(p) {}

  void run() {
    std::set<std::string> globals;
    for (const auto& g : prog_.globals) {
      if (!globals.insert(g.name).second) {
        throw SemanticError("duplicate global '" + g.name + "'", g.line, 1);
      }
    }
    std::set<std::string> fns;
    for (const auto& f : prog_.functions) {
      if (is_builtin(f.name)) {
        throw SemanticError("function '" + f.name + "' shadows a builtin",
                            f.line, 1);
      }
      if (!fns.insert(f.name).second) {
        throw SemanticError("duplicate function '" + f.name + "'", f.line, 1);
      }
    }
    const FunctionDef* main = prog_.find_function("main");
    if (!main) throw SemanticError("program has no 'main' function", 1, 1);
    if (!main->params.empty()) {
      throw SemanticError("'main' must take no parameters", main->line, 1);
    }
    for (auto& f : prog_.functions) function(f, globals);
  }

 private:
  void function(FunctionDef& f, const std::set<std::string>& globals) {
    globals_ = &globals;
    locals_.clear();
    labels_.clear();
    scopes_.assign(1, {});
    loop_depth_ = 0;
    for (const auto& p : f.params) {
      if (!scopes_.back().insert(p).second) {
        throw SemanticError("duplicate parameter '" + p + "'", f.line, 1);
      }
      note_local(p);
    }
    // The body block shares the parameter scope.
    for (auto& s : f.body->stmts) stmt(*s);
    f.locals = locals_;
  }

  void note_local(const std::string& n) {
    if (std::find(locals_.begin(), locals_.end(), n) == locals_.end()) {
      locals_.push_back(n);
    }
  }

  bool declared(const std::string& n) const {
    for (const auto& s : scopes_) {
      if (s.count(n)) return true;
    }
    return globals_->count(n) > 0;
  }

  void stmt(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Expr:
        expr(*s.expr);
        break;
      case Stmt::Kind::If:
        expr(*s.expr);
        stmt(*s.then_branch);
        if (s.else_branch) stmt(*s.else_branch);
        break;
      case Stmt::Kind::While:
        expr(*s.expr);
        ++loop_depth_;
        stmt(*s.body);
        --loop_depth_;
        break;
      case Stmt::Kind::Return:
        if (s.expr) expr(*s.expr);
        break;
      case Stmt::Kind::Break:
        if (loop_depth_ == 0) {
          throw SemanticError("'break' outside of a loop", s.line, s.column);
        }
        break;
      case Stmt::Kind::Labeled:
        if (!labels_.insert(s.name).second) {
          throw SemanticError("duplicate label '" + s.name + "'", s.line,
                              s.column);
        }
        stmt(*s.body);
        break;
      case Stmt::Kind::Block:
        scopes_.emplace_back();
        for (auto& c : s.stmts) stmt(*c);
        scopes_.pop_back();
        break;
      case Stmt::Kind::VarDecl:
        if (s.expr) expr(*s.expr);
        if (!scopes_.back().insert(s.name).second) {
          throw SemanticError("duplicate declaration of '" + s.name + "'",
                              s.line, s.column);
        }
        note_local(s.name);
        break;
    }
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Assign:
        if (!declared(e.name)) {
          throw SemanticError("undeclared identifier '" + e.name + "'", e.line,
                              e.column);
        }
        break;
      case Expr::Kind::Call:
        check_call(e);
        break;
      default:
        break;
    }
    for (const auto& o : e.operands) expr(*o);
  }

  void check_call(const Expr& e) { check_call_arity(prog_, e, ""); }

  Program& prog_;
  const std::set<std::string>* globals_ = nullptr;
  std::vector<std::set<std::string>> scopes_;
  std::vector<std::string> locals_;
  std::set<std::string> labels_;
  int loop_depth_ = 0;
};

}  // namespace

namespace detail {

void check_expression_names(const Program& program, const Expr& e,
                            const std::set<std::string>& visible,
                            const std::string& what) {
  if ((e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Assign) &&
      !visible.count(e.name)) {
    throw SemanticError(what + ": undeclared identifier '" + e.name + "'",
                        e.line, e.column);
  }
  if (e.kind == Expr::Kind::Call) check_call_arity(program, e, what + ": ");
  for (const auto& o : e.operands) {
    check_expression_names(program, *o, visible, what);
  }
}

}  // namespace detail

bool is_builtin(std::string_view name) { return find_builtin(name) != nullptr; }

Program parse_program(std::string_view source, std::string program_name) {
  Parser parser(source, Lexer(source, 1, 1).run());
  Program prog = parser.program(std::move(program_name));
  Checker(prog).run();
  return prog;
}

ExprPtr parse_expression(std::string_view text, int line, int column) {
  Parser parser(text, Lexer(text, line, column).run());
  return parser.standalone_expression();
}

}  // namespace evtrace::minic
