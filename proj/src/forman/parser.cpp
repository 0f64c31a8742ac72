#include "evtrace/forman/parser.hpp"

#include <cctype>
#include <set>
#include <vector>

#include "evtrace/error.hpp"
#include "evtrace/minic/parser.hpp"

namespace evtrace::forman {

namespace {

const std::set<std::string_view> kKeywords = {
    "WITHIN", "END",   "EXISTS", "FOREACH",     "FROM",      "IS",
    "ALL",    "APPLY", "CARD",   "VALUE",       "AT",        "SOURCE_TEXT",
    "SATISFIES", "SAY", "ONFAIL", "TRUE", "FALSE", "AND", "OR", "NOT"};

enum class Tok { Keyword, Ident, Int, Str, Punct, Raw, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  int line = 1;
  int column = 1;
};

// Typographic quotes as they appear in printed rule listings.
constexpr std::string_view kOpenQuote = "\xE2\x80\x98";   // U+2018
constexpr std::string_view kCloseQuote = "\xE2\x80\x99";  // U+2019

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      // The text after "AT <metavar>" is a target-language expression that
      // runs to the closing parenthesis.
      if (out.size() >= 2 && out[out.size() - 2].kind == Tok::Keyword &&
          out[out.size() - 2].text == "AT" && out.back().kind == Tok::Ident) {
        out.push_back(raw());
        continue;
      }
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          advance();
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = kKeywords.count(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          if (t.number > (INT64_MAX - 9) / 10) {
            throw SyntaxError("integer literal out of range", t.line, t.column);
          }
          t.number = t.number * 10 + (src_[pos_] - '0');
          advance();
        }
        t.kind = Tok::Int;
      } else if (c == '\'') {
        advance();
        t.kind = Tok::Str;
        t.text = quoted("'", t);
      } else if (src_.substr(pos_, kOpenQuote.size()) == kOpenQuote) {
        for (std::size_t i = 0; i < kOpenQuote.size(); ++i) advance();
        t.kind = Tok::Str;
        t.text = quoted(kCloseQuote, t);
      } else {
        t.kind = Tok::Punct;
        for (std::string_view op : {"==", "!=", "<=", ">="}) {
          if (src_.substr(pos_, 2) == op) t.text = std::string(op);
        }
        if (t.text.empty()) {
          if (std::string_view("()[]:&,;<>+-*/%|?").find(c) ==
              std::string_view::npos) {
            throw SyntaxError(std::string("unexpected character '") + c + "'",
                              t.line, t.column);
          }
          t.text = std::string(1, c);
        }
        for (std::size_t i = 0; i < t.text.size(); ++i) advance();
      }
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
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        const int l = line_, c = column_;
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw SyntaxError("unterminated comment", l, c);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string quoted(std::string_view close, const Token& t) {
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) {
        throw SyntaxError("unterminated string literal", t.line, t.column);
      }
      if (src_.substr(pos_, close.size()) == close) {
        for (std::size_t i = 0; i < close.size(); ++i) advance();
        // '' inside a '...' literal stands for one quote.
        if (close == "'" && pos_ < src_.size() && src_[pos_] == '\'') {
          advance();
          out.push_back('\'');
          continue;
        }
        return out;
      }
      char c = src_[pos_];
      advance();
      if (c == '\\' && pos_ < src_.size()) {
        const char e = src_[pos_];
        advance();
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      out.push_back(c);
    }
  }

  Token raw() {
    skip_space();
    Token t;
    t.kind = Tok::Raw;
    t.line = line_;
    t.column = column_;
    const std::size_t start = pos_;
    int depth = 0;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '"' || c == '\'') {
        advance();
        while (pos_ < src_.size() && src_[pos_] != c && src_[pos_] != '\n') {
          if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
          advance();
        }
        if (pos_ >= src_.size() || src_[pos_] != c) {
          throw SyntaxError("unterminated literal in AT expression", t.line,
                            t.column);
        }
        advance();
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      advance();
    }
    if (pos_ >= src_.size()) {
      throw SyntaxError("unterminated AT expression", t.line, t.column);
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  RuleSet rule_set() {
    RuleSet rs;
    while (peek().kind != Tok::End) {
      if (is_kw("WITHIN")) {
        take();
        const std::string fn = ident("function name after WITHIN");
        if (is_kw("END")) fail("WITHIN group has no rules");
        while (!is_kw("END")) {
          if (peek().kind == Tok::End) fail("WITHIN group is missing END");
          rs.rules.push_back(rule(fn));
        }
        take();
      } else {
        rs.rules.push_back(rule(std::nullopt));
      }
    }
    return rs;
  }

  PathExprPtr standalone_path() {
    PathExprPtr p = path_alt();
    if (peek().kind != Tok::End) fail("unexpected " + describe(peek()));
    return p;
  }

 private:
  // --- tokens ------------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_kw(std::string_view k, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Keyword && peek(ahead).text == k;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    take();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "' but found " + describe(peek()));
  }
  void expect_kw(std::string_view k) {
    if (!is_kw(k)) fail("expected " + std::string(k) + " but found " + describe(peek()));
    take();
  }
  std::string ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail("expected " + what + " but found " + describe(peek()));
    return take().text;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Str: return "string '" + t.text + "'";
      case Tok::Int: return "number " + std::to_string(t.number);
      default: return "'" + t.text + "'";
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().column);
  }

  TExprPtr node(TExpr::Kind k, const Token& at) {
    auto e = std::make_unique<TExpr>();
    e->kind = k;
    e->line = at.line;
    e->column = at.column;
    return e;
  }

  // --- metavariable scopes -------------------------------------------------
  bool bound(const std::string& m) const {
    for (const auto& s : scopes_) {
      if (s == m) return true;
    }
    return false;
  }
  void require_bound(const std::string& m, const Token& at) const {
    if (!bound(m)) {
      throw SemanticError("unbound metavariable '" + m + "'", at.line, at.column);
    }
  }

  // --- rules ---------------------------------------------------------------
  Rule rule(std::optional<std::string> within) {
    Rule r;
    r.line = peek().line;
    r.within = std::move(within);
    scopes_.clear();
    quantified_.clear();
    r.assertion = expr();
    // SAY clauses see the metavariables bound by the assertion's quantifiers.
    scopes_ = quantified_;
    while (is_kw("SAY")) r.say.push_back(say_clause());
    if (is_kw("ONFAIL")) {
      take();
      if (!is_kw("SAY")) fail("expected SAY after ONFAIL");
      while (is_kw("SAY")) r.onfail.push_back(say_clause());
    }
    if (r.say.empty() && r.onfail.empty()) {
      fail("rule needs a SAY or ONFAIL SAY clause");
    }
    expect(";");
    return r;
  }

  SayClause say_clause() {
    take();  // SAY
    expect("(");
    SayClause items;
    while (!is_punct(")")) {
      if (peek().kind == Tok::End) fail("unterminated SAY clause");
      items.push_back(expr());
      accept(",");
    }
    take();
    return items;
  }

  // --- expressions ---------------------------------------------------------
  TExprPtr expr() { return or_expr(); }

  TExprPtr or_expr() {
    TExprPtr lhs = and_expr();
    while (is_kw("OR")) {
      auto e = node(TExpr::Kind::Or, take());
      e->operands.push_back(std::move(lhs));
      e->operands.push_back(and_expr());
      lhs = std::move(e);
    }
    return lhs;
  }

  TExprPtr and_expr() {
    TExprPtr lhs = not_expr();
    while (is_kw("AND")) {
      auto e = node(TExpr::Kind::And, take());
      e->operands.push_back(std::move(lhs));
      e->operands.push_back(not_expr());
      lhs = std::move(e);
    }
    return lhs;
  }

  TExprPtr not_expr() {
    if (is_kw("NOT")) {
      auto e = node(TExpr::Kind::Not, take());
      e->operands.push_back(not_expr());
      return e;
    }
    return compare();
  }

  TExprPtr compare() {
    TExprPtr lhs = sum();
    static const std::vector<std::pair<std::string_view, CompareOp>> ops = {
        {"==", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
        {"<=", CompareOp::Le}, {">", CompareOp::Gt},  {">=", CompareOp::Ge}};
    for (const auto& [spelling, op] : ops) {
      if (is_punct(spelling)) {
        auto e = node(TExpr::Kind::Compare, take());
        e->compare_op = op;
        e->operands.push_back(std::move(lhs));
        e->operands.push_back(sum());
        return e;
      }
    }
    return lhs;
  }

  TExprPtr arith(int level) {
    static const std::vector<std::vector<std::pair<std::string_view, ArithOp>>>
        levels = {{{"+", ArithOp::Add}, {"-", ArithOp::Sub}},
                  {{"*", ArithOp::Mul}, {"/", ArithOp::Div}, {"%", ArithOp::Mod}}};
    if (level == 2) return unary();
    TExprPtr lhs = arith(level + 1);
    for (;;) {
      bool matched = false;
      for (const auto& [spelling, op] : levels[level]) {
        if (is_punct(spelling)) {
          auto e = node(TExpr::Kind::Arith, take());
          e->arith_op = op;
          e->operands.push_back(std::move(lhs));
          e->operands.push_back(arith(level + 1));
          lhs = std::move(e);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  TExprPtr sum() { return arith(0); }

  TExprPtr unary() {
    if (is_punct("-")) {
      auto e = node(TExpr::Kind::Neg, take());
      e->operands.push_back(unary());
      return e;
    }
    return postfix();
  }

  TExprPtr postfix() {
    const Token& at = peek();
    if (is_punct("[")) {
      auto agg = aggregate();
      if (is_kw("SATISFIES")) {
        take();
        if (agg->apply) {
          throw SyntaxError("SATISFIES needs an aggregate without APPLY",
                            at.line, at.column);
        }
        auto e = node(TExpr::Kind::Satisfies, at);
        e->aggregate = std::move(agg);
        e->path = path_alt();
        return e;
      }
      auto e = node(TExpr::Kind::List, at);
      e->aggregate = std::move(agg);
      return e;
    }
    return primary();
  }

  TExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        auto e = node(TExpr::Kind::IntLit, take());
        e->int_value = t.number;
        return e;
      }
      case Tok::Str: {
        auto e = node(TExpr::Kind::StrLit, take());
        e->text = t.text;
        return e;
      }
      case Tok::Ident: {
        require_bound(t.text, t);
        auto e = node(TExpr::Kind::MetaVar, take());
        e->text = t.text;
        return e;
      }
      case Tok::Punct:
        if (t.text == "(") {
          take();
          TExprPtr inner = expr();
          expect(")");
          return inner;
        }
        break;
      case Tok::Keyword:
        if (t.text == "TRUE") return node(TExpr::Kind::True, take());
        if (t.text == "FALSE") return node(TExpr::Kind::False, take());
        if (t.text == "VALUE") return value_at();
        if (t.text == "SOURCE_TEXT") {
          auto e = node(TExpr::Kind::SourceText, take());
          expect("(");
          const Token& m = peek();
          e->text = ident("metavariable");
          require_bound(e->text, m);
          expect(")");
          return e;
        }
        if (t.text == "CARD") {
          auto e = node(TExpr::Kind::Card, take());
          if (!is_punct("[")) fail("expected '[' after CARD");
          e->aggregate = aggregate();
          return e;
        }
        if (t.text == "EXISTS" || t.text == "FOREACH") return quantified();
        break;
      default:
        break;
    }
    fail("expected an expression but found " + describe(t));
  }

  TExprPtr value_at() {
    auto e = node(TExpr::Kind::ValueAt, take());
    expect("(");
    const Token type_tok = peek();
    const std::string type = ident("cast type");
    if (type == "int") {
      e->cast = CastType::Int;
    } else if (type == "bool") {
      e->cast = CastType::Bool;
    } else if (type == "str") {
      e->cast = CastType::Str;
    } else {
      throw SyntaxError("unknown cast type '" + type + "'", type_tok.line,
                        type_tok.column);
    }
    expect(")");
    expect("(");
    expect_kw("AT");
    const Token& m = peek();
    e->text = ident("metavariable after AT");
    require_bound(e->text, m);
    const Token& raw = peek();
    if (raw.kind != Tok::Raw) fail("expected an expression after AT");
    take();
    minic::ExprPtr probe = minic::parse_expression(raw.text, raw.line, raw.column);
    e->probe_text = minic::to_source(*probe);
    e->probe = std::move(probe);
    expect(")");
    return e;
  }

  TExprPtr quantified() {
    auto e = node(TExpr::Kind::Quantified, peek());
    e->quantifier = take().text == "EXISTS" ? Quantifier::Exists : Quantifier::Foreach;
    const std::string m = ident("metavariable");
    expect(":");
    scopes_.push_back(m);
    quantified_.push_back(m);
    e->pattern = pattern(m);
    e->from = from_scope(m);
    if (starts_expression()) e->operands.push_back(expr());
    scopes_.pop_back();
    return e;
  }

  std::unique_ptr<Aggregate> aggregate() {
    take();  // [
    auto agg = std::make_unique<Aggregate>();
    if (is_kw("ALL")) {
      take();
      agg->all = true;
    }
    std::string m;
    if (peek().kind == Tok::Ident && is_punct(":", 1)) {
      m = take().text;
      take();
    }
    if (!m.empty()) scopes_.push_back(m);
    agg->pattern = pattern(m);
    agg->from = from_scope(m);
    if (is_kw("APPLY")) {
      take();
      agg->apply = expr();
    }
    if (!m.empty()) scopes_.pop_back();
    expect("]");
    return agg;
  }

  // Called with the pattern's own metavariable already in scope.
  std::string from_scope(const std::string& self) {
    expect_kw("FROM");
    const Token& t = peek();
    const std::string scope = ident("scope after FROM");
    if (scope == "execute_program") return {};
    if (scope == self || !bound(scope)) {
      throw SemanticError("FROM scope '" + scope + "' is not a bound metavariable",
                          t.line, t.column);
    }
    return scope;
  }

  Pattern pattern(const std::string& metavar) {
    Pattern p;
    p.metavar = metavar;
    p.kind = event_kind();
    if (is_kw("IS")) {
      take();
      const Token& lit = take();
      if (lit.kind != Tok::Str && lit.kind != Tok::Ident) {
        throw SyntaxError("expected a name or quoted text after IS", lit.line,
                          lit.column);
      }
      p.is_literal = lit.text;
    }
    if (is_punct("&")) {
      const Token& amp = take();
      if (metavar.empty()) {
        throw SemanticError("context condition needs a metavariable", amp.line,
                            amp.column);
      }
      p.context = expr();
    }
    return p;
  }

  EventKind event_kind() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      if (auto k = kind_from_name(t.text)) {
        take();
        return *k;
      }
    }
    throw SyntaxError("unknown event kind " + describe(t), t.line, t.column);
  }

  bool starts_expression() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
      case Tok::Str:
      case Tok::Ident:
        return true;
      case Tok::Punct:
        return t.text == "(" || t.text == "[" || t.text == "-";
      case Tok::Keyword:
        return t.text == "TRUE" || t.text == "FALSE" || t.text == "VALUE" ||
               t.text == "SOURCE_TEXT" || t.text == "CARD" ||
               t.text == "EXISTS" || t.text == "FOREACH" || t.text == "NOT";
      default:
        return false;
    }
  }

  // --- path expressions ----------------------------------------------------
  PathExprPtr path_alt() {
    PathExprPtr first = path_seq();
    if (!is_punct("|")) return first;
    auto alt = std::make_unique<PathExpr>();
    alt->kind = PathExpr::Kind::Alt;
    alt->items.push_back(std::move(first));
    while (accept("|")) alt->items.push_back(path_seq());
    return alt;
  }

  bool starts_path_atom() const {
    if (is_punct("(")) return true;
    return peek().kind == Tok::Ident && kind_from_name(peek().text).has_value();
  }

  PathExprPtr path_seq() {
    if (!starts_path_atom()) fail("expected a path expression but found " + describe(peek()));
    PathExprPtr first = path_postfix();
    if (!starts_path_atom()) return first;
    auto seq = std::make_unique<PathExpr>();
    seq->kind = PathExpr::Kind::Seq;
    seq->items.push_back(std::move(first));
    while (starts_path_atom()) seq->items.push_back(path_postfix());
    return seq;
  }

  PathExprPtr path_postfix() {
    PathExprPtr p = path_atom();
    for (;;) {
      PathExpr::Kind k;
      if (is_punct("*")) {
        k = PathExpr::Kind::Star;
      } else if (is_punct("+")) {
        k = PathExpr::Kind::Plus;
      } else if (is_punct("?")) {
        k = PathExpr::Kind::Opt;
      } else {
        return p;
      }
      take();
      auto wrap = std::make_unique<PathExpr>();
      wrap->kind = k;
      wrap->items.push_back(std::move(p));
      p = std::move(wrap);
    }
  }

  PathExprPtr path_atom() {
    if (accept("(")) {
      PathExprPtr inner = path_alt();
      expect(")");
      return inner;
    }
    auto leaf = std::make_unique<PathExpr>();
    leaf->kind = PathExpr::Kind::Leaf;
    leaf->leaf.kind = event_kind();
    if (is_kw("IS")) {
      take();
      const Token& lit = take();
      if (lit.kind != Tok::Str && lit.kind != Tok::Ident) {
        throw SyntaxError("expected a name or quoted text after IS", lit.line,
                          lit.column);
      }
      leaf->leaf.is_literal = lit.text;
    }
    return leaf;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scopes_;
  std::vector<std::string> quantified_;
};

}  // namespace

RuleSet parse_rules(std::string_view source) {
  return Parser(Lexer(source).run()).rule_set();
}

PathExprPtr parse_path(std::string_view source) {
  return Parser(Lexer(source).run()).standalone_path();
}

}  // namespace evtrace::forman
