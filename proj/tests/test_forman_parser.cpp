#include <doctest.h>

#include "corpus.hpp"
#include "evtrace/error.hpp"
#include "evtrace/forman/parser.hpp"
#include "gen.hpp"

using namespace evtrace;
using namespace evtrace::forman;

namespace {

std::string error_of(const std::string& src) {
  try {
    parse_rules(src);
  } catch (const SyntaxError& e) {
    return e.what();
  }
  return "accepted";
}

}  // namespace

TEST_CASE("page_number history rule") {
  const RuleSet rs = parse_rules(evtest::read_text(evtest::corpus_dir() / "rules/page_history.rules"));
  REQUIRE(rs.rules.size() == 1);
  const Rule& r = rs.rules[0];
  CHECK(r.within == "print_page_header");
  CHECK(r.assertion->kind == TExpr::Kind::True);
  REQUIRE(r.say.size() == 1);
  REQUIRE(r.say[0].size() == 2);
  CHECK(r.say[0][0]->kind == TExpr::Kind::StrLit);
  const TExpr& list = *r.say[0][1];
  REQUIRE(list.kind == TExpr::Kind::List);
  CHECK(list.aggregate->pattern.metavar == "C");
  CHECK(list.aggregate->pattern.kind == EventKind::FuncCall);
  CHECK(list.aggregate->pattern.is_literal == "printf");
  CHECK(list.aggregate->from.empty());
  REQUIRE(list.aggregate->apply);
  CHECK(list.aggregate->apply->kind == TExpr::Kind::ValueAt);
  CHECK(list.aggregate->apply->probe_text == "page_number");
  CHECK(r.onfail.empty());
}

TEST_CASE("EXISTS with a trailing VALUE condition") {
  const RuleSet rs = parse_rules(
      "EXISTS L: ex_stmt IS 'Get_Line:' FROM execute_program "
      "VALUE(int)(AT L strlen(source_buffer) >10) SAY(L) ONFAIL SAY('none');");
  REQUIRE(rs.rules.size() == 1);
  const TExpr& q = *rs.rules[0].assertion;
  REQUIRE(q.kind == TExpr::Kind::Quantified);
  CHECK(q.quantifier == Quantifier::Exists);
  CHECK(q.pattern.metavar == "L");
  CHECK(q.pattern.is_literal == "Get_Line:");
  REQUIRE(q.operands.size() == 1);
  CHECK(q.operands[0]->kind == TExpr::Kind::ValueAt);
  CHECK(q.operands[0]->probe_text == "strlen(source_buffer) > 10");
  CHECK(rs.rules[0].say[0][0]->kind == TExpr::Kind::MetaVar);
  CHECK(rs.rules[0].onfail.size() == 1);
}

TEST_CASE("every tokenizer rule file parses") {
  for (const auto& r : evtest::tokenizer_rules()) {
    CAPTURE(r.name);
    CHECK_NOTHROW(parse_rules(r.text));
  }
  for (const auto& r : evtest::generic_rules()) {
    CAPTURE(r.name);
    CHECK_NOTHROW(parse_rules(r.text));
  }
}

TEST_CASE("statistics rule forms") {
  const RuleSet rs = parse_rules(evtest::read_text(evtest::corpus_dir() / "rules/statistics.rules"));
  const Rule& r = rs.rules.at(0);
  REQUIRE(r.say.size() == 3);
  const TExpr& all_calls = *r.say[0][1];
  REQUIRE(all_calls.kind == TExpr::Kind::Card);
  CHECK(all_calls.aggregate->all);
  const TExpr& outer = *r.say[1][1];
  CHECK_FALSE(outer.aggregate->all);
  CHECK(outer.aggregate->pattern.is_literal == "get_source_line");  // bare identifier
  const TExpr& errors = *r.say[2][3];
  REQUIRE(errors.kind == TExpr::Kind::Card);
  const Pattern& p = errors.aggregate->pattern;
  CHECK(p.metavar == "F");
  REQUIRE(p.context);
  CHECK(p.context->kind == TExpr::Kind::And);
  CHECK(p.context->operands[1]->probe_text == "token == ERROR");
}

TEST_CASE("SATISFIES with a path expression") {
  const RuleSet rs = parse_rules(evtest::read_text(evtest::corpus_dir() / "rules/call_pattern.rules"));
  const TExpr& s = *rs.rules.at(0).assertion;
  REQUIRE(s.kind == TExpr::Kind::Satisfies);
  REQUIRE(s.path->kind == PathExpr::Kind::Plus);
  const PathExpr& seq = *s.path->items[0];
  REQUIRE(seq.kind == PathExpr::Kind::Seq);
  CHECK(seq.items[0]->leaf.is_literal == "get_token");
  CHECK(seq.items[1]->leaf.is_literal == "print_token");
  CHECK(s.aggregate->pattern.context->kind == TExpr::Kind::Or);
}

TEST_CASE("typographic quotes and escapes") {
  const RuleSet rs = parse_rules("TRUE SAY(\xE2\x80\x98it is\xE2\x80\x99 'a''b' 'c\\'d' 'e\\nf');");
  const auto& items = rs.rules[0].say[0];
  REQUIRE(items.size() == 4);
  CHECK(items[0]->text == "it is");
  CHECK(items[1]->text == "a'b");
  CHECK(items[2]->text == "c'd");
  CHECK(items[3]->text == "e\nf");
}

TEST_CASE("expression precedence") {
  const RuleSet rs = parse_rules("NOT 1 + 2 * 3 == 7 AND TRUE OR FALSE SAY('x');");
  const TExpr& e = *rs.rules[0].assertion;
  REQUIRE(e.kind == TExpr::Kind::Or);
  REQUIRE(e.operands[0]->kind == TExpr::Kind::And);
  const TExpr& n = *e.operands[0]->operands[0];
  REQUIRE(n.kind == TExpr::Kind::Not);
  REQUIRE(n.operands[0]->kind == TExpr::Kind::Compare);
  CHECK(n.operands[0]->operands[0]->arith_op == ArithOp::Add);
}

TEST_CASE("comments are ignored") {
  CHECK(parse_rules("// one\n/* two\n */ TRUE SAY('ok'); // three").rules.size() == 1);
}

TEST_CASE("diagnostics") {
  CHECK(error_of("TRUE;") == "1:5: rule needs a SAY or ONFAIL SAY clause");
  CHECK(error_of("EXISTS L: stmt FROM execute_program SAY('x');") ==
        "1:11: unknown event kind 'stmt'");
  CHECK(error_of("TRUE SAY(X);") == "1:10: unbound metavariable 'X'");
  CHECK(error_of("CARD [ func_call FROM Y ] > 0 SAY('x');") ==
        "1:23: FROM scope 'Y' is not a bound metavariable");
  CHECK(error_of("CARD [ func_call & TRUE FROM execute_program ] > 0 SAY('x');") ==
        "1:18: context condition needs a metavariable");
  CHECK(error_of("TRUE SAY('x') ONFAIL 'y';") == "1:22: expected SAY after ONFAIL");
  CHECK(error_of("WITHIN main TRUE SAY('x');") == "1:27: WITHIN group is missing END");
  CHECK(error_of("EXISTS L: ex_stmt FROM execute_program VALUE(int)(AT L x +) SAY('x');")
            .find("1:") == 0);
  CHECK(error_of("EXISTS L: ex_stmt FROM execute_program VALUE(float)(AT L x) SAY('x');") ==
        "1:46: unknown cast type 'float'");
  CHECK(error_of("TRUE SAY('open);") == "1:10: unterminated string literal");
  CHECK(error_of("[ A: func_call FROM execute_program APPLY SOURCE_TEXT(A) ] SATISFIES func_call SAY('x');")
            .find("SATISFIES needs an aggregate without APPLY") != std::string::npos);
}

TEST_CASE("line numbers of rules") {
  const RuleSet rs = parse_rules("TRUE SAY('a');\n\n  FALSE SAY('b');\n");
  CHECK(rs.rules[0].line == 1);
  CHECK(rs.rules[1].line == 3);
}

TEST_CASE("metavariables of a quantifier are visible in SAY") {
  CHECK_NOTHROW(parse_rules("EXISTS M: func_call FROM execute_program SAY(M SOURCE_TEXT(M));"));
  CHECK_NOTHROW(parse_rules(
      "FOREACH M: func_call FROM execute_program "
      "EXISTS N: eval_expr FROM M TRUE SAY('x') ONFAIL SAY(M);"));
}

TEST_CASE("printing then parsing is a fixed point on corpus rules") {
  std::vector<std::string> texts;
  for (const auto& r : evtest::tokenizer_rules()) texts.push_back(r.text);
  for (const auto& r : evtest::generic_rules()) texts.push_back(r.text);
  for (const auto& t : texts) {
    const RuleSet a = parse_rules(t);
    const std::string printed = to_source(a);
    CAPTURE(printed);
    const RuleSet b = parse_rules(printed);
    CHECK(same_structure(a, b));
    CHECK(to_source(b) == printed);
  }
}

TEST_CASE("printing then parsing is a fixed point on random rules") {
  evtest::Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::string text = evtest::random_rule(rng);
    CAPTURE(text);
    const RuleSet a = parse_rules(text);
    const RuleSet b = parse_rules(to_source(a));
    CHECK(same_structure(a, b));
  }
}

TEST_CASE("standalone path expressions") {
  const PathExprPtr p = parse_path("(func_call IS 'a' | ex_stmt)* func_call?");
  REQUIRE(p->kind == PathExpr::Kind::Seq);
  CHECK(p->items[0]->kind == PathExpr::Kind::Star);
  CHECK(p->items[1]->kind == PathExpr::Kind::Opt);
  CHECK(to_source(*parse_path(to_source(*p))) == to_source(*p));
}
