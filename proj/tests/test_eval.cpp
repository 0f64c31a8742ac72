#include <doctest.h>

#include "evtrace/error.hpp"
#include "evtrace/forman/eval.hpp"
#include "evtrace/forman/filter.hpp"
#include "evtrace/forman/parser.hpp"
#include "evtrace/minic/interpreter.hpp"
#include "evtrace/minic/parser.hpp"

using namespace evtrace;
using namespace evtrace::forman;

namespace {

// Trace of `source` recorded with every event and the probes `rules` need.
Trace record(const std::string& source, const std::string& rules = "TRUE SAY('x');",
             const std::string& name = "prog") {
  minic::ExecOptions opt;
  opt.probes = derive_footprint(parse_rules(rules)).probes;
  return minic::execute(minic::parse_program(source, name), opt).trace;
}

std::string report(const std::string& source, const std::string& rules) {
  return run_rules(record(source, rules), parse_rules(rules)).text();
}

const char* kFact =
    "func fact(n) {\n"
    "  if (n <= 1) {\n"
    "    return 1;\n"
    "  }\n"
    "  return n * fact(n - 1);\n"
    "}\n"
    "func main() {\n"
    "  print(fact(3));\n"
    "  print(fact(1));\n"
    "}\n";

EventId find(const Trace& t, EventKind k, const std::string& name, int nth = 0) {
  for (const auto& e : t.events()) {
    if (e.kind == k && e.name == name && nth-- == 0) return e.id;
  }
  FAIL("no event " << name);
  return 0;
}

Pattern pattern_of(const std::string& rule_text) {
  RuleSet rs = parse_rules(rule_text);
  return std::move(rs.rules[0].assertion->pattern);
}

}  // namespace

TEST_CASE("match_pattern") {
  const Trace t = record(
      "var token;\nvar ERROR = 4;\nfunc get_token() {\n  token = 4;\n  return 0;\n}\n"
      "func main() {\nGet_Line:\n  printf(\"x\");\n  get_token();\n}\n",
      "EXISTS F: func_call & SOURCE_TEXT(F) == 'get_token' AND VALUE(int)(AT F token == ERROR) "
      "FROM execute_program SAY('x');");
  const Evaluator ev(t);
  const EventId printf_call = find(t, EventKind::FuncCall, "printf");
  const EventId label = find(t, EventKind::ExStmt, "Get_Line:");
  const EventId get_token = find(t, EventKind::FuncCall, "get_token");

  const Pattern is_printf = pattern_of("EXISTS M: func_call IS 'printf' FROM execute_program SAY('x');");
  CHECK(ev.match_pattern(printf_call, is_printf, {}));
  CHECK_FALSE(ev.match_pattern(label, is_printf, {}));

  const Pattern error_token = pattern_of(
      "EXISTS F: func_call & SOURCE_TEXT(F) == 'get_token' AND VALUE(int)(AT F token == ERROR) "
      "FROM execute_program SAY('x');");
  CHECK(ev.match_pattern(get_token, error_token, {}));
  CHECK_FALSE(ev.match_pattern(printf_call, error_token, {}));

  const Pattern label_ws = pattern_of("EXISTS L: ex_stmt IS '  Get_Line: ' FROM execute_program SAY('x');");
  CHECK(ev.match_pattern(label, label_ws, {}));
}

TEST_CASE("select keeps outermost matches unless ALL") {
  const Trace t = record(kFact);
  const Evaluator ev(t);
  const Pattern fact = pattern_of("EXISTS M: func_call IS fact FROM execute_program SAY('x');");
  const auto outer = ev.select(t.root(), false, fact, {});
  const auto all = ev.select(t.root(), true, fact, {});
  CHECK(outer.size() == 2);
  CHECK(all.size() == 4);
  CHECK(std::is_sorted(all.begin(), all.end()));
  const auto inside_first = ev.select(outer[0], true, fact, {});
  CHECK(inside_first.size() == 2);
  for (EventId e : inside_first) CHECK(included_in(t, e, outer[0]));
}

TEST_CASE("WITHIN restricts selections to the function") {
  const std::string rules =
      "WITHIN fact TRUE SAY(CARD [ ALL func_call FROM execute_program ] "
      "CARD [ ALL eval_expr IS 'n - 1' FROM execute_program ]); END\n"
      "WITHIN main TRUE SAY(CARD [ ALL func_call FROM execute_program ]); END";
  // Inside fact: the two recursive calls. Inside main: print, fact, print, fact.
  CHECK(report(kFact, rules) == "2 2\n4\n");
}

TEST_CASE("quantifier results") {
  const Trace t = record(kFact);
  const Evaluator ev(t);
  auto quantifier = [&](const std::string& text) {
    RuleSet rs = parse_rules(text);
    return ev.eval_quantifier(*rs.rules[0].assertion, {});
  };

  auto r = quantifier("EXISTS M: destination FROM execute_program SAY('x');");
  CHECK_FALSE(r.value);
  CHECK_FALSE(r.witness);
  CHECK(r.events_visited == 0);

  r = quantifier("FOREACH M: func_call FROM execute_program TRUE SAY('x');");
  CHECK(r.value);
  CHECK_FALSE(r.witness);
  CHECK(r.events_visited == 6);

  r = quantifier("EXISTS M: func_call IS fact FROM execute_program SOURCE_TEXT(M) == 'fact' SAY('x');");
  CHECK(r.value);
  REQUIRE(r.witness);
  CHECK(r.witness->at("M") == find(t, EventKind::FuncCall, "fact"));
  CHECK(r.events_visited == 1);

  r = quantifier("EXISTS M: func_call FROM execute_program SOURCE_TEXT(M) == 'print' SAY('x');");
  CHECK(r.value);
  CHECK(r.events_visited == 1);

  r = quantifier("EXISTS M: func_call FROM execute_program SOURCE_TEXT(M) == 'fact' SAY('x');");
  CHECK(r.events_visited == 2);

  r = quantifier("FOREACH M: func_call FROM execute_program SOURCE_TEXT(M) == 'print' SAY('x');");
  CHECK_FALSE(r.value);
  REQUIRE(r.witness);
  CHECK(t.at(r.witness->at("M")).name == "fact");
  CHECK(r.events_visited == 2);
}

TEST_CASE("aggregates and CARD") {
  CHECK(report("func main() {\n}\n", "TRUE SAY(CARD [ ALL func_call FROM execute_program ]);") == "0\n");
  CHECK(report("var x;\nfunc main() {\n  x = 3;\n  x = x * 2;\n  x = x - 1;\n}\n",
               "TRUE SAY('x:' [ D: destination IS 'x' FROM execute_program APPLY VALUE(int)(AT D x) ]);") ==
        "x: 3 6 5\n");
  CHECK(report(kFact,
               "TRUE SAY([ ALL C: func_call IS 'fact' FROM execute_program APPLY SOURCE_TEXT(C) ]);") ==
        "fact fact fact fact\n");
  CHECK(report("func main() {\n}\n", "TRUE SAY('[' [ func_call FROM execute_program ] ']');") ==
        "[ ]\n");
}

TEST_CASE("path matching is anchored") {
  const Trace t = record(
      "func a() {\n  return 0;\n}\nfunc b() {\n  return 0;\n}\n"
      "func main() {\n  a();\n  b();\n  a();\n  b();\n}\n");
  const Evaluator ev(t);
  const Pattern calls = pattern_of("EXISTS M: func_call FROM execute_program SAY('x');");
  const auto seq = ev.select(t.root(), false, calls, {});
  REQUIRE(seq.size() == 4);
  auto matches = [&](const std::string& px, std::span<const EventId> s) {
    return ev.match_path(s, *parse_path(px), {});
  };
  CHECK(matches("(func_call IS a func_call IS b)+", seq));
  CHECK_FALSE(matches("func_call IS a func_call IS b", seq));
  CHECK(matches("func_call IS a (func_call IS b | func_call IS a)* func_call IS b", seq));
  CHECK_FALSE(matches("(func_call IS b)*", seq));
  CHECK(matches("(func_call IS b)*", std::span<const EventId>()));
  CHECK_FALSE(matches("(func_call IS b)+", std::span<const EventId>()));
  CHECK(matches("func_call? func_call? func_call func_call func_call?", seq));
  CHECK_FALSE(matches("func_call? func_call", seq));
}

TEST_CASE("render_event") {
  const Trace t = record("var n;\nfunc main() {\nGet_Line:\n  n = 1;\n}\n", "TRUE SAY('x');", "tok");
  CHECK(render_event(t.at(1)) ==
        "ex_stmt :> 'Get_Line:' source line 3 within function main\nTime= 1 .. 1");
  CHECK(render_event(t.at(0)) ==
        "execute_program :> 'tok' source line 1 within function tok\nTime= 0 .. 9");
}

TEST_CASE("message assembly") {
  const std::string prog = "func main() {\n  print(1);\n}\n";
  CHECK(report(prog, "TRUE SAY('a' 'b' 3 TRUE FALSE);") == "a b 3 TRUE FALSE\n");
  CHECK(report(prog, "TRUE SAY('n =' 3 ', more' '.' 'x ' 'y' ' z' '(' 'w' ')');") ==
        "n = 3, more. x y z ( w)\n");
  CHECK(report(prog, "TRUE SAY('a', 'b') SAY('c');") == "a b\nc\n");
  CHECK_THROWS_AS(parse_rules("TRUE SAY('s' SOURCE_TEXT(M));"), SemanticError);
}

TEST_CASE("SAY and ONFAIL are exclusive") {
  const std::string prog = "func main() {\n  print(1);\n}\n";
  const RuleSet rs = parse_rules(
      "TRUE SAY('yes') ONFAIL SAY('no');\n"
      "FALSE SAY('yes') ONFAIL SAY('no');\n"
      "FALSE SAY('quiet');\n");
  const Report r = run_rules(record(prog), rs);
  CHECK(r.text() == "yes\nno\n");
  CHECK(r.onfail_fired == 1);
  CHECK(r.errors == 0);
}

TEST_CASE("witness bindings reach SAY") {
  const std::string prog = "var x;\nfunc main() {\n  x = 1;\n  x = 20;\n  x = 3;\n}\n";
  CHECK(report(prog,
               "EXISTS D: destination FROM execute_program VALUE(int)(AT D x) > 10 "
               "SAY('big' VALUE(int)(AT D x) 'at time' D) ONFAIL SAY('none');") ==
        "big 20 at time destination :> 'x' source line 4 within function main\nTime= 12 .. 12\n");
  CHECK(report(prog,
               "FOREACH D: destination FROM execute_program VALUE(int)(AT D x) < 10 "
               "SAY('all small') ONFAIL SAY('counterexample' VALUE(int)(AT D x));") ==
        "counterexample 20\n");
}

TEST_CASE("evaluation errors are reported per rule") {
  const std::string prog = "var x;\nfunc main() {\n  x = 1;\n}\n";
  const RuleSet rs = parse_rules(
      "TRUE SAY('before');\n"
      "EXISTS D: destination FROM execute_program 'a' SAY('x');\n"
      "TRUE SAY(1 / (CARD [ ALL eval_expr IS 'nothing' FROM execute_program ]));\n"
      "TRUE SAY('a' < 1);\n"
      "TRUE SAY('after');\n");
  const Report r = run_rules(record(prog), rs);
  CHECK(r.errors == 3);
  CHECK(r.text() ==
        "before\n"
        "error: rule 2 (line 2): a str value is not a truth value\n"
        "error: rule 3 (line 3): division by zero\n"
        "error: rule 4 (line 4): cannot compare str with int\n"
        "after\n");
  CHECK(r.messages[1].error);
  CHECK_FALSE(r.messages[0].error);
}

TEST_CASE("missing probe values are evaluation errors") {
  const Trace t = record("var x;\nfunc main() {\n  x = 1;\n}\n");  // no probes recorded
  const Report r = run_rules(
      t, parse_rules("EXISTS D: destination FROM execute_program VALUE(int)(AT D x) == 1 SAY('x');"));
  REQUIRE(r.errors == 1);
  CHECK(r.messages[0].text ==
        "error: rule 1 (line 1): no recorded value of 'x' at destination 'x' at line 3, time 5..5");
}

TEST_CASE("failed probes are evaluation errors") {
  const std::string rules =
      "EXISTS D: destination FROM execute_program VALUE(int)(AT D 10 / x) == 1 SAY('x');";
  CHECK(report("var x;\nfunc main() {\n  x = 0;\n}\n", rules) ==
        "error: rule 1 (line 1): '10 / x' failed at destination 'x' at line 3, time 5..5: "
        "division by zero\n");
}

TEST_CASE("value casts") {
  const std::string prog = "var b;\nvar s;\nfunc main() {\n  b = true;\n  s = \"hi\";\n}\n";
  CHECK(report(prog,
               "EXISTS D: destination IS b FROM execute_program TRUE "
               "SAY(VALUE(int)(AT D b) VALUE(bool)(AT D b) VALUE(str)(AT D b) VALUE(bool)(AT D 7));") ==
        "1 TRUE true TRUE\n");
  CHECK(report(prog,
               "EXISTS D: destination IS s FROM execute_program TRUE SAY(VALUE(str)(AT D s) VALUE(int)(AT D s));") ==
        "error: rule 1 (line 1): cannot cast str value of 's'\n");
}
