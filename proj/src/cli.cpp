#include "evtrace/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "evtrace/error.hpp"
#include "evtrace/forman/eval.hpp"
#include "evtrace/forman/filter.hpp"
#include "evtrace/forman/parser.hpp"
#include "evtrace/minic/interpreter.hpp"
#include "evtrace/minic/parser.hpp"
#include "evtrace/trace_io.hpp"

namespace evtrace {

namespace {

// Reported by the subcommands below; carries an already formatted message.
struct CliError {
  std::string message;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{"cannot open '" + path + "'"};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::uint64_t max_events_from_env() {
  const char* raw = std::getenv("EVTRACE_MAX_EVENTS");
  if (raw == nullptr || *raw == '\0') return minic::kDefaultMaxEvents;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw CliError{"EVTRACE_MAX_EVENTS must be a positive integer, got '" +
                   std::string(s) + "'"};
  }
  return v;
}

minic::Program load_program(const std::string& path) {
  const std::string source = read_file(path);
  const std::string name = std::filesystem::path(path).stem().string();
  try {
    return minic::parse_program(source, name.empty() ? "main" : name);
  } catch (const SemanticError& e) {
    throw CliError{path + ":" + e.what() + " (semantic error)"};
  } catch (const SyntaxError& e) {
    throw CliError{path + ":" + e.what() + " (syntax error)"};
  }
}

forman::RuleSet load_rules(const std::string& path) {
  const std::string source = read_file(path);
  try {
    return forman::parse_rules(source);
  } catch (const SemanticError& e) {
    throw CliError{path + ":" + e.what() + " (rule error)"};
  } catch (const SyntaxError& e) {
    throw CliError{path + ":" + e.what() + " (rule syntax error)"};
  }
}

TraceFile load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{"cannot open '" + path + "'"};
  try {
    return read_trace(in);
  } catch (const TraceFormatError& e) {
    throw CliError{path + ": " + e.what()};
  }
}

struct Session {
  std::string program_path;
  std::string rules_path;
  std::string input_path;
  std::string trace_path;
  std::string report_path;
  bool no_filter = false;
};

struct Execution {
  minic::RunResult result;
  TraceHeader header;
};

Execution run_instrumented(const Session& s, const minic::Program& program,
                           const forman::RuleSet* rules) {
  minic::ExecOptions options;
  options.max_events = max_events_from_env();
  if (!s.input_path.empty()) options.input = read_file(s.input_path);
  if (rules != nullptr) {
    FilterPlan plan = derive_footprint(*rules);
    options.probes = std::move(plan.probes);
    if (!s.no_filter) options.filter = std::move(plan.filter);
  }
  try {
    minic::check_probes(program, options.probes);
  } catch (const SyntaxError& e) {
    throw CliError{s.rules_path + ": probe " + e.bare_message()};
  }
  Execution ex;
  ex.header.source_name = program.name;
  ex.header.filter_summary = options.filter.summary();
  for (const auto& p : options.probes) {
    auto& texts = ex.header.probes;
    if (std::find(texts.begin(), texts.end(), p.expr_text) == texts.end()) {
      texts.push_back(p.expr_text);
    }
  }
  ex.result = minic::execute(program, options);
  return ex;
}

void report_failure(std::ostream& err, const std::string& path,
                    const minic::RunFailure& f) {
  err << "evtrace: " << path << ":" << f.line << ": runtime error: " << f.message
      << "\n";
}

int report_rules(const Trace& trace, const forman::RuleSet& rules,
                 const std::string& report_path, std::ostream& out,
                 std::ostream& err) {
  const forman::Report report = forman::run_rules(trace, rules);
  if (report_path.empty()) {
    out << report.text();
  } else {
    std::ofstream file(report_path, std::ios::binary);
    if (!file) throw CliError{"cannot write '" + report_path + "'"};
    file << report.text();
  }
  if (report.errors > 0) {
    err << "evtrace: " << report.errors << " rule evaluation error(s)\n";
    return kExitError;
  }
  return report.onfail_fired > 0 ? kExitOnFail : kExitOk;
}

void write_trace_file(const std::string& path, const Execution& ex, std::ostream& out) {
  if (path.empty() || path == "-") {
    write_trace(out, ex.result.trace, ex.header);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw CliError{"cannot write '" + path + "'"};
  write_trace(file, ex.result.trace, ex.header);
}

int cmd_check(const Session& s, std::ostream& out, std::ostream& err) {
  const minic::Program program = load_program(s.program_path);
  const forman::RuleSet rules = load_rules(s.rules_path);
  const Execution ex = run_instrumented(s, program, &rules);
  out << ex.result.program_output;
  int status = kExitOk;
  if (ex.result.failure) {
    report_failure(err, s.program_path, *ex.result.failure);
    status = kExitError;
  }
  if (!s.trace_path.empty()) write_trace_file(s.trace_path, ex, out);
  const int rule_status = report_rules(ex.result.trace, rules, s.report_path, out, err);
  return std::max(status, rule_status);
}

int cmd_run(const Session& s, std::ostream& out, std::ostream& err) {
  const minic::Program program = load_program(s.program_path);
  const std::string input = s.input_path.empty() ? "" : read_file(s.input_path);
  const minic::PlainResult r = minic::run_plain(program, input);
  out << r.output;
  if (r.failure) {
    report_failure(err, s.program_path, *r.failure);
    return kExitError;
  }
  return kExitOk;
}

int cmd_trace(const Session& s, std::ostream& out, std::ostream& err) {
  const minic::Program program = load_program(s.program_path);
  std::optional<forman::RuleSet> rules;
  if (!s.rules_path.empty()) rules = load_rules(s.rules_path);
  const Execution ex = run_instrumented(s, program, rules ? &*rules : nullptr);
  const bool trace_on_stdout = s.trace_path.empty() || s.trace_path == "-";
  (trace_on_stdout ? err : out) << ex.result.program_output;
  write_trace_file(s.trace_path, ex, out);
  if (ex.result.failure) {
    report_failure(err, s.program_path, *ex.result.failure);
    return kExitError;
  }
  return kExitOk;
}

int cmd_query(const Session& s, std::ostream& out, std::ostream& err) {
  const TraceFile file = load_trace(s.trace_path);
  const forman::RuleSet rules = load_rules(s.rules_path);
  return report_rules(file.trace, rules, s.report_path, out, err);
}

int cmd_stats(const Session& s, std::ostream& out, std::ostream& err) {
  const minic::Program program = load_program(s.program_path);
  std::optional<forman::RuleSet> rules;
  if (!s.rules_path.empty()) rules = load_rules(s.rules_path);
  Session effective = s;
  if (!rules) effective.no_filter = true;
  const Execution ex = run_instrumented(effective, program, rules ? &*rules : nullptr);
  const minic::RunResult& r = ex.result;
  const double ratio = r.events_generated() == 0
                           ? 0.0
                           : static_cast<double>(r.events_emitted) /
                                 static_cast<double>(r.events_generated());
  std::ostringstream ratio_text;
  ratio_text << std::fixed << std::setprecision(4) << ratio;
  out << "filter: " << ex.header.filter_summary << "\n";
  out << "steps: " << r.steps << "\n";
  out << "events generated: " << r.events_generated() << "\n";
  out << "events emitted: " << r.events_emitted << "\n";
  out << "events suppressed: " << r.events_suppressed << "\n";
  out << "emitted ratio: " << ratio_text.str() << "\n";
  out << "kind generated emitted\n";
  for (int k = 0; k < kEventKindCount; ++k) {
    out << kind_name(static_cast<EventKind>(k)) << " " << r.generated_by_kind[k]
        << " " << r.emitted_by_kind[k] << "\n";
  }
  if (r.failure) {
    report_failure(err, s.program_path, *r.failure);
    return kExitError;
  }
  return kExitOk;
}

int cmd_validate(const Session& s, std::ostream& out, std::ostream&) {
  const TraceFile file = load_trace(s.trace_path);
  const GrammarReport report = validate_grammar(file.trace);
  if (report.ok) {
    out << "ok: " << file.trace.size() << " events conform to the event grammar\n";
    return kExitOk;
  }
  if (file.header.filter_summary != Filter::all().summary()) {
    out << "note: filtered trace (" << file.header.filter_summary
        << "); suppressed events break grammar nesting\n";
  }
  for (const auto& v : report.violations) {
    const Event& e = file.trace.at(v.event);
    out << "event " << v.event << " (" << kind_name(e.kind) << " '" << e.name
        << "', line " << e.source_line << "): rule " << v.rule << ": " << v.message
        << "\n";
  }
  return kExitOnFail;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-grammar trace recorder and rule checker for MiniC programs",
               "evtrace"};
  app.require_subcommand(1);
  Session s;

  auto* check = app.add_subcommand("check", "Run a program and check rules against its trace");
  check->add_option("program", s.program_path, "MiniC source file")->required();
  check->add_option("rules", s.rules_path, "Rule file")->required();
  check->add_option("--stdin,--input", s.input_path, "File supplying program input ('-' for stdin)");
  check->add_flag("--no-filter", s.no_filter, "Record every event");
  check->add_option("--trace-out", s.trace_path, "Also write the trace to this file");
  check->add_option("--report", s.report_path, "Write rule messages to this file");

  auto* run = app.add_subcommand("run", "Run a program without instrumentation");
  run->add_option("program", s.program_path, "MiniC source file")->required();
  run->add_option("--stdin,--input", s.input_path, "File supplying program input ('-' for stdin)");

  auto* trace = app.add_subcommand("trace", "Run a program and write its trace");
  trace->add_option("program", s.program_path, "MiniC source file")->required();
  trace->add_option("rules", s.rules_path, "Rule file used to derive the filter and probes");
  trace->add_option("--stdin,--input", s.input_path, "File supplying program input ('-' for stdin)");
  trace->add_flag("--no-filter", s.no_filter, "Record every event");
  trace->add_option("--trace-out,-o", s.trace_path, "Output file (default: standard output)");

  auto* query = app.add_subcommand("query", "Check rules against a saved trace");
  query->add_option("trace", s.trace_path, "Trace file")->required();
  query->add_option("rules", s.rules_path, "Rule file")->required();
  query->add_option("--report", s.report_path, "Write rule messages to this file");

  auto* stats = app.add_subcommand("stats", "Print event counts for a run");
  stats->add_option("program", s.program_path, "MiniC source file")->required();
  stats->add_option("rules", s.rules_path, "Rule file used to derive the filter");
  stats->add_option("--stdin,--input", s.input_path, "File supplying program input ('-' for stdin)");
  stats->add_flag("--no-filter", s.no_filter, "Record every event");

  auto* validate = app.add_subcommand("validate", "Check a saved trace against the event grammar");
  validate->add_option("trace", s.trace_path, "Trace file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "evtrace: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (check->parsed()) return cmd_check(s, out, err);
    if (run->parsed()) return cmd_run(s, out, err);
    if (trace->parsed()) return cmd_trace(s, out, err);
    if (query->parsed()) return cmd_query(s, out, err);
    if (stats->parsed()) return cmd_stats(s, out, err);
    if (validate->parsed()) return cmd_validate(s, out, err);
  } catch (const CliError& e) {
    err << "evtrace: " << e.message << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "evtrace: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace evtrace
