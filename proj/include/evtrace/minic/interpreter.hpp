#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evtrace/forman/filter.hpp"
#include "evtrace/minic/ast.hpp"
#include "evtrace/trace.hpp"

namespace evtrace::minic {

inline constexpr std::uint64_t kDefaultMaxEvents = 5'000'000;

struct ExecOptions {
  std::string input;
  Filter filter = Filter::all();
  std::vector<ProbeRequest> probes;
  /// Cap on generated events, recorded or not.
  std::uint64_t max_events = kDefaultMaxEvents;
};

struct RunFailure {
  std::string message;
  int line = 0;
  /// Innermost recorded event open when the failure happened.
  std::optional<EventId> event;
};

struct RunResult {
  Trace trace;
  std::string program_output;
  StepTime steps = 0;
  std::uint64_t events_emitted = 0;
  std::uint64_t events_suppressed = 0;
  std::array<std::uint64_t, kEventKindCount> generated_by_kind{};
  std::array<std::uint64_t, kEventKindCount> emitted_by_kind{};
  std::optional<RunFailure> failure;

  std::uint64_t events_generated() const {
    return events_emitted + events_suppressed;
  }
};

/// Checks that every probe only names globals, variables of the function
/// its target is restricted to (any function otherwise), and callable
/// functions. Throws SemanticError.
void check_probes(const Program& program, const std::vector<ProbeRequest>& probes);

/// Runs `program` while recording the event trace. Target-program runtime
/// errors do not throw: the trace is closed and `failure` is set.
RunResult execute(const Program& program, const ExecOptions& options);

struct PlainResult {
  std::string output;
  std::optional<RunFailure> failure;
};

/// Per-node execution counts, keyed by Expr* or Stmt*.
using VisitCounts = std::unordered_map<const void*, std::uint64_t>;

/// Notified before and after the reference interpreter evaluates an
/// expression or executes a statement. Nodes are Expr* or Stmt*. Function
/// bodies are not reported as statements.
class PlainObserver {
 public:
  virtual ~PlainObserver() = default;
  virtual void enter(const void* /*node*/) {}
  virtual void leave(const void* /*node*/) {}
};

/// Reference interpreter with no event machinery.
PlainResult run_plain(const Program& program, std::string_view input,
                      PlainObserver* observer);
PlainResult run_plain(const Program& program, std::string_view input,
                      VisitCounts* visits = nullptr);

}  // namespace evtrace::minic
