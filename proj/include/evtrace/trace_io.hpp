#pragma once

// Line-oriented text serialization of traces. The format is described in
// docs/trace-format.md.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evtrace/trace.hpp"

namespace evtrace {

inline constexpr const char* kTraceVersionLine = "#evtrace-trace v1";

struct TraceHeader {
  std::string source_name;
  std::string filter_summary;
  std::vector<std::string> probes;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct BeginRecord {
  EventId id = 0;
  EventKind kind = EventKind::ExStmt;
  std::string name;
  int source_line = 1;
  std::string enclosing_function;
  StepTime time = 0;
  std::optional<GroupTag> unordered_group;

  friend bool operator==(const BeginRecord&, const BeginRecord&) = default;
};

struct EndRecord {
  EventId id = 0;
  StepTime time = 0;
  std::vector<std::pair<std::string, ProbeValue>> probes;

  friend bool operator==(const EndRecord&, const EndRecord&) = default;
};

using TraceRecord = std::variant<BeginRecord, EndRecord>;

/// Begin and End records in emission (time) order.
std::vector<TraceRecord> to_records(const Trace& trace);

void write_records(std::ostream& out, const TraceHeader& header,
                   const std::vector<TraceRecord>& records);

/// Writes `trace` with `header`. The header's source name is taken from the
/// trace when left empty.
void write_trace(std::ostream& out, const Trace& trace, TraceHeader header = {});

enum class TraceFormatCode {
  VersionMismatch,
  UnbalancedBrackets,
  DuplicateId,
  MalformedRecord,
};

const char* code_name(TraceFormatCode code);

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(TraceFormatCode code, std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " +
                           code_name(code) + ": " + message),
        code_(code),
        line_(line) {}

  TraceFormatCode code() const { return code_; }
  std::size_t line() const { return line_; }

 private:
  TraceFormatCode code_;
  std::size_t line_;
};

struct TraceFile {
  TraceHeader header;
  Trace trace;
};

/// Single pass over `in`; parents are rebuilt from bracket nesting. Throws
/// TraceFormatError.
TraceFile read_trace(std::istream& in);

}  // namespace evtrace
