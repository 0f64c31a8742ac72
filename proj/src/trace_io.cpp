#include "evtrace/trace_io.hpp"

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

namespace evtrace {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::optional<std::string> unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i == s.size()) return std::nullopt;
    switch (s[i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

std::string encode_value(const ProbeValue& p) {
  if (!p.ok()) return "!:" + escape(p.error);
  const Value& v = *p.value;
  switch (v.type()) {
    case Value::Type::Unit: return "u:";
    case Value::Type::Int: return "i:" + std::to_string(v.as_int());
    case Value::Type::Bool: return v.as_bool() ? "b:true" : "b:false";
    case Value::Type::Str: return "s:" + escape(v.as_str());
  }
  return "u:";
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<ProbeValue> decode_value(std::string_view s) {
  if (s.size() < 2 || s[1] != ':') return std::nullopt;
  const std::string_view body = s.substr(2);
  ProbeValue p;
  switch (s[0]) {
    case 'u':
      if (!body.empty()) return std::nullopt;
      p.value = Value::unit();
      return p;
    case 'i': {
      auto n = parse_number<std::int64_t>(body);
      if (!n) return std::nullopt;
      p.value = Value::integer(*n);
      return p;
    }
    case 'b':
      if (body != "true" && body != "false") return std::nullopt;
      p.value = Value::boolean(body == "true");
      return p;
    case 's': {
      auto text = unescape(body);
      if (!text) return std::nullopt;
      p.value = Value::string(std::move(*text));
      return p;
    }
    case '!': {
      auto text = unescape(body);
      if (!text) return std::nullopt;
      p.error = std::move(*text);
      return p;
    }
    default:
      return std::nullopt;
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string id_list(const std::vector<EventId>& ids) {
  std::string out;
  for (EventId id : ids) {
    if (!out.empty()) out += ", ";
    out += std::to_string(id);
  }
  return out;
}

}  // namespace

const char* code_name(TraceFormatCode code) {
  switch (code) {
    case TraceFormatCode::VersionMismatch: return "version mismatch";
    case TraceFormatCode::UnbalancedBrackets: return "unbalanced brackets";
    case TraceFormatCode::DuplicateId: return "duplicate id";
    case TraceFormatCode::MalformedRecord: return "malformed record";
  }
  return "?";
}

std::vector<TraceRecord> to_records(const Trace& trace) {
  std::vector<TraceRecord> out;
  out.reserve(trace.size() * 2);
  std::vector<EventId> open;
  auto close = [&](EventId id) {
    const Event& e = trace.at(id);
    EndRecord r{id, e.end_time, {}};
    for (const auto& [text, value] : e.probes) r.probes.emplace_back(text, value);
    out.emplace_back(std::move(r));
  };
  for (const Event& e : trace.events()) {
    while (!open.empty() && trace.subtree_end(open.back()) < e.id) {
      close(open.back());
      open.pop_back();
    }
    out.emplace_back(BeginRecord{e.id, e.kind, e.name, e.source_line,
                                 e.enclosing_function, e.begin_time,
                                 e.unordered_group});
    open.push_back(e.id);
  }
  while (!open.empty()) {
    close(open.back());
    open.pop_back();
  }
  return out;
}

void write_records(std::ostream& out, const TraceHeader& header,
                   const std::vector<TraceRecord>& records) {
  out << kTraceVersionLine << '\n';
  out << "#source\t" << escape(header.source_name) << '\n';
  out << "#filter\t" << escape(header.filter_summary) << '\n';
  for (const auto& p : header.probes) out << "#probe\t" << escape(p) << '\n';
  for (const auto& rec : records) {
    if (const auto* b = std::get_if<BeginRecord>(&rec)) {
      out << "B\t" << b->id << '\t' << kind_name(b->kind) << '\t' << b->source_line
          << '\t' << b->time << '\t';
      if (b->unordered_group) {
        out << *b->unordered_group;
      } else {
        out << '-';
      }
      out << '\t' << escape(b->enclosing_function) << '\t' << escape(b->name) << '\n';
    } else {
      const auto& e = std::get<EndRecord>(rec);
      out << "E\t" << e.id << '\t' << e.time;
      for (const auto& [text, value] : e.probes) {
        out << '\t' << escape(text) << '\t' << encode_value(value);
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed to write trace");
}

void write_trace(std::ostream& out, const Trace& trace, TraceHeader header) {
  if (header.source_name.empty()) header.source_name = trace.source_name();
  write_records(out, header, to_records(trace));
}

TraceFile read_trace(std::istream& in) {
  TraceFile file;
  std::string line;
  std::size_t lineno = 0;

  auto fail = [&](TraceFormatCode code, const std::string& msg) {
    throw TraceFormatError(code, lineno, msg);
  };

  if (!std::getline(in, line)) {
    fail(TraceFormatCode::VersionMismatch, "empty file, expected '" +
                                               std::string(kTraceVersionLine) + "'");
  }
  ++lineno;
  if (line != kTraceVersionLine) {
    fail(TraceFormatCode::VersionMismatch,
         "expected '" + std::string(kTraceVersionLine) + "', found '" + line + "'");
  }

  std::vector<Event> events;
  std::vector<EventId> open;
  std::vector<char> closed;
  bool records_started = false;
  bool root_closed = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (line[0] == '#') {
      if (records_started) fail(TraceFormatCode::MalformedRecord, "header line after records");
      auto value = fields.size() == 2 ? unescape(fields[1]) : std::nullopt;
      if (!value) fail(TraceFormatCode::MalformedRecord, "bad header line");
      if (fields[0] == "#source") {
        file.header.source_name = std::move(*value);
      } else if (fields[0] == "#filter") {
        file.header.filter_summary = std::move(*value);
      } else if (fields[0] == "#probe") {
        file.header.probes.push_back(std::move(*value));
      }
      continue;
    }
    records_started = true;

    if (fields[0] == "B") {
      if (fields.size() != 8) fail(TraceFormatCode::MalformedRecord, "Begin record needs 8 fields");
      const auto id = parse_number<EventId>(fields[1]);
      const auto kind = kind_from_name(fields[2]);
      const auto src_line = parse_number<int>(fields[3]);
      const auto time = parse_number<StepTime>(fields[4]);
      auto fn = unescape(fields[6]);
      auto name = unescape(fields[7]);
      std::optional<GroupTag> group;
      if (fields[5] != "-") {
        group = parse_number<GroupTag>(fields[5]);
        if (!group) fail(TraceFormatCode::MalformedRecord, "bad group tag");
      }
      if (!id || !kind || !src_line || !time || !fn || !name) {
        fail(TraceFormatCode::MalformedRecord, "bad Begin record field");
      }
      if (*id < events.size()) {
        fail(TraceFormatCode::DuplicateId, "event " + std::to_string(*id) + " begins twice");
      }
      if (*id != events.size()) {
        fail(TraceFormatCode::MalformedRecord,
             "expected event id " + std::to_string(events.size()) + ", found " +
                 std::to_string(*id));
      }
      if (root_closed) fail(TraceFormatCode::MalformedRecord, "record after the root closed");
      Event e;
      e.id = *id;
      e.kind = *kind;
      e.name = std::move(*name);
      e.source_line = *src_line;
      e.enclosing_function = std::move(*fn);
      e.begin_time = *time;
      e.unordered_group = group;
      if (!open.empty()) e.parent = open.back();
      events.push_back(std::move(e));
      closed.push_back(0);
      open.push_back(*id);
    } else if (fields[0] == "E") {
      if (fields.size() < 3 || fields.size() % 2 == 0) {
        fail(TraceFormatCode::MalformedRecord, "End record has a bad field count");
      }
      const auto id = parse_number<EventId>(fields[1]);
      const auto time = parse_number<StepTime>(fields[2]);
      if (!id || !time) fail(TraceFormatCode::MalformedRecord, "bad End record field");
      if (*id >= events.size()) {
        fail(TraceFormatCode::MalformedRecord,
             "End before Begin for event " + std::to_string(*id));
      }
      if (closed[*id]) {
        fail(TraceFormatCode::DuplicateId, "event " + std::to_string(*id) + " ends twice");
      }
      if (open.back() != *id) {
        fail(TraceFormatCode::UnbalancedBrackets,
             "End of event " + std::to_string(*id) + " while open events are " +
                 id_list(open));
      }
      Event& e = events[*id];
      e.end_time = *time;
      for (std::size_t i = 3; i < fields.size(); i += 2) {
        auto text = unescape(fields[i]);
        auto value = decode_value(fields[i + 1]);
        if (!text || !value) fail(TraceFormatCode::MalformedRecord, "bad probe value");
        e.probes[std::move(*text)] = std::move(*value);
      }
      closed[*id] = 1;
      open.pop_back();
      if (open.empty()) root_closed = true;
    } else {
      fail(TraceFormatCode::MalformedRecord, "unknown record type '" + std::string(fields[0]) + "'");
    }
  }
  if (in.bad()) fail(TraceFormatCode::MalformedRecord, "read error");
  if (!open.empty()) {
    fail(TraceFormatCode::UnbalancedBrackets, "missing End records for events " + id_list(open));
  }
  if (events.empty()) fail(TraceFormatCode::MalformedRecord, "no records");
  try {
    file.trace = Trace(file.header.source_name, std::move(events));
  } catch (const std::invalid_argument& e) {
    fail(TraceFormatCode::MalformedRecord, e.what());
  }
  return file;
}

}  // namespace evtrace
