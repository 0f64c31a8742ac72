#include "operations.hpp"

#include <cstdint>
#include <limits>

#include "evtrace/error.hpp"

namespace evtrace::minic::ops {

ProgramIo::ProgramIo(std::string_view input) : input_(input) {}

std::string ProgramIo::next_line() {
  if (pos_ >= input_.size()) return {};
  const std::size_t nl = input_.find('\n', pos_);
  const std::size_t end = nl == std::string::npos ? input_.size() : nl + 1;
  std::string line = input_.substr(pos_, end - pos_);
  pos_ = end;
  return line;
}

namespace {

[[noreturn]] void type_error(const std::string& what, const Value& a, int line) {
  throw RuntimeError(what + " applied to " + Value::type_name(a.type()), line);
}

[[noreturn]] void type_error(std::string_view op, const Value& a,
                             const Value& b, int line) {
  throw RuntimeError("operator " + std::string(op) + " applied to " +
                         Value::type_name(a.type()) + " and " +
                         Value::type_name(b.type()),
                     line);
}

bool numeric(const Value& v) { return v.is_int() || v.is_bool(); }

std::int64_t as_number(const Value& v) {
  return v.is_int() ? v.as_int() : (v.as_bool() ? 1 : 0);
}

// Two's-complement wrap-around instead of signed overflow.
std::int64_t wrap(std::uint64_t u) { return static_cast<std::int64_t>(u); }

Value arithmetic(BinaryOp op, std::int64_t a, std::int64_t b, int line) {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case BinaryOp::Add: return Value::integer(wrap(ua + ub));
    case BinaryOp::Sub: return Value::integer(wrap(ua - ub));
    case BinaryOp::Mul: return Value::integer(wrap(ua * ub));
    case BinaryOp::Div:
    case BinaryOp::Mod:
      if (b == 0) throw RuntimeError("division by zero", line);
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
        return Value::integer(op == BinaryOp::Div ? a : 0);
      }
      return Value::integer(op == BinaryOp::Div ? a / b : a % b);
    default:
      break;
  }
  return Value::unit();
}

template <class T>
Value compare(BinaryOp op, const T& a, const T& b) {
  switch (op) {
    case BinaryOp::Lt: return Value::boolean(a < b);
    case BinaryOp::Le: return Value::boolean(a <= b);
    case BinaryOp::Gt: return Value::boolean(a > b);
    case BinaryOp::Ge: return Value::boolean(a >= b);
    case BinaryOp::Eq: return Value::boolean(a == b);
    case BinaryOp::Ne: return Value::boolean(a != b);
    default: return Value::unit();
  }
}

std::int64_t int_arg(std::string_view fn, const Value& v, int line) {
  if (!v.is_int()) {
    throw RuntimeError(std::string(fn) + " expects an int argument, got " +
                           Value::type_name(v.type()),
                       line);
  }
  return v.as_int();
}

const std::string& str_arg(std::string_view fn, const Value& v, int line) {
  if (!v.is_str()) {
    throw RuntimeError(std::string(fn) + " expects a str argument, got " +
                           Value::type_name(v.type()),
                       line);
  }
  return v.as_str();
}

std::string format(std::span<const Value> args, int line) {
  const std::string& fmt = str_arg("printf", args[0], line);
  std::string out;
  std::size_t next = 1;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out.push_back(fmt[i]);
      continue;
    }
    if (++i >= fmt.size()) throw RuntimeError("printf: dangling '%'", line);
    const char spec = fmt[i];
    if (spec == '%') {
      out.push_back('%');
      continue;
    }
    if (next >= args.size()) {
      throw RuntimeError("printf: too few arguments for format", line);
    }
    const Value& a = args[next++];
    if (spec == 'd') {
      if (!numeric(a)) throw RuntimeError("printf: %d expects an int", line);
      out += std::to_string(as_number(a));
    } else if (spec == 's') {
      out += a.display();
    } else if (spec == 'c') {
      out.push_back(static_cast<char>(int_arg("printf", a, line)));
    } else {
      throw RuntimeError(std::string("printf: unknown conversion %") + spec,
                         line);
    }
  }
  if (next != args.size()) {
    throw RuntimeError("printf: too many arguments for format", line);
  }
  return out;
}

}  // namespace

Value binary(BinaryOp op, const Value& lhs, const Value& rhs, int line) {
  const std::string_view spelling = op_spelling(op);
  switch (op) {
    case BinaryOp::Add:
      if (lhs.is_str() && rhs.is_str()) {
        return Value::string(lhs.as_str() + rhs.as_str());
      }
      [[fallthrough]];
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
      if (!lhs.is_int() || !rhs.is_int()) type_error(spelling, lhs, rhs, line);
      return arithmetic(op, lhs.as_int(), rhs.as_int(), line);
    case BinaryOp::And:
    case BinaryOp::Or: {
      const bool a = condition(lhs, line);
      const bool b = condition(rhs, line);
      return Value::boolean(op == BinaryOp::And ? (a && b) : (a || b));
    }
    default:
      if (numeric(lhs) && numeric(rhs)) {
        return compare(op, as_number(lhs), as_number(rhs));
      }
      if (lhs.is_str() && rhs.is_str()) {
        return compare(op, lhs.as_str(), rhs.as_str());
      }
      type_error(spelling, lhs, rhs, line);
  }
}

Value unary(UnaryOp op, const Value& v, int line) {
  if (op == UnaryOp::Not) return Value::boolean(!condition(v, line));
  if (!v.is_int()) type_error("unary -", v, line);
  return Value::integer(wrap(0 - static_cast<std::uint64_t>(v.as_int())));
}

bool condition(const Value& v, int line) {
  if (!numeric(v)) type_error("condition", v, line);
  return as_number(v) != 0;
}

Value call_builtin(std::string_view name, std::span<const Value> args,
                   ProgramIo& io, int line) {
  if (name == "print") {
    std::string text;
    for (const Value& a : args) text += a.display();
    text.push_back('\n');
    io.output() += text;
    return Value::integer(static_cast<std::int64_t>(text.size()));
  }
  if (name == "printf") {
    const std::string text = format(args, line);
    io.output() += text;
    return Value::integer(static_cast<std::int64_t>(text.size()));
  }
  if (name == "strlen") {
    return Value::integer(
        static_cast<std::int64_t>(str_arg(name, args[0], line).size()));
  }
  if (name == "getline") return Value::string(io.next_line());
  if (name == "substr") {
    const std::string& s = str_arg(name, args[0], line);
    const std::int64_t start = int_arg(name, args[1], line);
    const std::int64_t count = int_arg(name, args[2], line);
    if (start < 0 || count < 0 || static_cast<std::uint64_t>(start) > s.size()) {
      throw RuntimeError("string index out of range", line);
    }
    return Value::string(s.substr(static_cast<std::size_t>(start),
                                  static_cast<std::size_t>(count)));
  }
  if (name == "char_at") {
    const std::string& s = str_arg(name, args[0], line);
    const std::int64_t i = int_arg(name, args[1], line);
    if (i < 0 || static_cast<std::uint64_t>(i) >= s.size()) {
      throw RuntimeError("string index out of range", line);
    }
    return Value::integer(static_cast<unsigned char>(s[static_cast<std::size_t>(i)]));
  }
  if (name == "to_str") return Value::string(args[0].display());
  throw RuntimeError("unknown builtin '" + std::string(name) + "'", line);
}

}  // namespace evtrace::minic::ops
