#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace evtrace {

/// A MiniC runtime value: Int, Bool, Str or Unit.
class Value {
 public:
  enum class Type { Unit, Int, Bool, Str };

  Value() = default;
  static Value unit() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Storage(v)); }
  static Value boolean(bool v) { return Value(Storage(v)); }
  static Value string(std::string v) { return Value(Storage(std::move(v))); }

  Type type() const { return static_cast<Type>(data_.index()); }
  bool is_unit() const { return type() == Type::Unit; }
  bool is_int() const { return type() == Type::Int; }
  bool is_bool() const { return type() == Type::Bool; }
  bool is_str() const { return type() == Type::Str; }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }

  /// C truthiness: Int 0 is false, any other Int is true. Bool is itself.
  /// Throws std::invalid_argument for Str and Unit.
  bool truthy() const;

  /// Text used by print and by message rendering.
  std::string display() const;

  static const char* type_name(Type t);

  friend bool operator==(const Value&, const Value&) = default;

 private:
  using Storage = std::variant<std::monostate, std::int64_t, bool, std::string>;
  explicit Value(Storage s) : data_(std::move(s)) {}
  Storage data_;
};

}  // namespace evtrace
