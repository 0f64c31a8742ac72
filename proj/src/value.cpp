#include "evtrace/value.hpp"

#include <stdexcept>

namespace evtrace {

bool Value::truthy() const {
  switch (type()) {
    case Type::Int:
      return as_int() != 0;
    case Type::Bool:
      return as_bool();
    default:
      throw std::invalid_argument(std::string("a ") + type_name(type()) +
                                  " value has no truth value");
  }
}

std::string Value::display() const {
  switch (type()) {
    case Type::Unit:
      return "()";
    case Type::Int:
      return std::to_string(as_int());
    case Type::Bool:
      return as_bool() ? "true" : "false";
    case Type::Str:
      return as_str();
  }
  return {};
}

const char* Value::type_name(Type t) {
  switch (t) {
    case Type::Unit:
      return "unit";
    case Type::Int:
      return "int";
    case Type::Bool:
      return "bool";
    case Type::Str:
      return "str";
  }
  return "?";
}

}  // namespace evtrace
