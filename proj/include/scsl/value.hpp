#pragma once

// Dynamic values flowing through valuations, the expression evaluator,
// monitors, and the wire format. Values are ordered (total order) so that
// sets and witness enumeration are deterministic.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vendor_json.hpp"

namespace scsl {

enum class ValueKind {
  Null,
  Bool,
  Int,
  Real,
  Enum,     // enum type + literal index
  Token,    // opaque string token (ItemId)
  Record,   // composite type + field values
  Array,
  List,
  Set,      // kept sorted, no duplicates
  Object,   // object handle: canonical symbol path, e.g. "r[2]"
};

// Runtime error kinds; these abort the enclosing run as ILLEGAL-SCHEDULE.
enum class RuntimeErrorKind {
  NullDeref,
  UnboundSymbol,
  DivisionByZero,
  EmptyCollection,
  TypeMismatch,
  FrameViolation,
};

struct RuntimeError : std::runtime_error {
  RuntimeErrorKind error_kind;
  RuntimeError(RuntimeErrorKind k, const std::string& msg)
      : std::runtime_error(msg), error_kind(k) {}
};

class Value {
 public:
  Value() : kind_(ValueKind::Null) {}

  static Value null() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value real(double r);
  static Value enum_lit(std::string enum_name, int index, std::string literal);
  static Value token(std::string t);
  static Value record(std::string type_name, std::vector<std::pair<std::string, Value>> fields);
  static Value array(std::vector<Value> elems);
  static Value list(std::vector<Value> elems);
  static Value set(std::vector<Value> elems);  // sorts + dedups
  static Value object(std::string handle);

  ValueKind kind() const { return kind_; }
  bool is_null() const { return kind_ == ValueKind::Null; }

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_real() const;      // Int promotes to Real
  const std::string& token_value() const;
  const std::string& enum_name() const { return name_; }
  int enum_index() const { return static_cast<int>(int_); }
  const std::string& enum_literal() const { return str_; }
  const std::string& object_handle() const;
  const std::string& record_type() const { return name_; }

  const std::vector<Value>& elements() const;  // Array / List / Set
  std::vector<Value>& mutable_elements();
  const Value& field(const std::string& name) const;
  void set_field(const std::string& name, Value v);
  const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }

  bool operator==(const Value& o) const { return compare(o) == 0; }
  bool operator!=(const Value& o) const { return compare(o) != 0; }
  bool operator<(const Value& o) const { return compare(o) < 0; }
  int compare(const Value& o) const;

  std::string str() const;
  nlohmann::ordered_json to_json() const;
  static Value from_json(const nlohmann::ordered_json& j);

 private:
  ValueKind kind_;
  bool bool_ = false;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  std::string str_;   // token, enum literal, object handle
  std::string name_;  // enum type, record type
  std::vector<Value> elems_;
  std::vector<std::pair<std::string, Value>> fields_;
};

// Convenience constructor for the fixtures' 2-D locations.
Value make_location(double x, double y);

} // namespace scsl
