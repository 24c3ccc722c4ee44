#include "scsl/value.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scsl {

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = ValueKind::Bool;
  v.bool_ = b;
  return v;
}
Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = ValueKind::Int;
  v.int_ = i;
  return v;
}
Value Value::real(double r) {
  Value v;
  v.kind_ = ValueKind::Real;
  v.real_ = r;
  return v;
}
Value Value::enum_lit(std::string enum_name, int index, std::string literal) {
  Value v;
  v.kind_ = ValueKind::Enum;
  v.name_ = std::move(enum_name);
  v.int_ = index;
  v.str_ = std::move(literal);
  return v;
}
Value Value::token(std::string t) {
  Value v;
  v.kind_ = ValueKind::Token;
  v.str_ = std::move(t);
  return v;
}
Value Value::record(std::string type_name, std::vector<std::pair<std::string, Value>> fields) {
  Value v;
  v.kind_ = ValueKind::Record;
  v.name_ = std::move(type_name);
  v.fields_ = std::move(fields);
  return v;
}
Value Value::array(std::vector<Value> elems) {
  Value v;
  v.kind_ = ValueKind::Array;
  v.elems_ = std::move(elems);
  return v;
}
Value Value::list(std::vector<Value> elems) {
  Value v;
  v.kind_ = ValueKind::List;
  v.elems_ = std::move(elems);
  return v;
}
Value Value::set(std::vector<Value> elems) {
  Value v;
  v.kind_ = ValueKind::Set;
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end(),
                          [](const Value& a, const Value& b) { return a.compare(b) == 0; }),
              elems.end());
  v.elems_ = std::move(elems);
  return v;
}
Value Value::object(std::string handle) {
  Value v;
  v.kind_ = ValueKind::Object;
  v.str_ = std::move(handle);
  return v;
}

bool Value::as_bool() const {
  if (kind_ != ValueKind::Bool)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected bool, got " + str());
  return bool_;
}
std::int64_t Value::as_int() const {
  if (kind_ != ValueKind::Int)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected int, got " + str());
  return int_;
}
double Value::as_real() const {
  if (kind_ == ValueKind::Int) return static_cast<double>(int_);
  if (kind_ != ValueKind::Real)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected real, got " + str());
  return real_;
}
const std::string& Value::token_value() const {
  if (kind_ != ValueKind::Token)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected token, got " + str());
  return str_;
}
const std::string& Value::object_handle() const {
  if (kind_ != ValueKind::Object)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected object handle, got " + str());
  return str_;
}
const std::vector<Value>& Value::elements() const {
  if (kind_ != ValueKind::Array && kind_ != ValueKind::List && kind_ != ValueKind::Set)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected collection, got " + str());
  return elems_;
}
std::vector<Value>& Value::mutable_elements() {
  if (kind_ != ValueKind::Array && kind_ != ValueKind::List && kind_ != ValueKind::Set)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "expected collection, got " + str());
  return elems_;
}
const Value& Value::field(const std::string& name) const {
  if (kind_ == ValueKind::Null)
    throw RuntimeError(RuntimeErrorKind::NullDeref, "field access '" + name + "' through null");
  if (kind_ != ValueKind::Record)
    throw RuntimeError(RuntimeErrorKind::TypeMismatch, "field access on non-record " + str());
  for (const auto& f : fields_)
    if (f.first == name) return f.second;
  throw RuntimeError(RuntimeErrorKind::UnboundSymbol, "no field '" + name + "' in " + name_);
}
void Value::set_field(const std::string& name, Value v) {
  for (auto& f : fields_)
    if (f.first == name) {
      f.second = std::move(v);
      return;
    }
  fields_.emplace_back(name, std::move(v));
}

int Value::compare(const Value& o) const {
  // ints and reals compare numerically across kinds
  auto numeric = [](const Value& v) {
    return v.kind_ == ValueKind::Int || v.kind_ == ValueKind::Real;
  };
  if (numeric(*this) && numeric(o)) {
    if (kind_ == ValueKind::Int && o.kind_ == ValueKind::Int)
      return int_ < o.int_ ? -1 : int_ > o.int_ ? 1 : 0;
    double a = as_real(), b = o.as_real();
    return a < b ? -1 : a > b ? 1 : 0;
  }
  if (kind_ != o.kind_)
    return static_cast<int>(kind_) < static_cast<int>(o.kind_) ? -1 : 1;
  switch (kind_) {
    case ValueKind::Null: return 0;
    case ValueKind::Bool: return bool_ == o.bool_ ? 0 : (bool_ ? 1 : -1);
    case ValueKind::Enum: {
      if (int c = name_.compare(o.name_)) return c < 0 ? -1 : 1;
      return int_ < o.int_ ? -1 : int_ > o.int_ ? 1 : 0;
    }
    case ValueKind::Token:
    case ValueKind::Object: {
      int c = str_.compare(o.str_);
      return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    case ValueKind::Record: {
      if (int c = name_.compare(o.name_)) return c < 0 ? -1 : 1;
      std::size_t n = std::min(fields_.size(), o.fields_.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = fields_[i].first.compare(o.fields_[i].first)) return c < 0 ? -1 : 1;
        if (int c = fields_[i].second.compare(o.fields_[i].second)) return c;
      }
      return fields_.size() < o.fields_.size() ? -1 : fields_.size() > o.fields_.size() ? 1 : 0;
    }
    case ValueKind::Array:
    case ValueKind::List:
    case ValueKind::Set: {
      std::size_t n = std::min(elems_.size(), o.elems_.size());
      for (std::size_t i = 0; i < n; ++i)
        if (int c = elems_[i].compare(o.elems_[i])) return c;
      return elems_.size() < o.elems_.size() ? -1 : elems_.size() > o.elems_.size() ? 1 : 0;
    }
    default: return 0;
  }
}

std::string Value::str() const {
  std::ostringstream os;
  switch (kind_) {
    case ValueKind::Null: os << "null"; break;
    case ValueKind::Bool: os << (bool_ ? "true" : "false"); break;
    case ValueKind::Int: os << int_; break;
    case ValueKind::Real: {
      double r = real_;
      if (r == std::floor(r) && std::abs(r) < 1e15)
        os << static_cast<std::int64_t>(r) << ".0";
      else
        os << r;
      break;
    }
    case ValueKind::Enum: os << str_; break;
    case ValueKind::Token: os << '"' << str_ << '"'; break;
    case ValueKind::Object: os << str_; break;
    case ValueKind::Record: {
      os << "(";
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) os << ", ";
        os << fields_[i].second.str();
      }
      os << ")";
      break;
    }
    case ValueKind::Array:
    case ValueKind::List: {
      os << "[";
      for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) os << ", ";
        os << elems_[i].str();
      }
      os << "]";
      break;
    }
    case ValueKind::Set: {
      os << "{";
      for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) os << ", ";
        os << elems_[i].str();
      }
      os << "}";
      break;
    }
  }
  return os.str();
}

nlohmann::ordered_json Value::to_json() const {
  using J = nlohmann::ordered_json;
  switch (kind_) {
    case ValueKind::Null: return nullptr;
    case ValueKind::Bool: return bool_;
    case ValueKind::Int: return int_;
    case ValueKind::Real: return real_;
    case ValueKind::Enum: return J{{"$enum", name_}, {"lit", str_}, {"i", int_}};
    case ValueKind::Token: return str_;
    case ValueKind::Object: return J{{"$obj", str_}};
    case ValueKind::Record: {
      J j;
      j["$rec"] = name_;
      for (const auto& f : fields_) j[f.first] = f.second.to_json();
      return j;
    }
    case ValueKind::Array:
    case ValueKind::List:
    case ValueKind::Set: {
      J j = J::array();
      for (const auto& e : elems_) j.push_back(e.to_json());
      if (kind_ == ValueKind::Set) return J{{"$set", j}};
      if (kind_ == ValueKind::Array) return J{{"$arr", j}};
      return j;
    }
  }
  return nullptr;
}

Value Value::from_json(const nlohmann::ordered_json& j) {
  using J = nlohmann::ordered_json;
  if (j.is_null()) return Value::null();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_number_float()) return Value::real(j.get<double>());
  if (j.is_string()) return Value::token(j.get<std::string>());
  if (j.is_array()) {
    std::vector<Value> es;
    for (const auto& e : j) es.push_back(from_json(e));
    return Value::list(std::move(es));
  }
  if (j.is_object()) {
    if (j.contains("$enum"))
      return Value::enum_lit(j["$enum"].get<std::string>(), j["i"].get<int>(),
                             j["lit"].get<std::string>());
    if (j.contains("$obj")) return Value::object(j["$obj"].get<std::string>());
    if (j.contains("$set")) {
      std::vector<Value> es;
      for (const auto& e : j["$set"]) es.push_back(from_json(e));
      return Value::set(std::move(es));
    }
    if (j.contains("$arr")) {
      std::vector<Value> es;
      for (const auto& e : j["$arr"]) es.push_back(from_json(e));
      return Value::array(std::move(es));
    }
    if (j.contains("$rec")) {
      std::vector<std::pair<std::string, Value>> fs;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "$rec") continue;
        fs.emplace_back(it.key(), from_json(it.value()));
      }
      return Value::record(j["$rec"].get<std::string>(), std::move(fs));
    }
  }
  (void)sizeof(J);
  return Value::null();
}

Value make_location(double x, double y) {
  return Value::record("Location", {{"x", Value::real(x)}, {"y", Value::real(y)}});
}

} // namespace scsl
