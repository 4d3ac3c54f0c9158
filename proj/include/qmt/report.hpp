#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmt/linalg.hpp"

namespace qmt::report {

// Ordered document model for reports and scenario serialization.  Objects
// keep keys in insertion order and numbers are emitted with a fixed format
// (12 significant digits, negative zero normalized), so a report is byte
// identical across runs and platforms for the same inputs.
class Value {
 public:
  enum class Kind { Null, Bool, Int, Real, Str, Array, Object };

  Value() : kind_(Kind::Null) {}

  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value real(double d);
  static Value str(std::string s);
  static Value array();
  static Value object();

  Kind kind() const { return kind_; }
  bool is_object() const { return kind_ == Kind::Object; }
  bool is_array() const { return kind_ == Kind::Array; }
  bool is_scalar() const { return kind_ != Kind::Array && kind_ != Kind::Object; }

  // Array append; throws ValidationError when not an array.
  Value& push(Value v);
  // Object insert (replaces an existing key in place); throws
  // ValidationError when not an object.
  Value& set(const std::string& key, Value v);

  // Lookup in an object; nullptr when absent.
  const Value* find(const std::string& key) const;

  const std::vector<Value>& items() const;                            // array
  const std::vector<std::pair<std::string, Value>>& members() const;  // object

  bool as_bool() const { return b_; }
  std::int64_t as_int() const { return i_; }
  double as_real() const { return d_; }
  const std::string& as_str() const { return s_; }

 private:
  Kind kind_;
  bool b_ = false;
  std::int64_t i_ = 0;
  double d_ = 0.0;
  std::string s_;
  std::vector<Value> arr_;
  std::vector<std::pair<std::string, Value>> obj_;
};

// Fixed-format scalar emission: "%.12g" with -0 normalized to 0.
// Non-finite values are rejected with ValidationError (reports must not
// contain them).
std::string format_real(double x);

// Pretty JSON (two-space indent, scalar-only arrays on one line), with a
// trailing newline.
std::string to_json(const Value& v);

// Flat key<TAB>value lines for the scalar leaves, paths in document order
// (dots for object keys, [i] for array indices), with a trailing newline.
std::string to_tsv(const Value& v);

// Builders for the standard encodings: complex as [re, im], matrices as
// row-major nested arrays of complex entries.
Value complex_value(Complex z);
Value matrix_value(const ComplexMatrix& m);
Value real_vector_value(const std::vector<double>& v);
Value string_vector_value(const std::vector<std::string>& v);

}  // namespace qmt::report
