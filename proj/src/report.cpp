#include "qmt/report.hpp"

#include <cmath>
#include <cstdio>

#include "qmt/errors.hpp"

namespace qmt::report {

// ---- Value ------------------------------------------------------------------

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.b_ = b;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::Int;
  v.i_ = i;
  return v;
}

Value Value::real(double d) {
  Value v;
  v.kind_ = Kind::Real;
  v.d_ = d;
  return v;
}

Value Value::str(std::string s) {
  Value v;
  v.kind_ = Kind::Str;
  v.s_ = std::move(s);
  return v;
}

Value Value::array() {
  Value v;
  v.kind_ = Kind::Array;
  return v;
}

Value Value::object() {
  Value v;
  v.kind_ = Kind::Object;
  return v;
}

Value& Value::push(Value v) {
  if (kind_ != Kind::Array) throw ValidationError("report value: push on a non-array");
  arr_.push_back(std::move(v));
  return *this;
}

Value& Value::set(const std::string& key, Value v) {
  if (kind_ != Kind::Object) throw ValidationError("report value: set on a non-object");
  for (auto& [k, existing] : obj_) {
    if (k == key) {
      existing = std::move(v);
      return *this;
    }
  }
  obj_.emplace_back(key, std::move(v));
  return *this;
}

const Value* Value::find(const std::string& key) const {
  if (kind_ != Kind::Object) return nullptr;
  for (const auto& [k, v] : obj_)
    if (k == key) return &v;
  return nullptr;
}

const std::vector<Value>& Value::items() const {
  if (kind_ != Kind::Array) throw ValidationError("report value: items of a non-array");
  return arr_;
}

const std::vector<std::pair<std::string, Value>>& Value::members() const {
  if (kind_ != Kind::Object) throw ValidationError("report value: members of a non-object");
  return obj_;
}

// ---- scalar formatting --------------------------------------------------------

std::string format_real(double x) {
  if (!std::isfinite(x)) throw ValidationError("report value: non-finite number");
  if (x == 0.0) return "0";  // normalizes -0 as well
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string scalar_text(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Null: return "null";
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Int: return std::to_string(v.as_int());
    case Value::Kind::Real: return format_real(v.as_real());
    case Value::Kind::Str: return escape_string(v.as_str());
    default: throw ValidationError("report value: not a scalar");
  }
}

bool all_scalar(const Value& arr) {
  for (const Value& v : arr.items())
    if (!v.is_scalar()) return false;
  return true;
}

void write_json(const Value& v, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (v.is_scalar()) {
    out += scalar_text(v);
    return;
  }
  if (v.is_array()) {
    const auto& items = v.items();
    if (items.empty()) {
      out += "[]";
      return;
    }
    if (all_scalar(v)) {
      out += '[';
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += scalar_text(items[i]);
      }
      out += ']';
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += pad_in;
      write_json(items[i], out, indent + 1);
      if (i + 1 < items.size()) out += ',';
      out += '\n';
    }
    out += pad + "]";
    return;
  }
  const auto& members = v.members();
  if (members.empty()) {
    out += "{}";
    return;
  }
  out += "{\n";
  for (std::size_t i = 0; i < members.size(); ++i) {
    out += pad_in + escape_string(members[i].first) + ": ";
    write_json(members[i].second, out, indent + 1);
    if (i + 1 < members.size()) out += ',';
    out += '\n';
  }
  out += pad + "}";
}

std::string escape_tsv(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\t')
      out += "\\t";
    else if (c == '\n')
      out += "\\n";
    else
      out += c;
  }
  return out;
}

void write_tsv(const Value& v, const std::string& path, std::string& out) {
  if (v.is_scalar()) {
    std::string text;
    switch (v.kind()) {
      case Value::Kind::Str: text = escape_tsv(v.as_str()); break;
      case Value::Kind::Null: text = "null"; break;
      case Value::Kind::Bool: text = v.as_bool() ? "true" : "false"; break;
      case Value::Kind::Int: text = std::to_string(v.as_int()); break;
      default: text = format_real(v.as_real());
    }
    out += path + '\t' + text + '\n';
    return;
  }
  if (v.is_array()) {
    const auto& items = v.items();
    for (std::size_t i = 0; i < items.size(); ++i)
      write_tsv(items[i], path + '[' + std::to_string(i) + ']', out);
    return;
  }
  for (const auto& [k, child] : v.members())
    write_tsv(child, path.empty() ? k : path + '.' + k, out);
}

}  // namespace

std::string to_json(const Value& v) {
  std::string out;
  write_json(v, out, 0);
  out += '\n';
  return out;
}

std::string to_tsv(const Value& v) {
  std::string out;
  write_tsv(v, "", out);
  return out;
}

// ---- encoders -------------------------------------------------------------------

Value complex_value(Complex z) {
  Value v = Value::array();
  v.push(Value::real(z.real()));
  v.push(Value::real(z.imag()));
  return v;
}

Value matrix_value(const ComplexMatrix& m) {
  Value rows = Value::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Value row = Value::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push(complex_value(m(r, c)));
    rows.push(std::move(row));
  }
  return rows;
}

Value real_vector_value(const std::vector<double>& v) {
  Value arr = Value::array();
  for (double x : v) arr.push(Value::real(x));
  return arr;
}

Value string_vector_value(const std::vector<std::string>& v) {
  Value arr = Value::array();
  for (const std::string& s : v) arr.push(Value::str(s));
  return arr;
}

}  // namespace qmt::report
