#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gredo {

class Value;
using Array = std::vector<Value>;

/// Ordered key -> Value map. Keys are unique; iteration follows insertion order.
class Document {
 public:
  Document() = default;

  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  const Value* find(std::string_view key) const;
  /// Inserts or replaces; replacing keeps the original position.
  void set(std::string key, Value value);

  const std::string& key_at(std::size_t i) const { return keys_[i]; }
  const Value& value_at(std::size_t i) const;

  /// Key order is irrelevant for equality.
  bool operator==(const Document& other) const;

 private:
  std::vector<std::string> keys_;
  std::vector<Value> values_;
};

class Value {
 public:
  enum class Type { Null, Bool, Int, Float, Text, Document, Array };

  Value() = default;
  Value(std::nullptr_t) {}
  Value(bool b) : v_(b) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(std::uint64_t i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(std::string_view s) : v_(std::string(s)) {}
  Value(Array a) : v_(std::move(a)) {}
  Value(Document d) : v_(std::move(d)) {}

  Type type() const noexcept { return static_cast<Type>(v_.index()); }
  bool is_null() const noexcept { return type() == Type::Null; }
  bool is_numeric() const noexcept { return type() == Type::Int || type() == Type::Float; }

  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }
  const Document& as_document() const { return std::get<Document>(v_); }

  /// Int or Float widened to double; nullopt for every other type.
  std::optional<double> as_number() const;

  /// Strict structural equality (Int 1 and Float 1.0 differ). See compare() for
  /// the comparison semantics used by predicates.
  bool operator==(const Value& other) const { return v_ == other.v_; }
  bool operator!=(const Value& other) const { return !(*this == other); }

 private:
  std::variant<std::monostate, bool, std::int64_t, double, std::string, Document, Array> v_;
};

const char* type_name(Value::Type t);

/// Predicate ordering. Int promotes to Float, Text compares by code point.
/// Returns nullopt when the operands are incomparable: either side Null, a
/// type mismatch, or containers (which have no order).
std::optional<int> compare(const Value& a, const Value& b);

/// Predicate equality: like compare() but containers compare structurally.
std::optional<bool> equals(const Value& a, const Value& b);

/// Total order over all values (type rank first); used for sorting result multisets.
int total_order(const Value& a, const Value& b);

/// Hash consistent with compare(a, b) == 0 for scalars.
std::size_t hash_value(const Value& v);

/// Human-readable rendering; Text is unquoted, containers render as JSON.
std::string to_display(const Value& v);

using PathStep = std::variant<std::string, std::size_t>;

/// Document path: a non-empty sequence of object keys and array indices.
struct PathExpr {
  std::vector<PathStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  bool operator==(const PathExpr&) const = default;
};

/// Address inside a document; nullptr when any step is missing.
const Value* find_path(const Value& doc, const PathExpr& path);

/// Missing steps yield Null.
Value resolve_path(const Value& doc, const PathExpr& path);

}  // namespace gredo
