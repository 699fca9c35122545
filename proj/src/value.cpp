#include "gredo/value.hpp"

#include <cmath>
#include <functional>

#include "gredo/json_io.hpp"

namespace gredo {

const Value* Document::find(std::string_view key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return &values_[i];
  }
  return nullptr;
}

void Document::set(std::string key, Value value) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) {
      values_[i] = std::move(value);
      return;
    }
  }
  keys_.push_back(std::move(key));
  values_.push_back(std::move(value));
}

const Value& Document::value_at(std::size_t i) const { return values_[i]; }

bool Document::operator==(const Document& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    const Value* v = other.find(keys_[i]);
    if (v == nullptr || !(*v == values_[i])) return false;
  }
  return true;
}

std::optional<double> Value::as_number() const {
  switch (type()) {
    case Type::Int: return static_cast<double>(as_int());
    case Type::Float: return as_float();
    default: return std::nullopt;
  }
}

const char* type_name(Value::Type t) {
  switch (t) {
    case Value::Type::Null: return "null";
    case Value::Type::Bool: return "bool";
    case Value::Type::Int: return "int";
    case Value::Type::Float: return "float";
    case Value::Type::Text: return "text";
    case Value::Type::Document: return "document";
    case Value::Type::Array: return "array";
  }
  return "?";
}

namespace {

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

std::optional<int> compare(const Value& a, const Value& b) {
  using T = Value::Type;
  if (a.is_null() || b.is_null()) return std::nullopt;
  if (a.is_numeric() && b.is_numeric()) {
    if (a.type() == T::Int && b.type() == T::Int) return three_way(a.as_int(), b.as_int());
    double x = *a.as_number();
    double y = *b.as_number();
    if (std::isnan(x) || std::isnan(y)) return std::nullopt;
    return three_way(x, y);
  }
  if (a.type() != b.type()) return std::nullopt;
  switch (a.type()) {
    case T::Bool: return three_way(a.as_bool(), b.as_bool());
    case T::Text: {
      int c = a.as_text().compare(b.as_text());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    default: return std::nullopt;
  }
}

std::optional<bool> equals(const Value& a, const Value& b) {
  using T = Value::Type;
  if (a.is_null() || b.is_null()) return std::nullopt;
  if (a.type() == T::Array && b.type() == T::Array) {
    const Array& x = a.as_array();
    const Array& y = b.as_array();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto e = equals(x[i], y[i]);
      if (!e || !*e) return false;
    }
    return true;
  }
  if (a.type() == T::Document && b.type() == T::Document) {
    const Document& x = a.as_document();
    const Document& y = b.as_document();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Value* v = y.find(x.key_at(i));
      if (v == nullptr) return false;
      auto e = equals(x.value_at(i), *v);
      if (!e || !*e) return false;
    }
    return true;
  }
  auto c = compare(a, b);
  if (!c) return std::nullopt;
  return *c == 0;
}

int total_order(const Value& a, const Value& b) {
  using T = Value::Type;
  if (a.type() != b.type()) return three_way(static_cast<int>(a.type()), static_cast<int>(b.type()));
  switch (a.type()) {
    case T::Null: return 0;
    case T::Bool: return three_way(a.as_bool(), b.as_bool());
    case T::Int: return three_way(a.as_int(), b.as_int());
    case T::Float: return three_way(a.as_float(), b.as_float());
    case T::Text: {
      int c = a.as_text().compare(b.as_text());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case T::Array: {
      const Array& x = a.as_array();
      const Array& y = b.as_array();
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        int c = total_order(x[i], y[i]);
        if (c != 0) return c;
      }
      return three_way(x.size(), y.size());
    }
    case T::Document: return a.as_document() == b.as_document() ? 0 : three_way(to_json(a).dump(), to_json(b).dump());
  }
  return 0;
}

std::size_t hash_value(const Value& v) {
  using T = Value::Type;
  switch (v.type()) {
    case T::Null: return 0x9e3779b97f4a7c15ULL;
    case T::Bool: return v.as_bool() ? 0x51ed27ULL : 0x2545f4ULL;
    case T::Int:
    case T::Float: {
      double d = *v.as_number();
      if (d == 0.0) d = 0.0;  // -0.0 and 0.0 compare equal
      return std::hash<double>{}(d);
    }
    case T::Text: return std::hash<std::string>{}(v.as_text());
    case T::Array: {
      std::size_t h = 0xa0761d6478bd642fULL;
      for (const auto& e : v.as_array()) h = h * 31 + hash_value(e);
      return h;
    }
    case T::Document: {
      std::size_t h = 0xe7037ed1a0b428dbULL;
      const Document& d = v.as_document();
      // order-insensitive
      for (std::size_t i = 0; i < d.size(); ++i) {
        h ^= std::hash<std::string>{}(d.key_at(i)) * 1099511628211ULL + hash_value(d.value_at(i));
      }
      return h;
    }
  }
  return 0;
}

std::string to_display(const Value& v) {
  switch (v.type()) {
    case Value::Type::Null: return "NULL";
    case Value::Type::Text: return v.as_text();
    default: return to_json(v).dump();
  }
}

const Value* find_path(const Value& doc, const PathExpr& path) {
  const Value* cur = &doc;
  for (const auto& step : path.steps) {
    if (const auto* key = std::get_if<std::string>(&step)) {
      if (cur->type() != Value::Type::Document) return nullptr;
      cur = cur->as_document().find(*key);
    } else {
      std::size_t idx = std::get<std::size_t>(step);
      if (cur->type() != Value::Type::Array || idx >= cur->as_array().size()) return nullptr;
      cur = &cur->as_array()[idx];
    }
    if (cur == nullptr) return nullptr;
  }
  return cur;
}

Value resolve_path(const Value& doc, const PathExpr& path) {
  const Value* v = find_path(doc, path);
  return v ? *v : Value{};
}

}  // namespace gredo
