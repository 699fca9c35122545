#include "gredo/json_io.hpp"

#include "gredo/error.hpp"

namespace gredo {

Json to_json(const Value& v) {
  switch (v.type()) {
    case Value::Type::Null: return nullptr;
    case Value::Type::Bool: return v.as_bool();
    case Value::Type::Int: return v.as_int();
    case Value::Type::Float: return v.as_float();
    case Value::Type::Text: return v.as_text();
    case Value::Type::Array: {
      Json a = Json::array();
      for (const auto& e : v.as_array()) a.push_back(to_json(e));
      return a;
    }
    case Value::Type::Document: {
      Json o = Json::object();
      const Document& d = v.as_document();
      for (std::size_t i = 0; i < d.size(); ++i) o[d.key_at(i)] = to_json(d.value_at(i));
      return o;
    }
  }
  return nullptr;
}

Value from_json(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return {};
    case Json::value_t::boolean: return j.get<bool>();
    case Json::value_t::number_integer: return j.get<std::int64_t>();
    case Json::value_t::number_unsigned: return static_cast<std::int64_t>(j.get<std::uint64_t>());
    case Json::value_t::number_float: return j.get<double>();
    case Json::value_t::string: return j.get<std::string>();
    case Json::value_t::array: {
      Array a;
      a.reserve(j.size());
      for (const auto& e : j) a.push_back(from_json(e));
      return a;
    }
    case Json::value_t::object: {
      Document d;
      for (auto it = j.begin(); it != j.end(); ++it) d.set(it.key(), from_json(it.value()));
      return d;
    }
    default: return {};
  }
}

Value parse_json_value(std::string_view text) {
  try {
    return from_json(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace gredo
