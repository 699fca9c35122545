#pragma once

#include <json.hpp>

#include "gredo/value.hpp"

namespace gredo {

using Json = nlohmann::ordered_json;

/// Lossless for everything except Float values that JSON cannot carry (NaN/Inf).
Json to_json(const Value& v);
Value from_json(const Json& j);

/// Parses JSON text into a Value; throws IoError on malformed input.
Value parse_json_value(std::string_view text);

}  // namespace gredo
