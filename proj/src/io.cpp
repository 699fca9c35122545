#include "gredo/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "gredo/error.hpp"
#include "gredo/json_io.hpp"

namespace gredo {

bool CsvReader::next(std::vector<CsvField>& fields) {
  fields.clear();
  int c = in_.get();
  // skip blank lines between records
  while (c == '\n' || c == '\r') {
    if (c == '\n') ++line_;
    c = in_.get();
  }
  if (c == EOF) return false;
  record_line_ = line_;
  CsvField cur;
  bool in_quotes = false;
  bool after_quote = false;
  for (;; c = in_.get()) {
    if (in_quotes) {
      if (c == EOF) throw IoError(source_ + ":" + std::to_string(record_line_) + ": unterminated quoted field");
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          cur.text += '"';
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line_;
        cur.text += static_cast<char>(c);
      }
      continue;
    }
    if (c == ',' ) {
      fields.push_back(std::move(cur));
      cur = CsvField{};
      after_quote = false;
      continue;
    }
    if (c == '\r' && in_.peek() == '\n') continue;
    if (c == '\n' || c == EOF) {
      if (c == '\n') ++line_;
      fields.push_back(std::move(cur));
      return true;
    }
    if (c == '"') {
      if (!cur.text.empty() || after_quote) {
        throw IoError(source_ + ":" + std::to_string(record_line_) + ": stray quote inside field");
      }
      in_quotes = true;
      cur.quoted = true;
      continue;
    }
    if (after_quote) throw IoError(source_ + ":" + std::to_string(record_line_) + ": text after closing quote");
    cur.text += static_cast<char>(c);
  }
}

Value parse_cell(const CsvField& f, ColumnType type) {
  if (f.text.empty() && !f.quoted) return Value{};
  const std::string& t = f.text;
  switch (type) {
    case ColumnType::Int: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || p != t.data() + t.size()) throw SchemaError("'" + t + "' is not an integer");
      return Value(v);
    }
    case ColumnType::Float: {
      double v = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || p != t.data() + t.size()) throw SchemaError("'" + t + "' is not a number");
      return Value(v);
    }
    case ColumnType::Bool:
      if (t == "true" || t == "TRUE" || t == "1") return Value(true);
      if (t == "false" || t == "FALSE" || t == "0") return Value(false);
      throw SchemaError("'" + t + "' is not a boolean");
    case ColumnType::Text: return Value(t);
    case ColumnType::Document: {
      Value v = parse_json_value(t);
      if (v.type() != Value::Type::Document) throw SchemaError("expected a JSON object, got '" + t + "'");
      return v;
    }
    case ColumnType::Array: {
      Value v = parse_json_value(t);
      if (v.type() != Value::Type::Array) throw SchemaError("expected a JSON array, got '" + t + "'");
      return v;
    }
  }
  return Value{};
}

std::vector<std::vector<Value>> read_csv(std::istream& in, const Schema& schema, const std::string& source) {
  CsvReader reader(in, source);
  std::vector<CsvField> fields;
  if (!reader.next(fields)) return {};
  std::vector<int> mapping;
  std::vector<bool> seen(schema.arity(), false);
  for (const auto& f : fields) {
    auto idx = schema.column_index(f.text);
    if (!idx) throw SchemaError(source + ":" + std::to_string(reader.record_line()) + ": unknown column '" + f.text + "'");
    if (seen[*idx]) throw SchemaError(source + ":" + std::to_string(reader.record_line()) + ": duplicate column '" + f.text + "'");
    seen[*idx] = true;
    mapping.push_back(static_cast<int>(*idx));
  }
  for (std::size_t i = 0; i < schema.key_columns(); ++i) {
    if (!seen[i]) throw SchemaError(source + ": header lacks key column '" + schema.columns[i].name + "'");
  }
  std::vector<std::vector<Value>> rows;
  while (reader.next(fields)) {
    std::string where = source + ":" + std::to_string(reader.record_line()) + ": ";
    if (fields.size() != mapping.size()) {
      throw IoError(where + "expected " + std::to_string(mapping.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<Value> row(schema.arity());
    try {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        row[mapping[i]] = parse_cell(fields[i], schema.columns[mapping[i]].type);
      }
      row = conform_to_schema(std::move(row), schema);
    } catch (const Error& e) {
      throw IoError(where + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_cell(const Value& v) {
  std::string s;
  switch (v.type()) {
    case Value::Type::Null: return "";
    case Value::Type::Bool: return v.as_bool() ? "true" : "false";
    case Value::Type::Int: return std::to_string(v.as_int());
    case Value::Type::Float: {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.as_float());
      return std::string(buf, p);
    }
    case Value::Type::Text: s = v.as_text(); break;
    default: s = to_json(v).dump(); break;
  }
  // text is always quoted so "" round-trips as an empty string
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(std::ostream& out, const Collection& collection) {
  const Schema& s = collection.schema();
  for (std::size_t i = 0; i < s.arity(); ++i) out << (i ? "," : "") << s.columns[i].name;
  out << '\n';
  auto cursor = collection.scan();
  while (const Record* r = cursor.next()) {
    for (std::size_t i = 0; i < r->values.size(); ++i) out << (i ? "," : "") << csv_cell(r->values[i]);
    out << '\n';
  }
}

std::vector<std::vector<Value>> read_jsonl(std::istream& in, const Schema& schema, const std::string& source) {
  std::vector<std::vector<Value>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = source + ":" + std::to_string(lineno) + ": ";
    try {
      Value v = parse_json_value(line);
      if (v.type() != Value::Type::Document) throw SchemaError("expected a JSON object");
      std::vector<Value> row;
      if (schema.kind == CollectionKind::DocumentCollection) {
        row.push_back(std::move(v));
      } else {
        const Document& d = v.as_document();
        row.resize(schema.arity());
        for (std::size_t k = 0; k < d.size(); ++k) {
          auto idx = schema.column_index(d.key_at(k));
          if (!idx) throw SchemaError("unknown column '" + d.key_at(k) + "'");
          row[*idx] = d.value_at(k);
        }
      }
      rows.push_back(conform_to_schema(std::move(row), schema));
    } catch (const Error& e) {
      throw IoError(where + e.what());
    }
  }
  return rows;
}

void write_jsonl(std::ostream& out, const Collection& collection) {
  const Schema& s = collection.schema();
  auto cursor = collection.scan();
  while (const Record* r = cursor.next()) {
    if (s.kind == CollectionKind::DocumentCollection) {
      out << to_json(r->values[0]).dump() << '\n';
      continue;
    }
    Json j = Json::object();
    for (std::size_t i = 0; i < s.arity(); ++i) j[s.columns[i].name] = to_json(r->values[i]);
    out << j.dump() << '\n';
  }
}

}  // namespace gredo
