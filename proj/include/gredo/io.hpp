#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gredo/record_store.hpp"
#include "gredo/schema.hpp"

namespace gredo {

/// One parsed CSV field. An unquoted empty field is Null; `""` is an empty string.
struct CsvField {
  std::string text;
  bool quoted = false;
};

/// RFC 4180 reader: quoted fields may hold separators, doubled quotes and newlines.
/// Errors name the 1-based line where the offending record starts.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// False at end of input.
  bool next(std::vector<CsvField>& fields);
  std::size_t record_line() const noexcept { return record_line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

/// Header row selects and orders columns by name; missing non-key columns are Null.
std::vector<std::vector<Value>> read_csv(std::istream& in, const Schema& schema, const std::string& source);
void write_csv(std::ostream& out, const Collection& collection);

/// One JSON value per line. Document collections take any object; other kinds
/// take an object keyed by column name.
std::vector<std::vector<Value>> read_jsonl(std::istream& in, const Schema& schema, const std::string& source);
void write_jsonl(std::ostream& out, const Collection& collection);

/// Text form of one cell as written by write_csv.
std::string csv_cell(const Value& v);
Value parse_cell(const CsvField& f, ColumnType type);

}  // namespace gredo
