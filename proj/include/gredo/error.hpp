#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gredo {

/// Shell-visible error categories.
enum class ErrorCategory { Syntax, Schema, Execution, Io };

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Syntax: return "syntax";
    case ErrorCategory::Schema: return "schema";
    case ErrorCategory::Execution: return "execution";
    case ErrorCategory::Io: return "io";
  }
  return "execution";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(ErrorCategory::Syntax,
              what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorCategory::Schema, what) {}
};

class ExecutionError : public Error {
 public:
  explicit ExecutionError(const std::string& what) : Error(ErrorCategory::Execution, what) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& what) : Error(ErrorCategory::Execution, what) {}
};

/// Operand kinds or call preconditions were violated by the caller.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorCategory::Execution, what) {}
};

/// Mappers and adjacency disagree; signals corrupted topology state.
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what) : Error(ErrorCategory::Execution, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

/// Malformed serialized topology.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(ErrorCategory::Execution, what) {}
};

}  // namespace gredo
