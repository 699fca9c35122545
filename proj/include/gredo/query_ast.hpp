#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gredo/expr.hpp"

namespace gredo {

struct SelectItem {
  Expr expr;
  std::string alias;  // empty when not given

  bool operator==(const SelectItem&) const = default;
};

struct SourceRef {
  std::string name;
  std::string alias;  // empty when not given; the name doubles as the variable

  const std::string& var() const { return alias.empty() ? name : alias; }
  bool operator==(const SourceRef&) const = default;
};

struct MatchVertex {
  std::string var;
  std::string label;

  bool operator==(const MatchVertex&) const = default;
};

struct MatchEdge {
  std::string var;
  std::string label;  // may be empty: a graph has one edge label
  bool forward = true;

  bool operator==(const MatchEdge&) const = default;
};

struct MatchClause {
  std::vector<MatchVertex> vertices;
  std::vector<MatchEdge> edges;

  bool operator==(const MatchClause&) const = default;
};

/// SELECT <items> FROM <sources> [MATCH <chain>] [WHERE <expr>]
struct QueryAst {
  bool star = false;
  std::vector<SelectItem> items;
  std::vector<SourceRef> sources;
  std::optional<MatchClause> match;
  std::optional<Expr> where;

  bool operator==(const QueryAst&) const = default;
};

enum class AnalyzeOp { Multiply, Similarity, Regression };
const char* analyze_op_name(AnalyzeOp op);

/// ANALYZE <op> USING (<query>) [AND (<query>)] [WITH (key=value, ...)]
struct AnalyzeAst {
  AnalyzeOp op = AnalyzeOp::Regression;
  QueryAst first;
  std::optional<QueryAst> second;
  std::vector<std::pair<std::string, Value>> options;

  bool operator==(const AnalyzeAst&) const = default;
};

struct StatementAst {
  enum class Kind { Query, Explain, Analyze, ExplainAnalyze };
  Kind kind = Kind::Query;
  QueryAst query;
  AnalyzeAst analyze;
};

QueryAst parse_query(std::string_view text);
AnalyzeAst parse_analyze(std::string_view text);
/// Accepts a query, `EXPLAIN <query>`, `ANALYZE ...` or `EXPLAIN ANALYZE ...`.
StatementAst parse_statement(std::string_view text);

/// Canonical text; parse_query(to_string(q)) == q.
std::string to_string(const QueryAst& q);
std::string to_string(const AnalyzeAst& a);
std::string to_string(const MatchClause& m);

// Lexer shared with the shell's command parser.
struct Token {
  enum class Kind { Ident, Int, Float, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view text);

/// Cursor over tokens with keyword helpers; errors are SyntaxErrors at the
/// current token's position.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const;
  bool accept_keyword(std::string_view kw);
  void expect_keyword(std::string_view kw);
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const;
  bool accept_symbol(std::string_view s);
  void expect_symbol(std::string_view s);
  std::string expect_ident(std::string_view what);
  std::string expect_string(std::string_view what);

  [[noreturn]] void fail(const std::string& message) const;
  std::size_t position() const { return pos_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Expr parse_expr(TokenStream& ts);
Value parse_literal(TokenStream& ts);

}  // namespace gredo
