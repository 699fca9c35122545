#include <cctype>
#include <charconv>

#include "gredo/error.hpp"
#include "gredo/query_ast.hpp"

namespace gredo {

const char* analyze_op_name(AnalyzeOp op) {
  switch (op) {
    case AnalyzeOp::Multiply: return "MULTIPLY";
    case AnalyzeOp::Similarity: return "SIMILARITY";
    case AnalyzeOp::Regression: return "REGRESSION";
  }
  return "?";
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

const char* const kReserved[] = {"SELECT", "FROM", "MATCH", "WHERE", "AND",   "OR",      "NOT",  "AS",
                                 "TRUE",   "FALSE", "NULL", "USING", "WITH",  "ANALYZE", "EXPLAIN"};

bool reserved(std::string_view word) {
  for (const char* k : kReserved) {
    if (iequals(word, k)) return true;
  }
  return false;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-' && !(i + 2 < text.size() && text[i + 2] == '>')) {
      while (i < text.size() && text[i] != '\n') advance(1);  // comment
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool is_float = false;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        is_float = true;
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          is_float = true;
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      t.kind = is_float ? Token::Kind::Float : Token::Kind::Int;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      std::string s;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == c) {
          if (j + 1 < text.size() && text[j + 1] == c) {
            s += c;
            j += 2;
            continue;
          }
          closed = true;
          break;
        }
        s += text[j++];
      }
      if (!closed) throw SyntaxError("unterminated string literal", line, col);
      t.kind = Token::Kind::String;
      t.text = std::move(s);
      advance(j + 1 - i);
    } else {
      static const char* const kMulti[] = {"->>", "->", "<>", "!=", "<=", ">="};
      std::string sym;
      for (const char* m : kMulti) {
        if (text.substr(i).starts_with(m)) {
          sym = m;
          break;
        }
      }
      if (sym.empty()) {
        if (std::string_view("(),.*=<>-[]:;+").find(c) == std::string_view::npos) {
          throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
        }
        sym = std::string(1, c);
      }
      t.kind = Token::Kind::Symbol;
      t.text = sym;
      advance(sym.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t p = std::min(pos_ + ahead, toks_.size() - 1);
  return toks_[p];
}

const Token& TokenStream::next() {
  const Token& t = toks_[pos_];
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool TokenStream::is_keyword(std::string_view kw, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Ident && iequals(t.text, kw);
}

bool TokenStream::accept_keyword(std::string_view kw) {
  if (!is_keyword(kw)) return false;
  next();
  return true;
}

void TokenStream::expect_keyword(std::string_view kw) {
  if (!accept_keyword(kw)) fail("expected " + std::string(kw));
}

bool TokenStream::is_symbol(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Symbol && t.text == s;
}

bool TokenStream::accept_symbol(std::string_view s) {
  if (!is_symbol(s)) return false;
  next();
  return true;
}

void TokenStream::expect_symbol(std::string_view s) {
  if (!accept_symbol(s)) fail("expected '" + std::string(s) + "'");
}

std::string TokenStream::expect_ident(std::string_view what) {
  const Token& t = peek();
  if (t.kind != Token::Kind::Ident || reserved(t.text)) fail("expected " + std::string(what));
  return next().text;
}

std::string TokenStream::expect_string(std::string_view what) {
  if (peek().kind != Token::Kind::String) fail("expected " + std::string(what));
  return next().text;
}

void TokenStream::fail(const std::string& message) const {
  const Token& t = peek();
  std::string near = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
  throw SyntaxError(message + " near " + near, t.line, t.column);
}

namespace {

std::optional<Value> number_token(const Token& t, bool negative) {
  std::string text = (negative ? "-" : "") + t.text;
  if (t.kind == Token::Kind::Int) {
    std::int64_t v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) return std::nullopt;
    return Value(v);
  }
  double d = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), d);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) return std::nullopt;
  return Value(d);
}

bool starts_literal(const TokenStream& ts) {
  const Token& t = ts.peek();
  switch (t.kind) {
    case Token::Kind::Int:
    case Token::Kind::Float:
    case Token::Kind::String: return true;
    case Token::Kind::Symbol:
      return t.text == "-" && (ts.peek(1).kind == Token::Kind::Int || ts.peek(1).kind == Token::Kind::Float);
    case Token::Kind::Ident: return ts.is_keyword("TRUE") || ts.is_keyword("FALSE") || ts.is_keyword("NULL");
    default: return false;
  }
}

Expr parse_operand(TokenStream& ts) {
  if (starts_literal(ts)) return Expr::lit(parse_literal(ts));
  std::string var = ts.expect_ident("column reference or literal");
  std::string column;
  if (ts.accept_symbol(".")) column = ts.expect_ident("column name");
  PathExpr path;
  while (ts.is_symbol("->>") || ts.is_symbol("->")) {
    ts.next();
    const Token& t = ts.peek();
    if (t.kind == Token::Kind::String) {
      path.steps.emplace_back(ts.next().text);
    } else if (t.kind == Token::Kind::Int) {
      path.steps.emplace_back(static_cast<std::size_t>(std::stoull(ts.next().text)));
    } else {
      ts.fail("expected document key or index");
    }
  }
  return Expr::col(std::move(var), std::move(column), std::move(path));
}

std::optional<CmpOp> comparison(const TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind != Token::Kind::Symbol) return std::nullopt;
  if (t.text == "=") return CmpOp::Eq;
  if (t.text == "<>" || t.text == "!=") return CmpOp::Ne;
  if (t.text == "<") return CmpOp::Lt;
  if (t.text == "<=") return CmpOp::Le;
  if (t.text == ">") return CmpOp::Gt;
  if (t.text == ">=") return CmpOp::Ge;
  return std::nullopt;
}

Expr parse_or(TokenStream& ts);

Expr parse_primary(TokenStream& ts) {
  if (ts.accept_symbol("(")) {
    Expr e = parse_or(ts);
    ts.expect_symbol(")");
    return e;
  }
  Expr lhs = parse_operand(ts);
  if (auto op = comparison(ts)) {
    ts.next();
    Expr rhs = parse_operand(ts);
    return Expr::cmp(*op, std::move(lhs), std::move(rhs));
  }
  return lhs;
}

Expr parse_not(TokenStream& ts) {
  if (ts.accept_keyword("NOT")) return Expr::negate(parse_not(ts));
  return parse_primary(ts);
}

Expr parse_and(TokenStream& ts) {
  std::vector<Expr> parts{parse_not(ts)};
  while (ts.accept_keyword("AND")) parts.push_back(parse_not(ts));
  return parts.size() == 1 ? std::move(parts[0]) : Expr::conj(std::move(parts));
}

Expr parse_or(TokenStream& ts) {
  std::vector<Expr> parts{parse_and(ts)};
  while (ts.accept_keyword("OR")) parts.push_back(parse_and(ts));
  return parts.size() == 1 ? std::move(parts[0]) : Expr::disj(std::move(parts));
}

/// Label words up to the closing bracket, joined by single spaces.
std::string parse_label(TokenStream& ts, std::string_view close) {
  std::string label;
  while (!ts.is_symbol(close)) {
    const Token& t = ts.peek();
    if (t.kind != Token::Kind::Ident && t.kind != Token::Kind::Int) ts.fail("expected label");
    if (!label.empty()) label += ' ';
    label += ts.next().text;
  }
  return label;
}

/// `var`, `var:Label`, `:Label` or nothing, up to `close`.
std::pair<std::string, std::string> parse_element(TokenStream& ts, std::string_view close) {
  std::string var, label;
  if (ts.peek().kind == Token::Kind::Ident && !ts.is_symbol(":")) var = ts.expect_ident("pattern variable");
  if (ts.accept_symbol(":")) {
    label = parse_label(ts, close);
    if (label.empty()) ts.fail("expected label");
  }
  ts.expect_symbol(close);
  return {var, label};
}

MatchClause parse_match(TokenStream& ts) {
  MatchClause m;
  auto vertex = [&]() {
    ts.expect_symbol("(");
    auto [var, label] = parse_element(ts, ")");
    m.vertices.push_back({var, label});
  };
  vertex();
  while (true) {
    MatchEdge e;
    if (ts.is_symbol("-") && ts.is_symbol("[", 1)) {
      ts.next();
      ts.next();
      auto [var, label] = parse_element(ts, "]");
      ts.expect_symbol("->");
      e = {var, label, true};
    } else if (ts.is_symbol("<") && ts.is_symbol("-", 1) && ts.is_symbol("[", 2)) {
      ts.next();
      ts.next();
      ts.next();
      auto [var, label] = parse_element(ts, "]");
      ts.expect_symbol("-");
      e = {var, label, false};
    } else {
      break;
    }
    m.edges.push_back(e);
    vertex();
  }
  return m;
}

QueryAst parse_query_body(TokenStream& ts) {
  QueryAst q;
  ts.expect_keyword("SELECT");
  if (ts.accept_symbol("*")) {
    q.star = true;
  } else {
    do {
      SelectItem item{parse_or(ts), ""};
      if (ts.accept_keyword("AS")) item.alias = ts.expect_ident("column alias");
      q.items.push_back(std::move(item));
    } while (ts.accept_symbol(","));
  }
  ts.expect_keyword("FROM");
  do {
    SourceRef s;
    s.name = ts.expect_ident("collection name");
    if (ts.accept_keyword("AS")) {
      s.alias = ts.expect_ident("alias");
    } else if (ts.peek().kind == Token::Kind::Ident && !reserved(ts.peek().text)) {
      s.alias = ts.next().text;
    }
    q.sources.push_back(std::move(s));
  } while (ts.accept_symbol(","));
  if (ts.accept_keyword("MATCH")) q.match = parse_match(ts);
  if (ts.accept_keyword("WHERE")) q.where = parse_or(ts);
  return q;
}

void expect_end(TokenStream& ts) {
  ts.accept_symbol(";");
  if (!ts.at_end()) ts.fail("unexpected trailing input");
}

AnalyzeAst parse_analyze_body(TokenStream& ts) {
  AnalyzeAst a;
  ts.expect_keyword("ANALYZE");
  if (ts.accept_keyword("MULTIPLY")) {
    a.op = AnalyzeOp::Multiply;
  } else if (ts.accept_keyword("SIMILARITY")) {
    a.op = AnalyzeOp::Similarity;
  } else if (ts.accept_keyword("REGRESSION")) {
    a.op = AnalyzeOp::Regression;
  } else {
    ts.fail("expected MULTIPLY, SIMILARITY or REGRESSION");
  }
  ts.expect_keyword("USING");
  ts.expect_symbol("(");
  a.first = parse_query_body(ts);
  ts.expect_symbol(")");
  if (ts.accept_keyword("AND")) {
    ts.expect_symbol("(");
    a.second = parse_query_body(ts);
    ts.expect_symbol(")");
  }
  if (ts.accept_keyword("WITH")) {
    ts.expect_symbol("(");
    do {
      std::string key = ts.expect_ident("option name");
      ts.expect_symbol("=");
      Value v = starts_literal(ts) ? parse_literal(ts) : Value(ts.expect_ident("option value"));
      a.options.emplace_back(std::move(key), std::move(v));
    } while (ts.accept_symbol(","));
    ts.expect_symbol(")");
  }
  return a;
}

}  // namespace

Value parse_literal(TokenStream& ts) {
  if (ts.accept_keyword("TRUE")) return Value(true);
  if (ts.accept_keyword("FALSE")) return Value(false);
  if (ts.accept_keyword("NULL")) return Value();
  bool negative = ts.accept_symbol("-");
  const Token& t = ts.peek();
  if (t.kind == Token::Kind::Int || t.kind == Token::Kind::Float) {
    auto v = number_token(t, negative);
    if (!v) ts.fail("numeric literal out of range");
    ts.next();
    return *v;
  }
  if (!negative && t.kind == Token::Kind::String) return Value(ts.next().text);
  ts.fail("expected literal");
}

Expr parse_expr(TokenStream& ts) { return parse_or(ts); }

QueryAst parse_query(std::string_view text) {
  TokenStream ts(tokenize(text));
  QueryAst q = parse_query_body(ts);
  expect_end(ts);
  return q;
}

AnalyzeAst parse_analyze(std::string_view text) {
  TokenStream ts(tokenize(text));
  AnalyzeAst a = parse_analyze_body(ts);
  expect_end(ts);
  return a;
}

StatementAst parse_statement(std::string_view text) {
  TokenStream ts(tokenize(text));
  StatementAst s;
  bool explain = ts.accept_keyword("EXPLAIN");
  if (ts.is_keyword("ANALYZE")) {
    s.kind = explain ? StatementAst::Kind::ExplainAnalyze : StatementAst::Kind::Analyze;
    s.analyze = parse_analyze_body(ts);
  } else {
    s.kind = explain ? StatementAst::Kind::Explain : StatementAst::Kind::Query;
    s.query = parse_query_body(ts);
  }
  expect_end(ts);
  return s;
}

std::string to_string(const MatchClause& m) {
  auto elem = [](const std::string& var, const std::string& label) {
    return label.empty() ? var : var + ":" + label;
  };
  std::string s = "(" + elem(m.vertices[0].var, m.vertices[0].label) + ")";
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const MatchEdge& e = m.edges[i];
    std::string inner = "[" + elem(e.var, e.label) + "]";
    s += e.forward ? "-" + inner + "->" : "<-" + inner + "-";
    s += "(" + elem(m.vertices[i + 1].var, m.vertices[i + 1].label) + ")";
  }
  return s;
}

std::string to_string(const QueryAst& q) {
  std::string s = "SELECT ";
  if (q.star) {
    s += "*";
  } else {
    for (std::size_t i = 0; i < q.items.size(); ++i) {
      if (i) s += ", ";
      s += to_string(q.items[i].expr);
      if (!q.items[i].alias.empty()) s += " AS " + q.items[i].alias;
    }
  }
  s += " FROM ";
  for (std::size_t i = 0; i < q.sources.size(); ++i) {
    if (i) s += ", ";
    s += q.sources[i].name;
    if (!q.sources[i].alias.empty()) s += " AS " + q.sources[i].alias;
  }
  if (q.match) s += " MATCH " + to_string(*q.match);
  if (q.where) s += " WHERE " + to_string(*q.where);
  return s;
}

std::string to_string(const AnalyzeAst& a) {
  std::string s = std::string("ANALYZE ") + analyze_op_name(a.op) + " USING (" + to_string(a.first) + ")";
  if (a.second) s += " AND (" + to_string(*a.second) + ")";
  if (!a.options.empty()) {
    s += " WITH (";
    for (std::size_t i = 0; i < a.options.size(); ++i) {
      if (i) s += ", ";
      s += a.options[i].first + "=" + quote_literal(a.options[i].second);
    }
    s += ")";
  }
  return s;
}

}  // namespace gredo
