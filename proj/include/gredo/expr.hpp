#pragma once

#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gredo/schema.hpp"
#include "gredo/value.hpp"

namespace gredo {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_text(CmpOp op);
/// a op b  <=>  b flip(op) a
CmpOp flip(CmpOp op);

/// Reference to `var.column` optionally followed by a document path
/// (`var.column->>'k'`), or to a document collection's document (`var->>'k'`).
/// Empty column and path denotes the whole record.
struct ColumnRef {
  std::string var;
  std::string column;
  PathExpr path;

  // Filled by binding; ignored by equality.
  int slot = -1;
  int column_index = -1;
  PathExpr effective_path;

  bool whole_record() const noexcept { return column.empty() && path.empty(); }
  bool operator==(const ColumnRef& o) const { return var == o.var && column == o.column && path == o.path; }
};

/// Expression tree shared by the query front end and stored predicates.
struct Expr {
  enum class Kind { Literal, Column, Compare, And, Or, Not };

  Kind kind = Kind::Literal;
  Value literal;
  ColumnRef ref;
  CmpOp op = CmpOp::Eq;
  std::vector<Expr> args;

  static Expr lit(Value v);
  static Expr col(std::string var, std::string column, PathExpr path = {});
  static Expr cmp(CmpOp op, Expr lhs, Expr rhs);
  static Expr conj(std::vector<Expr> parts);
  static Expr disj(std::vector<Expr> parts);
  static Expr negate(Expr e);

  bool operator==(const Expr& o) const;
};

/// Renders in query syntax; parse(print(e)) == e.
std::string to_string(const Expr& e);
std::string to_string(const ColumnRef& r);
std::string quote_literal(const Value& v);

std::set<std::string> referenced_vars(const Expr& e);
void collect_refs(const Expr& e, std::vector<const ColumnRef*>& out);
/// Flattens nested ANDs.
std::vector<Expr> split_conjuncts(const Expr& e);
/// Renames every reference to `from` as `to`.
Expr rename_var(Expr e, std::string_view from, std::string_view to);

using SlotResolver = std::function<std::pair<int, const Schema*>(std::string_view var)>;

/// Resolves every column reference against the schemas returned by `resolve`;
/// unresolvable names raise SchemaError at bind time, never during evaluation.
Expr bind(Expr e, const SlotResolver& resolve);
void bind_ref(ColumnRef& ref, int slot, const Schema& schema);

using RecordSlots = std::span<const Record* const>;

/// Value addressed by a bound reference; nullptr stands for Null.
const Value* lookup(const ColumnRef& ref, RecordSlots slots);
/// Total evaluation: type mismatches and Nulls make comparisons False.
bool eval(const Expr& bound, RecordSlots slots);
Value eval_value(const Expr& bound, RecordSlots slots);

/// Predicate over one record (unary) or a record pair (binary, for joins).
class Predicate {
 public:
  Predicate() = default;

  /// All references resolve against `schema`, whatever their variable name.
  static Predicate unary(Expr e, const Schema& schema);
  /// References to `left_var` resolve against `left`, everything else against `right`.
  static Predicate binary(Expr e, std::string_view left_var, const Schema& left, const Schema& right);

  int arity() const noexcept { return arity_; }
  const Expr& expr() const noexcept { return expr_; }
  bool empty() const noexcept { return arity_ == 0; }

  bool operator()(const Record& left, const Record* right = nullptr) const;

 private:
  Expr expr_;
  int arity_ = 0;
};

/// Throws ContractError when the predicate arity does not match `right`'s presence.
bool eval_predicate(const Predicate& pred, const Record& left, const Record* right = nullptr);

/// Classification used by the pattern-matching pushdown rules.
enum class PredicateClass { Equality, Inequality, Range };
PredicateClass classify(const Expr& e);

}  // namespace gredo
