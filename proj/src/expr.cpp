#include "gredo/expr.hpp"

#include <cmath>
#include <sstream>

#include "gredo/error.hpp"

namespace gredo {

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "=";
}

CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

Expr Expr::lit(Value v) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = std::move(v);
  return e;
}

Expr Expr::col(std::string var, std::string column, PathExpr path) {
  Expr e;
  e.kind = Kind::Column;
  e.ref.var = std::move(var);
  e.ref.column = std::move(column);
  e.ref.path = std::move(path);
  return e;
}

Expr Expr::cmp(CmpOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Compare;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::conj(std::vector<Expr> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Expr e;
  e.kind = Kind::And;
  e.args = std::move(parts);
  return e;
}

Expr Expr::disj(std::vector<Expr> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Expr e;
  e.kind = Kind::Or;
  e.args = std::move(parts);
  return e;
}

Expr Expr::negate(Expr inner) {
  Expr e;
  e.kind = Kind::Not;
  e.args.push_back(std::move(inner));
  return e;
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Literal: return literal == o.literal;
    case Kind::Column: return ref == o.ref;
    case Kind::Compare: return op == o.op && args == o.args;
    default: return args == o.args;
  }
}

std::string quote_literal(const Value& v) {
  switch (v.type()) {
    case Value::Type::Null: return "NULL";
    case Value::Type::Bool: return v.as_bool() ? "TRUE" : "FALSE";
    case Value::Type::Int: return std::to_string(v.as_int());
    case Value::Type::Float: {
      std::ostringstream os;
      os.precision(17);
      os << v.as_float();
      std::string s = os.str();
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case Value::Type::Text: {
      std::string out = "'";
      for (char c : v.as_text()) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
    default: return quote_literal(Value(to_display(v)));
  }
}

std::string to_string(const ColumnRef& r) {
  std::string s = r.var;
  if (!r.column.empty()) s += (s.empty() ? "" : ".") + r.column;
  for (const auto& step : r.path.steps) {
    if (const auto* k = std::get_if<std::string>(&step)) {
      s += "->>" + quote_literal(Value(*k));
    } else {
      s += "->>" + std::to_string(std::get<std::size_t>(step));
    }
  }
  return s;
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    default: return 4;
  }
}

std::string print(const Expr& e, int parent_prec) {
  std::string s;
  int prec = precedence(e.kind);
  switch (e.kind) {
    case Expr::Kind::Literal: return quote_literal(e.literal);
    case Expr::Kind::Column: return to_string(e.ref);
    case Expr::Kind::Compare:
      s = print(e.args[0], 5) + " " + cmp_op_text(e.op) + " " + print(e.args[1], 5);
      break;
    case Expr::Kind::Not: s = "NOT " + print(e.args[0], prec); break;
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const char* sep = e.kind == Expr::Kind::And ? " AND " : " OR ";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) s += sep;
        // children of equal precedence are parenthesised so the tree shape survives re-parsing
        s += print(e.args[i], prec + 1);
      }
      break;
    }
  }
  return prec < parent_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

void collect_refs(const Expr& e, std::vector<const ColumnRef*>& out) {
  if (e.kind == Expr::Kind::Column) out.push_back(&e.ref);
  for (const auto& a : e.args) collect_refs(a, out);
}

std::set<std::string> referenced_vars(const Expr& e) {
  std::vector<const ColumnRef*> refs;
  collect_refs(e, refs);
  std::set<std::string> vars;
  for (const auto* r : refs) vars.insert(r->var);
  return vars;
}

std::vector<Expr> split_conjuncts(const Expr& e) {
  std::vector<Expr> out;
  if (e.kind == Expr::Kind::And) {
    for (const auto& a : e.args) {
      auto sub = split_conjuncts(a);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else {
    out.push_back(e);
  }
  return out;
}

Expr rename_var(Expr e, std::string_view from, std::string_view to) {
  if (e.kind == Expr::Kind::Column && e.ref.var == from) e.ref.var = std::string(to);
  for (auto& a : e.args) a = rename_var(std::move(a), from, to);
  return e;
}

void bind_ref(ColumnRef& ref, int slot, const Schema& schema) {
  ref.slot = slot;
  ref.effective_path = ref.path;
  if (ref.column.empty()) {
    if (ref.path.empty()) {
      ref.column_index = -1;
      return;
    }
    auto doc = schema.document_column();
    if (!doc) throw SchemaError("'" + schema.name + "' has no document column for path " + to_string(ref));
    ref.column_index = static_cast<int>(*doc);
    return;
  }
  if (auto idx = schema.column_index(ref.column)) {
    ref.column_index = static_cast<int>(*idx);
    return;
  }
  if (auto doc = schema.document_column()) {
    ref.column_index = static_cast<int>(*doc);
    ref.effective_path.steps.insert(ref.effective_path.steps.begin(), PathStep(ref.column));
    return;
  }
  throw SchemaError("unknown column '" + ref.column + "' in '" + schema.name + "'");
}

Expr bind(Expr e, const SlotResolver& resolve) {
  if (e.kind == Expr::Kind::Column) {
    auto [slot, schema] = resolve(e.ref.var);
    if (schema == nullptr) throw SchemaError("unknown variable '" + e.ref.var + "'");
    bind_ref(e.ref, slot, *schema);
    if (e.ref.column_index < 0) throw SchemaError("whole-record reference '" + e.ref.var + "' used in a predicate");
  }
  for (auto& a : e.args) a = bind(std::move(a), resolve);
  return e;
}

const Value* lookup(const ColumnRef& ref, RecordSlots slots) {
  if (ref.slot < 0 || static_cast<std::size_t>(ref.slot) >= slots.size()) return nullptr;
  const Record* r = slots[ref.slot];
  if (r == nullptr || ref.column_index < 0 || static_cast<std::size_t>(ref.column_index) >= r->values.size()) {
    return nullptr;
  }
  const Value& base = r->values[ref.column_index];
  if (ref.effective_path.empty()) return &base;
  return find_path(base, ref.effective_path);
}

namespace {

const Value kNull{};

const Value& operand(const Expr& e, RecordSlots slots) {
  if (e.kind == Expr::Kind::Literal) return e.literal;
  if (e.kind == Expr::Kind::Column) {
    const Value* v = lookup(e.ref, slots);
    return v ? *v : kNull;
  }
  return kNull;
}

bool compare_values(CmpOp op, const Value& a, const Value& b) {
  if (op == CmpOp::Eq || op == CmpOp::Ne) {
    auto eq = equals(a, b);
    if (!eq) return false;
    return op == CmpOp::Eq ? *eq : !*eq;
  }
  auto c = compare(a, b);
  if (!c) return false;
  switch (op) {
    case CmpOp::Lt: return *c < 0;
    case CmpOp::Le: return *c <= 0;
    case CmpOp::Gt: return *c > 0;
    case CmpOp::Ge: return *c >= 0;
    default: return false;
  }
}

}  // namespace

bool eval(const Expr& e, RecordSlots slots) {
  switch (e.kind) {
    case Expr::Kind::Literal: return e.literal.type() == Value::Type::Bool && e.literal.as_bool();
    case Expr::Kind::Column: {
      const Value* v = lookup(e.ref, slots);
      return v && v->type() == Value::Type::Bool && v->as_bool();
    }
    case Expr::Kind::Compare: return compare_values(e.op, operand(e.args[0], slots), operand(e.args[1], slots));
    case Expr::Kind::And:
      for (const auto& a : e.args) {
        if (!eval(a, slots)) return false;
      }
      return true;
    case Expr::Kind::Or:
      for (const auto& a : e.args) {
        if (eval(a, slots)) return true;
      }
      return false;
    case Expr::Kind::Not: return !eval(e.args[0], slots);
  }
  return false;
}

Value eval_value(const Expr& e, RecordSlots slots) {
  switch (e.kind) {
    case Expr::Kind::Literal: return e.literal;
    case Expr::Kind::Column: {
      const Value* v = lookup(e.ref, slots);
      return v ? *v : Value{};
    }
    default: return Value(eval(e, slots));
  }
}

Predicate Predicate::unary(Expr e, const Schema& schema) {
  Predicate p;
  p.expr_ = bind(std::move(e), [&](std::string_view) { return std::pair<int, const Schema*>{0, &schema}; });
  p.arity_ = 1;
  return p;
}

Predicate Predicate::binary(Expr e, std::string_view left_var, const Schema& left, const Schema& right) {
  Predicate p;
  p.expr_ = bind(std::move(e), [&](std::string_view var) {
    return var == left_var ? std::pair<int, const Schema*>{0, &left} : std::pair<int, const Schema*>{1, &right};
  });
  p.arity_ = 2;
  return p;
}

bool Predicate::operator()(const Record& left, const Record* right) const {
  const Record* slots[2] = {&left, right};
  return eval(expr_, RecordSlots(slots, right ? 2 : 1));
}

bool eval_predicate(const Predicate& pred, const Record& left, const Record* right) {
  if ((pred.arity() == 2) != (right != nullptr)) {
    throw ContractError("predicate arity " + std::to_string(pred.arity()) + " does not match the supplied records");
  }
  return pred(left, right);
}

namespace {

bool is_column_literal_cmp(const Expr& e) {
  if (e.kind != Expr::Kind::Compare) return false;
  auto k0 = e.args[0].kind;
  auto k1 = e.args[1].kind;
  return (k0 == Expr::Kind::Column && k1 == Expr::Kind::Literal) ||
         (k0 == Expr::Kind::Literal && k1 == Expr::Kind::Column);
}

}  // namespace

PredicateClass classify(const Expr& e) {
  auto parts = split_conjuncts(e);
  bool all_ne = true;
  for (const auto& p : parts) {
    if (is_column_literal_cmp(p) && p.op == CmpOp::Eq) return PredicateClass::Equality;
    if (!(is_column_literal_cmp(p) && p.op == CmpOp::Ne)) all_ne = false;
  }
  return all_ne ? PredicateClass::Inequality : PredicateClass::Range;
}

}  // namespace gredo
