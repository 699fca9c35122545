#include "gredo/stats.hpp"

#include <algorithm>
#include <unordered_set>

#include "gredo/record_store.hpp"

namespace gredo {

namespace {

struct ValueHash {
  std::size_t operator()(const Value& v) const { return hash_value(v); }
};
struct ValueEq {
  bool operator()(const Value& a, const Value& b) const {
    auto e = equals(a, b);
    return e ? *e : a.is_null() && b.is_null();
  }
};

struct Accumulator {
  ColumnStat stat;
  std::unordered_set<Value, ValueHash, ValueEq> distinct;

  std::uint64_t seen = 0;

  void add(const Value* v) {
    ++seen;
    if (v == nullptr || v->is_null()) {
      ++stat.null_count;
      return;
    }
    distinct.insert(*v);
    if (!stat.min || compare(*v, *stat.min).value_or(0) < 0) stat.min = *v;
    if (!stat.max || compare(*v, *stat.max).value_or(0) > 0) stat.max = *v;
  }
  ColumnStat finish() {
    stat.ndv = distinct.size();
    return stat;
  }
};

}  // namespace

const ColumnStat* ColumnStats::find(const ColumnRef& ref, const Schema& schema) const {
  if (ref.column_index < 0 || static_cast<std::size_t>(ref.column_index) >= columns.size()) return nullptr;
  if (ref.effective_path.empty()) return &columns[ref.column_index];
  if (ref.effective_path.steps.size() != 1) return nullptr;
  const auto* key = std::get_if<std::string>(&ref.effective_path.steps[0]);
  if (key == nullptr) return nullptr;
  auto it = document_keys.find(schema.columns[ref.column_index].name + "." + *key);
  return it == document_keys.end() ? nullptr : &it->second;
}

ColumnStats collect_stats(const Collection& collection) {
  const Schema& schema = collection.schema();
  std::vector<Accumulator> cols(schema.arity());
  std::map<std::string, Accumulator> keys;
  ColumnStats out;
  auto cursor = collection.scan();
  while (const Record* r = cursor.next()) {
    ++out.row_count;
    for (std::size_t i = 0; i < schema.arity(); ++i) {
      const Value& v = r->values[i];
      cols[i].add(&v);
      if (v.type() == Value::Type::Document) {
        const auto& doc = v.as_document();
        for (std::size_t k = 0; k < doc.size(); ++k) {
          keys[schema.columns[i].name + "." + doc.key_at(k)].add(&doc.value_at(k));
        }
      }
    }
  }
  for (auto& c : cols) out.columns.push_back(c.finish());
  for (auto& [k, acc] : keys) {
    // rows lacking the key count as nulls
    acc.stat.null_count += out.row_count - acc.seen;
    ColumnStat s = acc.finish();
    out.document_keys.emplace(k, s);
  }
  return out;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double ndv_fraction(const ColumnStat& s) { return s.ndv == 0 ? 0.0 : 1.0 / static_cast<double>(s.ndv); }

double range_fraction(const ColumnStat& s, CmpOp op, const Value& bound) {
  if (!s.min || !s.max) return 0.0;
  auto lo = s.min->as_number();
  auto hi = s.max->as_number();
  auto b = bound.as_number();
  if (!lo || !hi || !b) return 1.0 / 3.0;
  if (*hi == *lo) {
    bool keep = false;
    switch (op) {
      case CmpOp::Lt: keep = *lo < *b; break;
      case CmpOp::Le: keep = *lo <= *b; break;
      case CmpOp::Gt: keep = *lo > *b; break;
      case CmpOp::Ge: keep = *lo >= *b; break;
      default: break;
    }
    return keep ? 1.0 : 0.0;
  }
  double below = (*b - *lo) / (*hi - *lo);
  switch (op) {
    case CmpOp::Lt:
    case CmpOp::Le: return clamp01(below);
    case CmpOp::Gt:
    case CmpOp::Ge: return clamp01(1.0 - below);
    default: return 1.0;
  }
}

double estimate(const Expr& e, const ColumnStats& stats, const Schema& schema) {
  switch (e.kind) {
    case Expr::Kind::And: {
      double s = 1.0;
      for (const auto& a : e.args) s *= estimate(a, stats, schema);
      return s;
    }
    case Expr::Kind::Or: {
      double s = 0.0;
      for (const auto& a : e.args) {
        double t = estimate(a, stats, schema);
        s = s + t - s * t;
      }
      return s;
    }
    case Expr::Kind::Not: return 1.0 - estimate(e.args[0], stats, schema);
    case Expr::Kind::Literal: return e.literal.type() == Value::Type::Bool && e.literal.as_bool() ? 1.0 : 0.0;
    case Expr::Kind::Column: return 0.5;
    case Expr::Kind::Compare: break;
  }
  const Expr* col = nullptr;
  const Expr* lit = nullptr;
  CmpOp op = e.op;
  if (e.args[0].kind == Expr::Kind::Column && e.args[1].kind == Expr::Kind::Literal) {
    col = &e.args[0];
    lit = &e.args[1];
  } else if (e.args[1].kind == Expr::Kind::Column && e.args[0].kind == Expr::Kind::Literal) {
    col = &e.args[1];
    lit = &e.args[0];
    op = flip(op);
  } else {
    return 1.0;
  }
  const ColumnStat* s = stats.find(col->ref, schema);
  if (s == nullptr || stats.row_count == 0) return 1.0;
  if (lit->literal.is_null()) return 0.0;
  double non_null = 1.0 - static_cast<double>(s->null_count) / static_cast<double>(stats.row_count);
  non_null = clamp01(non_null);
  switch (op) {
    case CmpOp::Eq: return clamp01(ndv_fraction(*s) * non_null);
    case CmpOp::Ne: return clamp01((1.0 - ndv_fraction(*s)) * non_null);
    default: return clamp01(range_fraction(*s, op, lit->literal) * non_null);
  }
}

}  // namespace

double estimate_selectivity(const Expr& bound_pred, const ColumnStats* stats, const Schema& schema) {
  if (stats == nullptr) return 1.0;
  return clamp01(estimate(bound_pred, *stats, schema));
}

}  // namespace gredo
