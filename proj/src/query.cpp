#include <algorithm>

#include "gredo/error.hpp"
#include "gredo/query.hpp"

namespace gredo {

namespace {

Value output_value(const Expr& e, const LogicalPlan& plan, RecordSlots slots) {
  if (e.kind == Expr::Kind::Column && e.ref.whole_record()) {
    const Record* r = e.ref.slot >= 0 ? slots[e.ref.slot] : nullptr;
    if (r == nullptr) return Value{};
    const Schema& schema = *plan.vars[e.ref.slot].schema;
    if (schema.kind == CollectionKind::DocumentCollection) return r->values[0];
    Document d;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) d.set(schema.columns[i].name, r->values[i]);
    return Value(std::move(d));
  }
  if (e.kind == Expr::Kind::Column) {
    const Value* v = lookup(e.ref, slots);
    return v ? *v : Value{};
  }
  return eval_value(e, slots);
}

}  // namespace

QueryResult execute(const Database& db, PhysicalPlan& plan) {
  if (!plan.root) throw ContractError("plan has no operators");
  QueryResult out;
  out.columns = plan.output_names;
  *plan.traversal = TraversalCounters{};
  AccessSnapshot before = db.records().counters();
  Operator& root = *plan.root;
  root.open();
  Row row;
  while (root.next(row)) {
    RecordSlots slots(row.data(), row.size());
    std::vector<Value> values;
    values.reserve(plan.outputs.size());
    for (const auto& e : plan.outputs) values.push_back(output_value(e, plan.logical, slots));
    out.rows.push_back(std::move(values));
  }
  root.close();
  AccessSnapshot delta = db.records().counters() - before;
  out.counters.scanned = delta.scanned;
  out.counters.tid_fetches = delta.tid_fetches;
  out.counters.pruned_emissions = plan.traversal->pruned_emissions;
  out.counters.membership_tests = plan.traversal->membership_tests;
  return out;
}

QueryResult run_query(const Database& db, const QueryAst& ast, const QueryOptions& options) {
  PhysicalPlan plan = optimize(db, build_logical_plan(ast, db.catalog()), options);
  return execute(db, plan);
}

QueryResult run_query(const Database& db, std::string_view text, const QueryOptions& options) {
  return run_query(db, parse_query(text), options);
}

namespace {

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    int c = total_order(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

}  // namespace

std::vector<std::vector<Value>> sorted_rows(const QueryResult& r) {
  auto rows = r.rows;
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

std::uint64_t result_hash(const QueryResult& r) {
  std::vector<std::uint64_t> hashes;
  hashes.reserve(r.rows.size());
  for (const auto& row : r.rows) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& v : row) h = (h ^ hash_value(v)) * 0x100000001b3ULL;
    hashes.push_back(h);
  }
  std::sort(hashes.begin(), hashes.end());
  std::uint64_t h = 0xcbf29ce484222325ULL ^ r.columns.size();
  for (auto x : hashes) h = (h ^ x) * 0x100000001b3ULL;
  return h;
}

}  // namespace gredo
