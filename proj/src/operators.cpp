#include "operators.hpp"

#include <algorithm>

#include "gredo/error.hpp"

namespace gredo {

std::vector<Operator*> Operator::children() const {
  std::vector<Operator*> out;
  for (const auto& c : children_) out.push_back(c.get());
  return out;
}

namespace detail {

namespace {

std::string join_text(const std::vector<Expr>& preds) {
  std::string s;
  for (std::size_t i = 0; i < preds.size(); ++i) s += (i ? " AND " : "") + to_string(preds[i]);
  return s;
}

bool all_true(const std::vector<Expr>& bound, const Row& row) {
  RecordSlots slots(row.data(), row.size());
  for (const auto& e : bound) {
    if (!eval(e, slots)) return false;
  }
  return true;
}

}  // namespace

Row merge_rows(const Row& a, const Row& b) {
  Row out = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != nullptr) out[i] = b[i];
  }
  return out;
}

// ------------------------------------------------------------------ TableScan

TableScanOp::TableScanOp(const Collection& coll, std::string var, int slot, std::size_t width,
                         std::optional<Expr> pred, std::string kind)
    : coll_(coll), var_(std::move(var)), slot_(slot), width_(width), pred_(std::move(pred)), kind_(std::move(kind)) {}

void TableScanOp::open() {
  std::optional<Predicate> p;
  if (pred_) p = Predicate::unary(*pred_, coll_.schema());
  cursor_.emplace(coll_.scan(std::move(p)));
}

bool TableScanOp::next(Row& row) {
  const Record* r = cursor_->next();
  if (r == nullptr) return false;
  row.assign(width_, nullptr);
  row[slot_] = r;
  return true;
}

std::string TableScanOp::params() const {
  std::string s = coll_.schema().name;
  if (var_ != s) s += " AS " + var_;
  if (pred_) s += " filter=[" + to_string(*pred_) + "]";
  return s;
}

// --------------------------------------------------------------------- Filter

FilterOp::FilterOp(std::unique_ptr<Operator> child, std::vector<Expr> preds, std::vector<Expr> bound)
    : preds_(std::move(preds)), bound_(std::move(bound)) {
  children_.push_back(std::move(child));
}

bool FilterOp::next(Row& row) {
  while (children_[0]->next(row)) {
    if (all_true(bound_, row)) return true;
  }
  return false;
}

std::string FilterOp::params() const { return "[" + join_text(preds_) + "]"; }

// ------------------------------------------------------------------- HashJoin

HashJoinOp::HashJoinOp(std::unique_ptr<Operator> left, std::unique_ptr<Operator> right,
                       std::vector<std::pair<ColumnRef, ColumnRef>> keys, std::vector<Expr> preds,
                       std::vector<Expr> residual)
    : keys_(std::move(keys)), preds_(std::move(preds)), residual_(std::move(residual)) {
  children_.push_back(std::move(left));
  children_.push_back(std::move(right));
}

std::size_t HashJoinOp::hash_keys(const Row& row, bool left, bool& has_null) const {
  RecordSlots slots(row.data(), row.size());
  std::size_t h = 0x345678;
  has_null = false;
  for (const auto& [l, r] : keys_) {
    const Value* v = lookup(left ? l : r, slots);
    if (v == nullptr || v->is_null()) {
      has_null = true;
      return 0;
    }
    h = h * 1000003 ^ hash_value(*v);
  }
  return h;
}

void HashJoinOp::open() {
  build_.clear();
  table_.clear();
  children_[1]->open();
  Row r;
  while (children_[1]->next(r)) {
    bool null_key = false;
    std::size_t h = hash_keys(r, false, null_key);
    if (null_key) continue;
    table_.emplace(h, build_.size());
    build_.push_back(r);
  }
  children_[1]->close();
  children_[0]->open();
  matches_.clear();
  match_pos_ = 0;
}

bool HashJoinOp::next(Row& row) {
  for (;;) {
    while (match_pos_ < matches_.size()) {
      const Row& b = build_[matches_[match_pos_++]];
      Row out = merge_rows(probe_, b);
      RecordSlots slots(out.data(), out.size());
      bool ok = true;
      for (const auto& [l, r] : keys_) {
        const Value* a = lookup(l, slots);
        const Value* c = lookup(r, slots);
        auto eq = equals(*a, *c);
        if (!eq || !*eq) {
          ok = false;
          break;
        }
      }
      if (ok && all_true(residual_, out)) {
        row = std::move(out);
        return true;
      }
    }
    if (!children_[0]->next(probe_)) return false;
    matches_.clear();
    match_pos_ = 0;
    bool null_key = false;
    std::size_t h = hash_keys(probe_, true, null_key);
    if (null_key) continue;
    auto [lo, hi] = table_.equal_range(h);
    for (auto it = lo; it != hi; ++it) matches_.push_back(it->second);
    std::sort(matches_.begin(), matches_.end());
  }
}

void HashJoinOp::close() {
  children_[0]->close();
  build_.clear();
  table_.clear();
}

std::string HashJoinOp::params() const { return "[" + join_text(preds_) + "]"; }

// ------------------------------------------------------------ NestedLoopJoin

NestedLoopJoinOp::NestedLoopJoinOp(std::unique_ptr<Operator> left, std::unique_ptr<Operator> right,
                                   std::vector<Expr> preds, std::vector<Expr> bound)
    : preds_(std::move(preds)), bound_(std::move(bound)) {
  children_.push_back(std::move(left));
  children_.push_back(std::move(right));
}

void NestedLoopJoinOp::open() {
  inner_.clear();
  children_[1]->open();
  Row r;
  while (children_[1]->next(r)) inner_.push_back(r);
  children_[1]->close();
  children_[0]->open();
  have_outer_ = false;
  pos_ = 0;
}

bool NestedLoopJoinOp::next(Row& row) {
  for (;;) {
    if (!have_outer_) {
      if (!children_[0]->next(outer_)) return false;
      have_outer_ = true;
      pos_ = 0;
    }
    while (pos_ < inner_.size()) {
      Row out = merge_rows(outer_, inner_[pos_++]);
      if (all_true(bound_, out)) {
        row = std::move(out);
        return true;
      }
    }
    have_outer_ = false;
  }
}

void NestedLoopJoinOp::close() {
  children_[0]->close();
  inner_.clear();
}

std::string NestedLoopJoinOp::params() const { return preds_.empty() ? "[cross]" : "[" + join_text(preds_) + "]"; }

// --------------------------------------------------------------- PatternMatch

PatternMatchOp::PatternMatchOp(const Database& db, AnnotatedPattern ap, std::vector<int> vertex_slots,
                               std::vector<int> edge_slots, std::size_t width,
                               std::shared_ptr<TraversalCounters> counters)
    : db_(db),
      ap_(std::move(ap)),
      vertex_slots_(std::move(vertex_slots)),
      edge_slots_(std::move(edge_slots)),
      width_(width),
      counters_(std::move(counters)) {}

void PatternMatchOp::add_block(std::unique_ptr<Operator> block, PushedJoin push) {
  children_.push_back(std::move(block));
  pushes_.push_back(std::move(push));
}

void PatternMatchOp::open() {
  blocks_.assign(pushes_.size(), {});
  MatchInputs inputs;
  for (std::size_t i = 0; i < pushes_.size(); ++i) {
    Operator& child = *children_[i];
    child.open();
    Row r;
    while (child.next(r)) blocks_[i].push_back(r);
    child.close();
    std::vector<const Record*> partners;
    partners.reserve(blocks_[i].size());
    for (const auto& row : blocks_[i]) partners.push_back(row[pushes_[i].partner_slot]);
    inputs.external[pushes_[i].var] = cross_model_join_graph(db_, *ap_.graph, *pushes_[i].table, pushes_[i].is_edge,
                                                              partners, pushes_[i].bound);
  }
  rel_ = match_pattern(db_, ap_, inputs, counters_.get());
  pos_ = 0;
}

bool PatternMatchOp::next(Row& row) {
  if (pos_ >= rel_.rows.size()) return false;
  const GraphRelation::Row& g = rel_.rows[pos_++];
  row.assign(width_, nullptr);
  for (std::size_t i = 0; i < vertex_slots_.size(); ++i) row[vertex_slots_[i]] = g.vertices[i];
  for (std::size_t i = 0; i < edge_slots_.size(); ++i) row[edge_slots_[i]] = g.edges[i];
  for (std::size_t i = 0; i < pushes_.size(); ++i) {
    const PushedJoin& p = pushes_[i];
    std::int32_t payload = p.is_edge ? g.edge_ext[p.element] : g.vertex_ext[p.element];
    if (payload < 0) throw ExecutionError("pushed candidate lost its join partner");
    row = merge_rows(row, blocks_[i][payload]);
  }
  return true;
}

void PatternMatchOp::close() {
  rel_ = {};
  blocks_.clear();
}

std::string PatternMatchOp::params() const {
  std::string s = ap_.pattern.graph + " " + ap_.summary();
  for (const auto& p : pushes_) s += " push(" + p.var + " <- " + to_string(p.pred) + ")";
  return s;
}

// -------------------------------------------------------------------- Project

ProjectOp::ProjectOp(std::unique_ptr<Operator> child, std::vector<std::string> names) : names_(std::move(names)) {
  children_.push_back(std::move(child));
}

std::string ProjectOp::params() const {
  std::string s = "[";
  for (std::size_t i = 0; i < names_.size(); ++i) s += (i ? ", " : "") + names_[i];
  return s + "]";
}

}  // namespace detail

// ----------------------------------------------------------- cross-model join

namespace {

bool is_column(const Expr& e) { return e.kind == Expr::Kind::Column && !e.ref.whole_record(); }

}  // namespace

std::vector<std::pair<const Record*, const Record*>> cross_model_join(const Collection& left, std::string_view left_var,
                                                                      const Collection& right,
                                                                      std::string_view right_var, const Expr& pred) {
  Expr bound = bind(pred, [&](std::string_view var) -> std::pair<int, const Schema*> {
    if (var == left_var) return {0, &left.schema()};
    if (var == right_var) return {1, &right.schema()};
    return {-1, nullptr};
  });
  auto ls = left.scan_all();
  auto rs = right.scan_all();
  std::vector<std::pair<const Record*, const Record*>> out;
  if (bound.kind == Expr::Kind::Compare && bound.op == CmpOp::Eq && is_column(bound.args[0]) &&
      is_column(bound.args[1]) && bound.args[0].ref.slot != bound.args[1].ref.slot) {
    const ColumnRef& lref = bound.args[0].ref.slot == 0 ? bound.args[0].ref : bound.args[1].ref;
    const ColumnRef& rref = bound.args[0].ref.slot == 0 ? bound.args[1].ref : bound.args[0].ref;
    // hash the smaller side
    bool build_left = ls.size() <= rs.size();
    const auto& build = build_left ? ls : rs;
    const auto& probe = build_left ? rs : ls;
    const ColumnRef& bref = build_left ? lref : rref;
    const ColumnRef& pref = build_left ? rref : lref;
    auto value_of = [](const ColumnRef& ref, const Record* r) {
      const Record* slots[2] = {nullptr, nullptr};
      slots[ref.slot] = r;
      return lookup(ref, RecordSlots(slots, 2));
    };
    std::unordered_multimap<std::size_t, const Record*> table;
    for (const Record* r : build) {
      const Value* v = value_of(bref, r);
      if (v && !v->is_null()) table.emplace(hash_value(*v), r);
    }
    for (const Record* p : probe) {
      const Value* v = value_of(pref, p);
      if (!v || v->is_null()) continue;
      std::vector<const Record*> hits;
      auto [lo, hi] = table.equal_range(hash_value(*v));
      for (auto it = lo; it != hi; ++it) {
        auto eq = equals(*value_of(bref, it->second), *v);
        if (eq && *eq) hits.push_back(it->second);
      }
      std::sort(hits.begin(), hits.end(), [](const Record* a, const Record* b) { return a->tid < b->tid; });
      for (const Record* h : hits) out.emplace_back(build_left ? h : p, build_left ? p : h);
    }
  } else {
    for (const Record* l : ls) {
      for (const Record* r : rs) {
        const Record* slots[2] = {l, r};
        if (eval(bound, RecordSlots(slots, 2))) out.emplace_back(l, r);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first->tid != b.first->tid ? a.first->tid < b.first->tid : a.second->tid < b.second->tid;
  });
  return out;
}

ExternalCandidates cross_model_join_graph(const Database& db, const GraphDef& graph, const Schema& element_table,
                                          bool element_is_edge, const std::vector<const Record*>& records,
                                          const Expr& bound_pred) {
  bool member = element_is_edge ? element_table.oid == graph.edge_oid
                                : std::find(graph.vertex_oids.begin(), graph.vertex_oids.end(), element_table.oid) !=
                                      graph.vertex_oids.end();
  if (!member) throw ContractError("'" + element_table.name + "' is not part of graph '" + graph.name + "'");
  ExternalCandidates out;
  const Collection& coll = db.collection(element_table.oid);
  auto slot_value = [](const ColumnRef& ref, const Record* element, const Record* partner) {
    const Record* slots[2] = {element, partner};
    return lookup(ref, RecordSlots(slots, 2));
  };
  const bool equi = bound_pred.kind == Expr::Kind::Compare && bound_pred.op == CmpOp::Eq &&
                    is_column(bound_pred.args[0]) && is_column(bound_pred.args[1]) &&
                    bound_pred.args[0].ref.slot != bound_pred.args[1].ref.slot;
  if (equi) {
    const ColumnRef& eref = bound_pred.args[0].ref.slot == 0 ? bound_pred.args[0].ref : bound_pred.args[1].ref;
    const ColumnRef& pref = bound_pred.args[0].ref.slot == 0 ? bound_pred.args[1].ref : bound_pred.args[0].ref;
    if (!element_is_edge && eref.column_index == 0 && eref.effective_path.empty()) {
      // key lookup: the partner value names the vertex directly
      for (std::size_t i = 0; i < records.size(); ++i) {
        const Value* v = slot_value(pref, nullptr, records[i]);
        if (v == nullptr) continue;
        std::optional<std::int64_t> vid;
        if (v->type() == Value::Type::Int) {
          vid = v->as_int();
        } else if (v->type() == Value::Type::Float && v->as_float() == static_cast<double>(static_cast<std::int64_t>(v->as_float()))) {
          vid = static_cast<std::int64_t>(v->as_float());
        }
        if (!vid) continue;
        auto tid = db.find_vertex({element_table.oid, *vid});
        if (!tid) continue;
        out.members.emplace_back(&coll.fetch(*tid), static_cast<std::int32_t>(i));
      }
      return out;
    }
    std::unordered_multimap<std::size_t, std::int32_t> table;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const Value* v = slot_value(pref, nullptr, records[i]);
      if (v && !v->is_null()) table.emplace(hash_value(*v), static_cast<std::int32_t>(i));
    }
    auto cursor = coll.scan();
    std::vector<std::int32_t> hits;
    while (const Record* r = cursor.next()) {
      const Value* v = slot_value(eref, r, nullptr);
      if (!v || v->is_null()) continue;
      hits.clear();
      auto [lo, hi] = table.equal_range(hash_value(*v));
      for (auto it = lo; it != hi; ++it) {
        auto eq = equals(*v, *slot_value(pref, nullptr, records[it->second]));
        if (eq && *eq) hits.push_back(it->second);
      }
      std::sort(hits.begin(), hits.end());
      for (std::int32_t i : hits) out.members.emplace_back(r, i);
    }
    return out;
  }
  auto cursor = coll.scan();
  while (const Record* r = cursor.next()) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const Record* slots[2] = {r, records[i]};
      if (eval(bound_pred, RecordSlots(slots, 2))) out.members.emplace_back(r, static_cast<std::int32_t>(i));
    }
  }
  return out;
}

}  // namespace gredo
