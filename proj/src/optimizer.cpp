#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gredo/error.hpp"
#include "operators.hpp"

namespace gredo {

const char* join_shape_name(JoinShape s) {
  switch (s) {
    case JoinShape::MatchFirst: return "match-first";
    case JoinShape::PushDirect: return "push-direct";
    case JoinShape::PushAll: return "push-all";
  }
  return "?";
}

const char* exec_mode_name(ExecMode m) {
  switch (m) {
    case ExecMode::Full: return "full";
    case ExecMode::OptimizerOff: return "optimizer-off";
    case ExecMode::JoinEmulation: return "join-emulation";
  }
  return "?";
}

const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names = {"predicate_pushdown", "match_trimming",  "projection_trimming",
                                                 "traversal_pruning",  "join_pushdown",   "attribute_pushdown"};
  return names;
}

RuleToggles RuleToggles::none() {
  RuleToggles r;
  r.predicate_pushdown = r.match_trimming = r.projection_trimming = r.traversal_pruning = false;
  r.join_pushdown = r.attribute_pushdown = false;
  return r;
}

bool RuleToggles::set(std::string_view rule, bool on) {
  if (rule == "predicate_pushdown") predicate_pushdown = on;
  else if (rule == "match_trimming") match_trimming = on;
  else if (rule == "projection_trimming") projection_trimming = on;
  else if (rule == "traversal_pruning") traversal_pruning = on;
  else if (rule == "join_pushdown") join_pushdown = on;
  else if (rule == "attribute_pushdown") attribute_pushdown = on;
  else return false;
  return true;
}

namespace {

using detail::FilterOp;
using detail::HashJoinOp;
using detail::NestedLoopJoinOp;
using detail::PatternMatchOp;
using detail::ProjectOp;
using detail::PushedJoin;
using detail::TableScanOp;

constexpr double kDefaultSelectivity = 1.0 / 3.0;

struct Unit {
  std::unique_ptr<Operator> op;
  std::set<std::string> vars;
  bool base = false;  // a plain scan, not yet materialized anywhere
};

/// Builds one physical candidate. Predicate bookkeeping is per candidate so
/// every conjunct is applied exactly once.
class Builder {
 public:
  Builder(const Database& db, const LogicalPlan& plan, const QueryOptions& opt, std::shared_ptr<TraversalCounters> ctr)
      : db_(db), plan_(plan), opt_(opt), k_(opt.costs), ctr_(std::move(ctr)) {
    width_ = plan.vars.size();
    join_done_.assign(plan.joins.size(), false);
    sel_done_.assign(plan.selections.size(), false);
  }

  std::unique_ptr<Operator> build(JoinShape shape, std::vector<std::string>& notes) {
    std::vector<Unit> units;
    std::optional<std::size_t> graph_unit;
    for (std::size_t i = 0; i < plan_.sources.size(); ++i) {
      if (plan_.sources[i].graph) {
        graph_unit = units.size();
        units.push_back({});  // filled below, once pushes are known
      } else {
        units.push_back(scan_unit(plan_.var_index(plan_.sources[i].var)));
      }
    }
    if (graph_unit) {
      std::vector<Unit> rest;
      Unit g = graph(shape, units, *graph_unit, notes);
      for (std::size_t i = 0; i < units.size(); ++i) {
        if (i == *graph_unit) {
          rest.push_back(std::move(g));
        } else if (units[i].op) {
          rest.push_back(std::move(units[i]));
        }
      }
      units = std::move(rest);
    }
    Unit all = join_units(std::move(units));
    // whatever is left goes on top
    std::vector<Expr> top;
    for (std::size_t i = 0; i < plan_.selections.size(); ++i) {
      if (!sel_done_[i]) {
        sel_done_[i] = true;
        top.push_back(plan_.selections[i]);
      }
    }
    for (std::size_t i = 0; i < plan_.joins.size(); ++i) {
      if (!join_done_[i]) {
        join_done_[i] = true;
        top.push_back(plan_.joins[i].expr);
      }
    }
    std::unique_ptr<Operator> root = filter(std::move(all.op), std::move(top));
    double rows = root->est_rows, cost = root->est_cost;
    root = std::make_unique<ProjectOp>(std::move(root), plan_.output_names);
    root->est_rows = rows;
    root->est_cost = cost + rows * k_.cpu;
    return root;
  }

 private:
  std::pair<int, const Schema*> resolve(std::string_view var) const {
    int i = plan_.var_index(var);
    return {i, i >= 0 ? plan_.vars[i].schema : nullptr};
  }

  Expr bound(const Expr& e) const {
    return bind(e, [&](std::string_view v) { return resolve(v); });
  }

  const ColumnStats* stats(Oid oid) const { return &db_.stats(oid); }

  double unary_selectivity(const Expr& e, const Schema& schema) const {
    Expr b = bind(e, [&](std::string_view) { return std::pair<int, const Schema*>{0, &schema}; });
    return estimate_selectivity(b, stats(schema.oid), schema);
  }

  double selectivity(const Expr& e) const {
    auto vars = referenced_vars(e);
    if (vars.size() == 1) return unary_selectivity(e, *plan_.var(*vars.begin()).schema);
    if (e.kind == Expr::Kind::Compare && e.op == CmpOp::Eq && e.args[0].kind == Expr::Kind::Column &&
        e.args[1].kind == Expr::Kind::Column) {
      double ndv = 0;
      for (const auto& a : e.args) {
        const Schema& s = *plan_.var(a.ref.var).schema;
        ColumnRef r = a.ref;
        bind_ref(r, 0, s);
        const ColumnStats* cs = stats(s.oid);
        if (const ColumnStat* st = cs->find(r, s)) ndv = std::max(ndv, static_cast<double>(st->ndv));
      }
      return ndv > 0 ? 1.0 / ndv : 0.1;
    }
    return kDefaultSelectivity;
  }

  bool covered(const std::set<std::string>& vars, const Expr& e) const {
    for (const auto& v : referenced_vars(e)) {
      if (!vars.count(v)) return false;
    }
    return true;
  }

  std::unique_ptr<Operator> filter(std::unique_ptr<Operator> child, std::vector<Expr> preds) {
    if (preds.empty()) return child;
    double rows = child->est_rows, cost = child->est_cost;
    std::vector<Expr> b;
    for (const auto& p : preds) {
      b.push_back(bound(p));
      rows *= selectivity(p);
    }
    auto f = std::make_unique<FilterOp>(std::move(child), std::move(preds), std::move(b));
    f->est_cost = cost + f->children()[0]->est_rows * k_.cpu;
    f->est_rows = rows;
    return f;
  }

  /// Applies every pending conjunct the unit now covers.
  void close_over(Unit& u) {
    std::vector<Expr> preds;
    for (std::size_t i = 0; i < plan_.joins.size(); ++i) {
      if (!join_done_[i] && covered(u.vars, plan_.joins[i].expr)) {
        join_done_[i] = true;
        preds.push_back(plan_.joins[i].expr);
      }
    }
    if (opt_.mode != ExecMode::OptimizerOff) {
      for (std::size_t i = 0; i < plan_.selections.size(); ++i) {
        if (!sel_done_[i] && covered(u.vars, plan_.selections[i])) {
          sel_done_[i] = true;
          preds.push_back(plan_.selections[i]);
        }
      }
    }
    if (!preds.empty()) {
      u.op = filter(std::move(u.op), std::move(preds));
      u.base = false;
    }
  }

  std::unique_ptr<Operator> scan(int slot, const Schema& schema, std::optional<Expr> pred, std::string kind) {
    const Collection& coll = db_.collection(schema.oid);
    double n = static_cast<double>(coll.live_count());
    double sel = pred ? unary_selectivity(*pred, schema) : 1.0;
    auto op = std::make_unique<TableScanOp>(coll, plan_.vars[slot].name, slot, width_, std::move(pred), std::move(kind));
    op->est_cost = n * (k_.io + k_.cpu);
    op->est_rows = n * sel;
    return op;
  }

  /// Scan of a relational source with its single-variable selections attached.
  Unit scan_unit(int slot) {
    const PlanVar& v = plan_.vars[slot];
    std::vector<Expr> preds;
    if (opt_.mode != ExecMode::OptimizerOff) {
      for (std::size_t i = 0; i < plan_.selections.size(); ++i) {
        auto vars = referenced_vars(plan_.selections[i]);
        if (!sel_done_[i] && vars.size() == 1 && *vars.begin() == v.name) {
          sel_done_[i] = true;
          preds.push_back(plan_.selections[i]);
        }
      }
    }
    std::optional<Expr> pred;
    if (!preds.empty()) pred = Expr::conj(std::move(preds));
    return {scan(slot, *v.schema, std::move(pred), "TableScan"), {v.name}, true};
  }

  /// Left-deep, greedy by connectivity in FROM order.
  Unit join_units(std::vector<Unit> units) {
    if (units.empty()) throw SchemaError("query has no FROM sources");
    for (auto& u : units) close_over(u);
    Unit acc = std::move(units[0]);
    std::vector<bool> used(units.size(), false);
    used[0] = true;
    for (std::size_t step = 1; step < units.size(); ++step) {
      std::size_t pick = units.size();
      for (std::size_t i = 0; i < units.size() && pick == units.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = 0; j < plan_.joins.size(); ++j) {
          const auto& jp = plan_.joins[j];
          if (join_done_[j]) continue;
          bool links = (acc.vars.count(jp.left) && units[i].vars.count(jp.right)) ||
                       (acc.vars.count(jp.right) && units[i].vars.count(jp.left));
          if (links) {
            pick = i;
            break;
          }
        }
      }
      if (pick == units.size()) {
        for (std::size_t i = 0; i < units.size(); ++i) {
          if (!used[i]) {
            pick = i;
            break;
          }
        }
      }
      used[pick] = true;
      acc = join(std::move(acc), std::move(units[pick]));
    }
    return acc;
  }

  Unit join(Unit left, Unit right) {
    std::set<std::string> vars = left.vars;
    vars.insert(right.vars.begin(), right.vars.end());
    std::vector<Expr> preds;
    std::vector<std::pair<ColumnRef, ColumnRef>> keys;
    std::vector<Expr> residual;
    double sel = 1.0;
    for (std::size_t j = 0; j < plan_.joins.size(); ++j) {
      if (join_done_[j] || !covered(vars, plan_.joins[j].expr)) continue;
      join_done_[j] = true;
      const Expr& e = plan_.joins[j].expr;
      preds.push_back(e);
      sel *= selectivity(e);
      Expr b = bound(e);
      const std::string& a = plan_.joins[j].left;
      const std::string& c = plan_.joins[j].right;
      if (plan_.joins[j].equality && left.vars.count(a) && right.vars.count(c)) {
        keys.emplace_back(b.args[0].ref, b.args[1].ref);
      } else if (plan_.joins[j].equality && left.vars.count(c) && right.vars.count(a)) {
        keys.emplace_back(b.args[1].ref, b.args[0].ref);
      } else {
        residual.push_back(std::move(b));
      }
    }
    if (opt_.mode != ExecMode::OptimizerOff) {
      for (std::size_t i = 0; i < plan_.selections.size(); ++i) {
        if (!sel_done_[i] && covered(vars, plan_.selections[i])) {
          sel_done_[i] = true;
          preds.push_back(plan_.selections[i]);
          sel *= selectivity(plan_.selections[i]);
          residual.push_back(bound(plan_.selections[i]));
        }
      }
    }
    double l = left.op->est_rows, r = right.op->est_rows;
    double cost = left.op->est_cost + right.op->est_cost;
    bool in_memory = !left.base && !right.base;
    JoinPlacement place = choose_join_placement(l, r, in_memory, k_);
    std::unique_ptr<Operator> op;
    if (!keys.empty()) {
      op = std::make_unique<HashJoinOp>(std::move(left.op), std::move(right.op), std::move(keys), std::move(preds),
                                        std::move(residual));
      cost += cost_join(l, r, place, k_, true);
    } else {
      op = std::make_unique<NestedLoopJoinOp>(std::move(left.op), std::move(right.op), preds, std::move(residual));
      cost += cost_join(l, r, place, k_, false);
    }
    op->est_cost = cost;
    op->est_rows = std::max(0.0, l * r * sel);
    return {std::move(op), std::move(vars), false};
  }

  // ------------------------------------------------------------- graph unit

  Unit graph(JoinShape shape, std::vector<Unit>& units, std::size_t self, std::vector<std::string>& notes) {
    const MatchSpec& m = *plan_.match;
    const Pattern& p = m.pattern;
    const auto pattern_vars = p.vars();
    std::set<std::string> vars(pattern_vars.begin(), pattern_vars.end());
    if (m.trim == TrimKind::VertexScan) {
      int slot = plan_.var_index(p.vertices[0].var);
      Unit u{scan(slot, *plan_.vars[slot].schema, p.vertices[0].pred, "VertexScan"), vars, true};
      return u;
    }
    if (m.trim == TrimKind::EdgeScan) {
      int slot = plan_.var_index(p.edges[0].var);
      const PatternEdge& e = p.edges[0];
      Oid src = plan_.var(p.vertices[e.forward ? 0 : 1].var).schema->oid;
      Oid dst = plan_.var(p.vertices[e.forward ? 1 : 0].var).schema->oid;
      std::vector<Expr> parts;
      if (e.pred) parts.push_back(*e.pred);
      parts.push_back(Expr::cmp(CmpOp::Eq, Expr::col(e.var, "soid"), Expr::lit(Value(static_cast<std::int64_t>(src)))));
      parts.push_back(Expr::cmp(CmpOp::Eq, Expr::col(e.var, "toid"), Expr::lit(Value(static_cast<std::int64_t>(dst)))));
      return {scan(slot, *plan_.vars[slot].schema, Expr::conj(std::move(parts)), "EdgeScan"), {e.var}, true};
    }
    if (opt_.mode == ExecMode::JoinEmulation) return emulate(p);

    // pushes: (unit index, anchor var, link join index)
    struct Push {
      std::vector<std::size_t> units;
      std::string anchor;
      std::size_t join;
    };
    std::vector<Push> pushes;
    auto link_of = [&](std::size_t unit, std::set<std::string>& anchored) -> std::optional<std::pair<std::string, std::size_t>> {
      for (std::size_t j = 0; j < plan_.joins.size(); ++j) {
        const auto& jp = plan_.joins[j];
        if (!jp.equality) continue;
        for (int side = 0; side < 2; ++side) {
          const std::string& mine = side ? jp.right : jp.left;
          const std::string& other = side ? jp.left : jp.right;
          if (units[unit].vars.count(mine) && vars.count(other) && !anchored.count(other)) {
            return std::make_pair(other, j);
          }
        }
      }
      return std::nullopt;
    };
    std::set<std::string> anchored;
    if (shape == JoinShape::PushDirect) {
      for (std::size_t i = 0; i < units.size(); ++i) {
        if (i == self) continue;
        if (auto l = link_of(i, anchored)) {
          anchored.insert(l->first);
          pushes.push_back({{i}, l->first, l->second});
        }
      }
    } else if (shape == JoinShape::PushAll) {
      for (std::size_t i = 0; i < units.size() && pushes.empty(); ++i) {
        if (i == self) continue;
        auto l = link_of(i, anchored);
        if (!l) continue;
        // relational component reachable from unit i
        std::vector<std::size_t> comp{i};
        std::set<std::string> cvars = units[i].vars;
        for (bool grew = true; grew;) {
          grew = false;
          for (std::size_t u = 0; u < units.size(); ++u) {
            if (u == self || std::find(comp.begin(), comp.end(), u) != comp.end()) continue;
            for (const auto& jp : plan_.joins) {
              if ((cvars.count(jp.left) && units[u].vars.count(jp.right)) ||
                  (cvars.count(jp.right) && units[u].vars.count(jp.left))) {
                comp.push_back(u);
                cvars.insert(units[u].vars.begin(), units[u].vars.end());
                grew = true;
                break;
              }
            }
          }
        }
        std::sort(comp.begin(), comp.end());
        pushes.push_back({comp, l->first, l->second});
      }
    }

    PatternPlanOptions po;
    if (opt_.mode == ExecMode::OptimizerOff) {
      po.pushdown = po.pruning = po.elision = false;
      po.start_at_last = false;
    } else {
      po.pushdown = opt_.rules.attribute_pushdown;
      po.pruning = opt_.rules.traversal_pruning;
      po.needed = m.projected;
    }

    // blocks are built first so their row estimates feed the pattern's costing
    std::vector<std::pair<Unit, PushedJoin>> blocks;
    double push_cost = 0;
    for (auto& ps : pushes) {
      std::vector<Unit> members;
      for (std::size_t u : ps.units) members.push_back(std::move(units[u]));
      join_done_[ps.join] = true;
      Unit block = join_units(std::move(members));
      const JoinPredicate& jp = plan_.joins[ps.join];
      const PlanVar& anchor = plan_.var(ps.anchor);
      const std::string& partner = jp.left == ps.anchor ? jp.right : jp.left;
      const Expr& anchor_side = jp.left == ps.anchor ? jp.expr.args[0] : jp.expr.args[1];
      const Expr& partner_side = jp.left == ps.anchor ? jp.expr.args[1] : jp.expr.args[0];
      PushedJoin pj;
      pj.var = ps.anchor;
      pj.is_edge = anchor.kind == VarKind::Edge;
      pj.element = static_cast<std::size_t>(anchor.element);
      pj.table = anchor.schema;
      pj.pred = jp.expr;
      pj.bound = bind(Expr::cmp(CmpOp::Eq, anchor_side, partner_side), [&](std::string_view v) {
        return std::pair<int, const Schema*>{v == ps.anchor ? 0 : 1, plan_.var(v).schema};
      });
      pj.partner_slot = plan_.var_index(partner);
      double brows = block.op->est_rows;
      double trows = static_cast<double>(db_.collection(anchor.schema->oid).live_count());
      bool key_lookup = !pj.is_edge && anchor_side.ref.column == "vid" && anchor_side.ref.path.empty();
      push_cost += block.op->est_cost +
                   (key_lookup ? brows * (k_.io + k_.cpu) : trows * (k_.io + k_.cpu) + brows * k_.cpu);
      po.externally_restricted.insert(ps.anchor);
      po.external_rows[ps.anchor] = key_lookup ? std::min(brows, trows) : std::min(trows, brows * trows * selectivity(jp.expr));
      blocks.emplace_back(std::move(block), std::move(pj));
    }

    StatsProvider sp = [this](Oid o) { return stats(o); };
    AnnotatedPattern ap = plan_pattern(db_, p, sp, k_, po);
    for (const auto& e : ap.vertex_plans) {
      if (e.pruned) notes.push_back("traversal_pruning");
    }
    for (const auto& e : ap.edge_plans) {
      if (e.pruned) notes.push_back("traversal_pruning");
    }
    double cost = ap.est_cost + push_cost, rows = ap.est_rows;
    std::vector<int> vslots, eslots;
    for (const auto& v : p.vertices) vslots.push_back(plan_.var_index(v.var));
    for (const auto& e : p.edges) eslots.push_back(plan_.var_index(e.var));
    auto op = std::make_unique<PatternMatchOp>(db_, std::move(ap), vslots, eslots, width_, ctr_);
    for (auto& [block, pj] : blocks) {
      vars.insert(block.vars.begin(), block.vars.end());
      op->add_block(std::move(block.op), std::move(pj));
    }
    op->est_cost = cost;
    op->est_rows = rows;
    Unit u{std::move(op), std::move(vars), false};
    close_over(u);
    return u;
  }

  /// The pattern as joins over vertex and edge table scans.
  Unit emulate(const Pattern& p) {
    auto vertex_unit = [&](std::size_t i) {
      int slot = plan_.var_index(p.vertices[i].var);
      return Unit{scan(slot, *plan_.vars[slot].schema, p.vertices[i].pred, "TableScan"), {p.vertices[i].var}, true};
    };
    Unit acc = vertex_unit(0);
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      const PatternEdge& e = p.edges[i];
      const std::string& a = p.vertices[i].var;
      const std::string& b = p.vertices[i + 1].var;
      const std::string& src = e.forward ? a : b;
      const std::string& dst = e.forward ? b : a;
      std::vector<Expr> parts;
      if (e.pred) parts.push_back(*e.pred);
      parts.push_back(Expr::cmp(CmpOp::Eq, Expr::col(e.var, "soid"),
                                Expr::lit(Value(static_cast<std::int64_t>(plan_.var(src).schema->oid)))));
      parts.push_back(Expr::cmp(CmpOp::Eq, Expr::col(e.var, "toid"),
                                Expr::lit(Value(static_cast<std::int64_t>(plan_.var(dst).schema->oid)))));
      int eslot = plan_.var_index(e.var);
      Unit eu{scan(eslot, *plan_.vars[eslot].schema, Expr::conj(std::move(parts)), "TableScan"), {e.var}, true};
      Expr near = Expr::cmp(CmpOp::Eq, Expr::col(a, "vid"), Expr::col(e.var, e.forward ? "svid" : "tvid"));
      acc = key_join(std::move(acc), std::move(eu), near);
      Expr far = Expr::cmp(CmpOp::Eq, Expr::col(e.var, e.forward ? "tvid" : "svid"), Expr::col(b, "vid"));
      acc = key_join(std::move(acc), vertex_unit(i + 1), far);
    }
    close_over(acc);
    return acc;
  }

  Unit key_join(Unit left, Unit right, const Expr& e) {
    Expr b = bound(e);
    double l = left.op->est_rows, r = right.op->est_rows;
    double cost = left.op->est_cost + right.op->est_cost +
                  cost_join(l, r, choose_join_placement(l, r, !left.base && !right.base, k_), k_, true);
    double sel = selectivity(e);
    std::set<std::string> vars = left.vars;
    vars.insert(right.vars.begin(), right.vars.end());
    auto op = std::make_unique<HashJoinOp>(std::move(left.op), std::move(right.op),
                                           std::vector<std::pair<ColumnRef, ColumnRef>>{{b.args[0].ref, b.args[1].ref}},
                                           std::vector<Expr>{e}, std::vector<Expr>{});
    op->est_cost = cost;
    op->est_rows = l * r * sel;
    return {std::move(op), std::move(vars), false};
  }

  const Database& db_;
  const LogicalPlan& plan_;
  const QueryOptions& opt_;
  const CostConstants& k_;
  std::shared_ptr<TraversalCounters> ctr_;
  std::size_t width_ = 0;
  std::vector<bool> join_done_;
  std::vector<bool> sel_done_;
};

/// Shapes that differ from match-first: both need a pushable link.
bool has_pushable_link(const LogicalPlan& plan) {
  for (const auto& j : plan.joins) {
    if (j.equality && plan.is_graph_var(j.left) != plan.is_graph_var(j.right)) return true;
  }
  return false;
}

std::vector<std::size_t> direct_sources(const LogicalPlan& plan) {
  std::vector<std::size_t> out;
  std::set<std::string> anchored;
  for (std::size_t i = 0; i < plan.sources.size(); ++i) {
    if (plan.sources[i].graph) continue;
    for (const auto& j : plan.joins) {
      if (!j.equality) continue;
      const std::string* other = j.left == plan.sources[i].var ? &j.right : j.right == plan.sources[i].var ? &j.left : nullptr;
      if (other && plan.is_graph_var(*other) && !anchored.count(*other)) {
        anchored.insert(*other);
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

/// Relational sources connected to the first graph-linked one.
std::vector<std::size_t> component_sources(const LogicalPlan& plan) {
  auto direct = direct_sources(plan);
  if (direct.empty()) return {};
  std::set<std::string> vars{plan.sources[direct[0]].var};
  std::vector<std::size_t> comp{direct[0]};
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < plan.sources.size(); ++i) {
      if (plan.sources[i].graph || std::find(comp.begin(), comp.end(), i) != comp.end()) continue;
      for (const auto& j : plan.joins) {
        if ((vars.count(j.left) && j.right == plan.sources[i].var) || (vars.count(j.right) && j.left == plan.sources[i].var)) {
          comp.push_back(i);
          vars.insert(plan.sources[i].var);
          grew = true;
          break;
        }
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

}  // namespace

PhysicalPlan optimize(const Database& db, LogicalPlan plan, const QueryOptions& options) {
  options.costs.validate();
  QueryOptions opt = options;
  if (opt.mode == ExecMode::OptimizerOff) opt.rules = RuleToggles::none();
  const RuleToggles& r = opt.rules;
  if (r.predicate_pushdown && rule_graph_predicate_pushdown(plan)) plan.rules.push_back("predicate_pushdown");
  if (r.match_trimming && rule_match_trimming(plan, db.catalog())) plan.rules.push_back("match_trimming");
  if (r.projection_trimming && rule_projection_trimming(plan)) plan.rules.push_back("projection_trimming");

  PhysicalPlan out;
  out.mode = opt.mode;
  std::vector<JoinShape> shapes{JoinShape::MatchFirst};
  bool pushable = plan.match && plan.match->trim == TrimKind::None && opt.mode == ExecMode::Full && r.join_pushdown &&
                  has_pushable_link(plan);
  if (pushable) {
    shapes.push_back(JoinShape::PushDirect);
    auto comp = component_sources(plan);
    if (comp.size() > 1 || comp != direct_sources(plan)) shapes.push_back(JoinShape::PushAll);
  }

  std::unique_ptr<Operator> best;
  std::vector<std::string> best_notes;
  for (JoinShape s : shapes) {
    std::vector<std::string> notes;
    Builder b(db, plan, opt, out.traversal);
    auto root = b.build(s, notes);
    out.alternatives.emplace_back(s, root->est_cost);
    bool take = !best || (opt.force_shape ? s == *opt.force_shape : root->est_cost < best->est_cost);
    if (take) {
      best = std::move(root);
      best_notes = notes;
      out.shape = s;
    }
  }
  out.root = std::move(best);
  out.rules = plan.rules;
  if (!best_notes.empty()) out.rules.push_back("traversal_pruning");
  if (out.shape != JoinShape::MatchFirst) out.rules.push_back("join_pushdown");
  for (const auto& item : plan.projection) {
    if (item.expr.kind == Expr::Kind::Column && item.expr.ref.whole_record()) {
      Expr e = item.expr;
      e.ref.slot = plan.var_index(e.ref.var);
      out.outputs.push_back(std::move(e));
      continue;
    }
    out.outputs.push_back(bind(item.expr, [&](std::string_view v) {
      int i = plan.var_index(v);
      return std::pair<int, const Schema*>{i, i >= 0 ? plan.vars[i].schema : nullptr};
    }));
  }
  out.output_names = plan.output_names;
  out.logical = std::move(plan);
  return out;
}

namespace {

void explain_into(const Operator& op, int depth, std::string& out) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " cost=%.1f rows=%.1f", op.est_cost, op.est_rows);
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ') + op.name();
  std::string p = op.params();
  if (!p.empty()) out += " " + p;
  out += buf;
  out += "\n";
  for (const Operator* c : op.children()) explain_into(*c, depth + 1, out);
}

}  // namespace

std::string explain(const PhysicalPlan& plan) {
  std::string out;
  if (plan.root) explain_into(*plan.root, 0, out);
  if (plan.logical.match && plan.logical.match->trim == TrimKind::None && plan.mode == ExecMode::Full) {
    out += "shape: " + std::string(join_shape_name(plan.shape));
    for (const auto& [s, c] : plan.alternatives) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f", c);
      out += std::string(" ") + join_shape_name(s) + "=" + buf;
    }
    out += "\n";
  }
  out += "rules:";
  if (plan.rules.empty()) out += " none";
  for (std::size_t i = 0; i < plan.rules.size(); ++i) out += (i ? ", " : " ") + plan.rules[i];
  out += "\n";
  return out;
}

}  // namespace gredo
