#include "gredo/graph_ops.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>

#include "gredo/error.hpp"

namespace gredo {

OperandSet OperandSet::vertex_records(Oid oid, std::vector<const Record*> records) {
  OperandSet s;
  s.kind = OperandKind::VertexRecords;
  s.oid = oid;
  for (const Record* r : records) s.index.insert(r->tid);
  s.records = std::move(records);
  return s;
}

OperandSet OperandSet::edge_records(Oid oid, std::vector<const Record*> records) {
  OperandSet s = vertex_records(oid, std::move(records));
  s.kind = OperandKind::EdgeRecords;
  return s;
}

OperandSet OperandSet::all_edges(Oid oid) {
  OperandSet s;
  s.kind = OperandKind::EdgeRecords;
  s.oid = oid;
  s.everything = true;
  return s;
}

OperandSet OperandSet::node_ids(std::vector<Nid> nids) {
  OperandSet s;
  s.kind = OperandKind::NodeIds;
  for (Nid n : nids) s.index.insert(n);
  s.nids = std::move(nids);
  return s;
}

OperandSet OperandSet::all_nodes() {
  OperandSet s;
  s.kind = OperandKind::NodeIds;
  s.everything = true;
  return s;
}

namespace {

void require_kinds(TraversalCase c, const OperandSet& a, const OperandSet& b) {
  OperandKind want_a = c == TraversalCase::VxI ? OperandKind::VertexRecords : OperandKind::NodeIds;
  OperandKind want_b = OperandKind::NodeIds;
  if (c == TraversalCase::IxV) want_b = OperandKind::VertexRecords;
  if (c == TraversalCase::IxE) want_b = OperandKind::EdgeRecords;
  if (a.kind != want_a || b.kind != want_b) {
    throw ContractError(std::string("operand kinds do not match traversal case ") + traversal_case_name(c));
  }
}

RecordLoc vertex_loc(const GraphTopology& t, Nid nid) {
  if (!t.is_live(nid)) throw ConsistencyError("nid " + std::to_string(nid) + " has no vertexMap entry");
  return t.vertex_of(nid);
}

RecordLoc edge_loc(const GraphTopology& t, Nid s, Nid d) {
  auto loc = t.find_edge(s, d);
  if (!loc) {
    throw ConsistencyError("adjacency pair (" + std::to_string(s) + ", " + std::to_string(d) + ") has no edgeMap entry");
  }
  return *loc;
}

}  // namespace

HybridTraversal::HybridTraversal(const Database& db, const GraphDef& graph, TraversalCase c, const OperandSet& first,
                                 const OperandSet& second, TraversalCounters* counters)
    : db_(db), graph_(graph), topo_(db.topology(graph.name)), case_(c), first_(first), second_(second),
      counters_(counters) {
  require_kinds(c, first, second);
}

void HybridTraversal::expand(std::size_t i) {
  auto fetch = [&](RecordLoc loc) -> const Record* {
    if (counters_) ++counters_->tid_fetches;
    return &db_.collection(loc.oid).fetch(loc.tid);
  };
  auto first_nid = [&](std::size_t k) -> Nid { return first_.everything ? static_cast<Nid>(k) : first_.nids[k]; };

  switch (case_) {
    case TraversalCase::VxI: {
      const Record* v = first_.records[i];
      VertexKey key = get_vertex_key(*v, db_.catalog().get(first_.oid));
      auto nid = topo_.find_nid(key);
      if (!nid) throw ConsistencyError("vertex record " + std::to_string(v->tid) + " has no nidMap entry");
      if (second_.contains_nid(*nid)) queue_.push_back({v, 0, nullptr, *nid});
      break;
    }
    case TraversalCase::IxV: {
      Nid nid = first_nid(i);
      if (first_.everything && !topo_.is_live(nid)) break;
      RecordLoc loc = vertex_loc(topo_, nid);
      if (!second_.everything && loc.oid != second_.oid) break;
      const Record* v = fetch(loc);
      if (second_.contains_record(loc.oid, loc.tid) || (second_.everything && second_.records.empty())) {
        queue_.push_back({nullptr, nid, v, 0});
      }
      break;
    }
    case TraversalCase::IxI: {
      Nid s = first_nid(i);
      if (first_.everything && !topo_.is_live(s)) break;
      for (Nid t : topo_.neighbors(s, Direction::Forward)) {
        if (second_.contains_nid(t)) queue_.push_back({nullptr, s, nullptr, t});
      }
      break;
    }
    case TraversalCase::IxE: {
      Nid s = first_nid(i);
      if (first_.everything && !topo_.is_live(s)) break;
      for (Nid t : topo_.neighbors(s, Direction::Forward)) {
        RecordLoc loc = edge_loc(topo_, s, t);
        const Record* e = fetch(loc);
        if (second_.contains_record(loc.oid, loc.tid)) queue_.push_back({nullptr, s, e, t});
      }
      break;
    }
  }
}

std::optional<TraversalPair> HybridTraversal::emit() {
  std::size_t total = case_ == TraversalCase::VxI ? first_.records.size()
                      : first_.everything         ? topo_.node_slots()
                                                  : first_.nids.size();
  while (queue_.empty() && next_ < total) expand(next_++);
  if (queue_.empty()) return std::nullopt;
  TraversalPair p = queue_.front();
  queue_.pop_front();
  if (counters_) ++counters_->pairs;
  return p;
}

std::vector<TraversalPair> hybrid_traverse(const Database& db, const GraphDef& graph, TraversalCase c,
                                           const OperandSet& first, const OperandSet& second,
                                           TraversalCounters* counters) {
  HybridTraversal t(db, graph, c, first, second, counters);
  std::vector<TraversalPair> out;
  while (auto p = t.emit()) out.push_back(*p);
  return out;
}

std::vector<std::string> Pattern::vars() const {
  std::vector<std::string> out;
  for (const auto& v : vertices) out.push_back(v.var);
  for (const auto& e : edges) out.push_back(e.var);
  return out;
}

namespace {

double fraction_landing(const GraphTopology& t, Oid oid, Direction adjacency) {
  double e = static_cast<double>(t.edge_count());
  if (e == 0) return 1.0;
  // neighbors via forward adjacency are edge targets
  Direction side = adjacency == Direction::Forward ? Direction::Reverse : Direction::Forward;
  return static_cast<double>(t.edges_ending_in(oid, side)) / e;
}

}  // namespace

double estimate_pattern_cost(const AnnotatedPattern& ap, const CostConstants& k, double* rows_out) {
  MatchCostInput in;
  const auto& vp = ap.vertex_plans;
  const auto& ep = ap.edge_plans;
  std::size_t s = ap.start();
  auto effective = [](const ElementPlan& e) {
    return e.restricted ? e.table_rows * e.selectivity : e.table_rows;
  };
  double f = effective(vp[s]);
  if (!vp[s].external) in.pushed_vertex_rows += vp[s].table_rows;
  double cap = std::max(1.0, f) * kTraversalFanoutCap;
  double traversal = cost_traverse(TraversalCase::VxI, f, ap.avg_degree, k);
  bool any_deferred = vp[s].pred && !vp[s].pushed;
  double deferred_sel = any_deferred ? vp[s].selectivity : 1.0;
  for (const auto& hop : ap.hops) {
    const ElementPlan& b = vp[hop.to];
    const ElementPlan& e = ep[hop.edge];
    if (b.pushed && !b.external) in.pushed_vertex_rows += b.table_rows;
    if (e.pushed && !e.external) in.pushed_edge_rows += e.table_rows;
    traversal += cost_traverse(TraversalCase::IxI, f, ap.avg_degree, k);
    double next = f * ap.avg_degree * (b.restricted ? b.selectivity : 1.0);
    if (!e.pruned) {
      double per = e.restricted ? 2 * k.cpu : 2 * k.cpu + k.io;
      traversal += f * ap.avg_degree * per;
    }
    if (e.restricted) next *= e.selectivity;
    next = std::min(next, cap);
    if (!b.pruned) traversal += next * (b.restricted ? k.cpu : k.cpu + k.io);
    if (b.pred && !b.pushed) {
      any_deferred = true;
      deferred_sel *= b.selectivity;
    }
    if (e.pred && !e.pushed) {
      any_deferred = true;
      deferred_sel *= e.selectivity;
    }
    f = next;
  }
  in.traversal = traversal;
  in.residual_rows = any_deferred ? f : 0.0;
  if (rows_out) *rows_out = f * deferred_sel;
  return cost_match(in, k);
}

AnnotatedPattern plan_pattern(const Database& db, const Pattern& p, const StatsProvider& stats,
                              const CostConstants& k, const PatternPlanOptions& opt) {
  const Catalog& cat = db.catalog();
  const GraphDef& g = cat.require_graph(p.graph);
  if (p.vertices.empty()) throw SchemaError("pattern has no vertices");
  if (p.edges.size() + 1 != p.vertices.size()) throw SchemaError("pattern is not a chain");
  {
    std::set<std::string> seen;
    for (const auto& v : p.vars()) {
      if (!seen.insert(v).second) throw SchemaError("pattern variable '" + v + "' repeats; cyclic patterns are not supported");
    }
  }
  const GraphTopology& topo = db.topology(g.name);
  AnnotatedPattern ap;
  ap.pattern = p;
  ap.graph = &g;
  ap.avg_degree = topo.live_vertices() ? static_cast<double>(topo.edge_count()) / topo.live_vertices() : 0.0;

  auto is_needed = [&](const std::string& var) { return !opt.needed || opt.needed->count(var) != 0; };
  auto make_plan = [&](const std::string& var, const Schema& schema, const std::optional<Expr>& pred) {
    ElementPlan e;
    e.oid = schema.oid;
    e.table_rows = static_cast<double>(db.collection(schema.oid).live_count());
    e.needed = is_needed(var);
    if (pred) {
      e.pred = bind(*pred, [&](std::string_view v) {
        if (v != var) throw SchemaError("predicate on '" + var + "' references '" + std::string(v) + "'");
        return std::pair<int, const Schema*>{0, &schema};
      });
      e.selectivity = estimate_selectivity(*e.pred, stats ? stats(schema.oid) : nullptr, schema);
    }
    if (opt.externally_restricted.count(var)) {
      e.restricted = e.external = true;
      auto rows = opt.external_rows.find(var);
      double ext = rows == opt.external_rows.end() ? 1.0 : rows->second / std::max(1.0, e.table_rows);
      e.selectivity *= std::min(1.0, ext);
    }
    return e;
  };
  for (const auto& v : p.vertices) {
    const Schema* s = cat.vertex_table_for_label(g, v.label);
    if (s == nullptr) throw SchemaError("graph '" + g.name + "' has no vertex label '" + v.label + "'");
    ap.vertex_plans.push_back(make_plan(v.var, *s, v.pred));
  }
  for (const auto& e : p.edges) {
    if (!cat.edge_label_matches(g, e.label)) throw SchemaError("graph '" + g.name + "' has no edge label '" + e.label + "'");
    ap.edge_plans.push_back(make_plan(e.var, cat.get(g.edge_oid), e.pred));
  }

  const std::size_t last = p.vertices.size() - 1;
  auto end_card = [&](std::size_t i) {
    const auto& e = ap.vertex_plans[i];
    return e.table_rows * (e.pred || e.restricted ? e.selectivity : 1.0);
  };
  auto constrained = [&](std::size_t i) { return ap.vertex_plans[i].pred.has_value() || ap.vertex_plans[i].restricted; };

  if (opt.start_at_last) {
    ap.start_at_last = *opt.start_at_last && last > 0;
  } else if (opt.pushdown && last > 0) {
    bool a = constrained(0), b = constrained(last);
    if (a && b) {
      ap.start_at_last = end_card(last) < end_card(0);
      ap.decisions.push_back("both ends constrained: start at the smaller filtered side");
    } else if (b) {
      ap.start_at_last = true;
      ap.decisions.push_back("start from the constrained target side");
    } else if (a) {
      ap.decisions.push_back("start from the constrained source side");
    }
  }

  // hops in traversal order
  if (!ap.start_at_last) {
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      ap.hops.push_back({i, i + 1, i, p.edges[i].forward ? Direction::Forward : Direction::Reverse, false});
    }
  } else {
    for (std::size_t i = p.edges.size(); i-- > 0;) {
      ap.hops.push_back({i + 1, i, i, p.edges[i].forward ? Direction::Reverse : Direction::Forward, false});
    }
  }

  // pushdown decisions
  auto var_of = [&](bool edge, std::size_t i) -> const std::string& {
    return edge ? p.edges[i].var : p.vertices[i].var;
  };
  struct Slot {
    bool edge;
    std::size_t index;
  };
  std::vector<Slot> ranges;
  auto decide = [&](bool edge, std::size_t i, bool is_start) {
    ElementPlan& e = edge ? ap.edge_plans[i] : ap.vertex_plans[i];
    if (!e.pred) return;
    const std::string& var = var_of(edge, i);
    if (opt.force_push.count(var)) {
      e.pushed = true;
    } else if (opt.force_defer.count(var)) {
      e.pushed = false;
    } else if (!opt.pushdown) {
      e.pushed = false;
    } else if (is_start) {
      e.pushed = true;  // start candidates come from a scan of this table anyway
    } else {
      switch (classify(*e.pred)) {
        case PredicateClass::Equality: e.pushed = true; break;
        case PredicateClass::Inequality: e.pushed = false; break;
        case PredicateClass::Range: ranges.push_back({edge, i}); break;
      }
    }
    if (e.pushed) e.restricted = true;
  };
  decide(false, ap.start(), true);
  for (const auto& hop : ap.hops) {
    decide(true, hop.edge, false);
    decide(false, hop.to, false);
  }

  auto assign_pruning = [&]() {
    for (auto* plans : {&ap.vertex_plans, &ap.edge_plans}) {
      for (auto& e : *plans) e.pruned = false;
    }
    if (!opt.pruning) return;
    for (const auto& hop : ap.hops) {
      auto& b = ap.vertex_plans[hop.to];
      auto& e = ap.edge_plans[hop.edge];
      b.pruned = !b.needed && !b.pred && !b.restricted;
      e.pruned = !e.needed && !e.pred && !e.restricted;
    }
  };
  assign_pruning();

  // ranges: keep the cheaper of pushed and deferred, one element at a time
  for (const auto& r : ranges) {
    ElementPlan& e = r.edge ? ap.edge_plans[r.index] : ap.vertex_plans[r.index];
    e.pushed = false;
    e.restricted = e.external;
    double deferred = estimate_pattern_cost(ap, k);
    e.pushed = true;
    e.restricted = true;
    double pushed = estimate_pattern_cost(ap, k);
    if (deferred < pushed) {
      e.pushed = false;
      e.restricted = e.external;
    }
    ap.decisions.push_back("range on " + var_of(r.edge, r.index) + ": " + (e.pushed ? "pushed" : "deferred") +
                           " (cost " + std::to_string(static_cast<long long>(pushed)) + " vs " +
                           std::to_string(static_cast<long long>(deferred)) + ")");
  }

  for (auto& hop : ap.hops) {
    const auto& b = ap.vertex_plans[hop.to];
    hop.elide_membership = opt.elision && !b.restricted && fraction_landing(topo, b.oid, hop.adjacency) == 1.0;
  }

  ap.steps.push_back({TraversalCase::VxI, false, ap.start(), 0, false});
  for (std::size_t h = 0; h < ap.hops.size(); ++h) {
    const auto& hop = ap.hops[h];
    ap.steps.push_back({TraversalCase::IxI, false, hop.to, h, false});
    ap.steps.push_back({TraversalCase::IxE, true, hop.edge, h, ap.edge_plans[hop.edge].pruned});
    ap.steps.push_back({TraversalCase::IxV, false, hop.to, h, ap.vertex_plans[hop.to].pruned});
  }
  ap.est_cost = estimate_pattern_cost(ap, k, &ap.est_rows);
  return ap;
}

std::string AnnotatedPattern::summary() const {
  std::string s = "start=" + pattern.vertices[start()].var + " direction=" + (start_at_last ? "reverse" : "forward");
  std::vector<std::string> pushed, deferred, pruned, elided;
  auto note = [&](const ElementPlan& e, const std::string& var) {
    if (e.pred) (e.pushed ? pushed : deferred).push_back(to_string(*e.pred));
    if (e.pruned) pruned.push_back(var);
  };
  for (std::size_t i = 0; i < vertex_plans.size(); ++i) note(vertex_plans[i], pattern.vertices[i].var);
  for (std::size_t i = 0; i < edge_plans.size(); ++i) note(edge_plans[i], pattern.edges[i].var);
  for (const auto& h : hops) {
    if (h.elide_membership) elided.push_back(pattern.vertices[h.to].var);
  }
  auto list = [](const std::vector<std::string>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out + "]";
  };
  s += " pushed=" + list(pushed) + " deferred=" + list(deferred) + " pruned=" + list(pruned) + " elided=" + list(elided);
  return s;
}

namespace {

struct Candidate {
  Nid nid = 0;
  const Record* record = nullptr;
  std::int32_t ext = -1;
};

/// M(element): either the whole label table or a materialized list indexed by nid (vertices) or tid (edges).
struct CandidateSet {
  bool all = true;
  std::vector<Candidate> list;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_key;

  const std::vector<std::uint32_t>* find(std::uint64_t key) const {
    auto it = by_key.find(key);
    return it == by_key.end() ? nullptr : &it->second;
  }
};

struct Node {
  std::int64_t parent = -1;
  std::size_t hop = 0;  // hops consumed so far; the root holds 0
  Nid nid = 0;
  const Record* vertex = nullptr;
  const Record* edge = nullptr;
  std::int32_t vext = -1;
  std::int32_t eext = -1;
};

}  // namespace

GraphRelation match_pattern(const Database& db, const AnnotatedPattern& ap, const MatchInputs& inputs,
                            TraversalCounters* counters) {
  TraversalCounters local;
  TraversalCounters& ctr = counters ? *counters : local;
  const Pattern& p = ap.pattern;
  const GraphTopology& topo = db.topology(ap.graph->name);
  const Catalog& cat = db.catalog();

  GraphRelation out;
  for (const auto& v : p.vertices) out.vertex_vars.push_back(v.var);
  for (const auto& e : p.edges) out.edge_vars.push_back(e.var);

  auto passes = [](const ElementPlan& e, const Record& r) {
    const Record* slots[1] = {&r};
    return !e.pred || eval(*e.pred, RecordSlots(slots, 1));
  };

  const std::size_t start = ap.start();
  std::vector<CandidateSet> vc(p.vertices.size());
  std::vector<CandidateSet> ec(p.edges.size());

  auto build = [&](const ElementPlan& plan, const std::string& var, bool is_vertex, bool materialize,
                   CandidateSet& cs) {
    auto ext = inputs.external.find(var);
    const Schema& schema = cat.get(plan.oid);
    auto add = [&](const Record* r, std::int32_t x) {
      Candidate c{0, r, x};
      if (is_vertex) {
        auto nid = topo.find_nid(get_vertex_key(*r, schema));
        if (!nid) throw ConsistencyError("vertex record " + std::to_string(r->tid) + " has no nidMap entry");
        c.nid = *nid;
      }
      cs.by_key[is_vertex ? c.nid : r->tid].push_back(static_cast<std::uint32_t>(cs.list.size()));
      cs.list.push_back(c);
    };
    if (ext != inputs.external.end()) {
      cs.all = false;
      for (const auto& [r, x] : ext->second.members) {
        if (plan.pushed && !passes(plan, *r)) continue;
        add(r, x);
      }
      return;
    }
    if (!plan.pushed && !materialize) return;
    cs.all = !plan.pushed;
    std::optional<Predicate> pred;
    if (plan.pushed && plan.pred) pred = Predicate::unary(*plan.pred, schema);
    auto cursor = db.collection(plan.oid).scan(pred);
    while (const Record* r = cursor.next()) add(r, -1);
  };
  for (std::size_t i = 0; i < p.vertices.size(); ++i) build(ap.vertex_plans[i], p.vertices[i].var, true, i == start, vc[i]);
  for (std::size_t i = 0; i < p.edges.size(); ++i) build(ap.edge_plans[i], p.edges[i].var, false, false, ec[i]);

  const std::size_t H = ap.hops.size();
  std::vector<Node> arena;
  std::vector<std::int64_t> stack;
  std::vector<Node> children;

  GraphRelation::Row row;
  row.nids.resize(p.vertices.size());
  row.vertices.resize(p.vertices.size());
  row.edges.resize(p.edges.size());
  row.vertex_ext.resize(p.vertices.size());
  row.edge_ext.resize(p.edges.size());

  auto finish = [&](std::int64_t idx) {
    for (std::int64_t n = idx; n >= 0; n = arena[n].parent) {
      const Node& node = arena[n];
      if (node.hop == 0) {
        row.nids[start] = node.nid;
        row.vertices[start] = node.vertex;
        row.vertex_ext[start] = node.vext;
      } else {
        const HopPlan& hop = ap.hops[node.hop - 1];
        row.nids[hop.to] = node.nid;
        row.vertices[hop.to] = node.vertex;
        row.vertex_ext[hop.to] = node.vext;
        row.edges[hop.edge] = node.edge;
        row.edge_ext[hop.edge] = node.eext;
      }
    }
    // deferred predicates: post-filter over the complete binding
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      const auto& e = ap.vertex_plans[i];
      if (e.pred && !e.pushed && !passes(e, *row.vertices[i])) return;
    }
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      const auto& e = ap.edge_plans[i];
      if (e.pred && !e.pushed && !passes(e, *row.edges[i])) return;
    }
    out.rows.push_back(row);
  };

  auto fetch = [&](RecordLoc loc) -> const Record* {
    ++ctr.tid_fetches;
    return &db.collection(loc.oid).fetch(loc.tid);
  };

  for (const Candidate& c0 : vc[start].list) {
    // u1: VxI, the nid came from nidMap while building M(start)
    arena.clear();
    stack.clear();
    arena.push_back(Node{-1, 0, c0.nid, c0.record, nullptr, c0.ext, -1});
    stack.push_back(0);
    while (!stack.empty()) {
      std::int64_t cur = stack.back();
      stack.pop_back();
      const std::size_t h = arena[cur].hop;
      if (h == H) {
        finish(cur);
        continue;
      }
      const HopPlan& hop = ap.hops[h];
      const ElementPlan& bp = ap.vertex_plans[hop.to];
      const ElementPlan& epl = ap.edge_plans[hop.edge];
      const CandidateSet& bset = vc[hop.to];
      const CandidateSet& eset = ec[hop.edge];
      const Nid a = arena[cur].nid;
      children.clear();
      for (Nid nb : topo.neighbors(a, hop.adjacency)) {
        // IxI with membership in M(nid_b)
        const std::vector<std::uint32_t>* bmatches = nullptr;
        if (bset.all) {
          if (!hop.elide_membership) {
            ++ctr.membership_tests;
            if (vertex_loc(topo, nb).oid != bp.oid) continue;
          }
        } else {
          ++ctr.membership_tests;
          bmatches = bset.find(nb);
          if (bmatches == nullptr) continue;
        }
        const Nid s = hop.adjacency == Direction::Forward ? a : nb;
        const Nid t = hop.adjacency == Direction::Forward ? nb : a;
        // IxE
        const Record* erec = nullptr;
        const std::vector<std::uint32_t>* ematches = nullptr;
        if (!eset.all) {
          RecordLoc loc = edge_loc(topo, s, t);
          ematches = eset.find(loc.tid);
          if (ematches == nullptr) continue;
        } else if (!epl.pruned) {
          erec = fetch(edge_loc(topo, s, t));
        } else {
          ++ctr.pruned_emissions;
        }
        // IxV
        const Record* vrec = nullptr;
        if (bset.all) {
          if (!bp.pruned) {
            vrec = fetch(vertex_loc(topo, nb));
          } else {
            ++ctr.pruned_emissions;
          }
        }
        auto push = [&](const Record* e, std::int32_t ex) {
          if (bmatches) {
            for (auto idx : *bmatches) {
              const Candidate& bc = bset.list[idx];
              children.push_back(Node{cur, h + 1, nb, bc.record, e, bc.ext, ex});
            }
          } else {
            children.push_back(Node{cur, h + 1, nb, vrec, e, -1, ex});
          }
        };
        if (ematches) {
          for (auto idx : *ematches) push(eset.list[idx].record, eset.list[idx].ext);
        } else {
          push(erec, -1);
        }
      }
      for (auto it = children.rbegin(); it != children.rend(); ++it) {
        arena.push_back(*it);
        stack.push_back(static_cast<std::int64_t>(arena.size() - 1));
      }
    }
  }
  return out;
}

std::optional<std::vector<Nid>> shortest_path(const Database& db, const GraphDef& graph, VertexKey src,
                                              VertexKey dst) {
  const GraphTopology& t = db.topology(graph.name);
  Nid s = t.nid_of(src);
  Nid d = t.nid_of(dst);
  if (s == d) return std::vector<Nid>{s};
  constexpr Nid kNone = std::numeric_limits<Nid>::max();
  std::vector<Nid> parent(t.node_slots(), kNone);
  parent[s] = s;
  std::queue<Nid> q;
  q.push(s);
  std::vector<Nid> next;
  while (!q.empty()) {
    Nid u = q.front();
    q.pop();
    next = t.neighbors(u, Direction::Forward);
    std::sort(next.begin(), next.end());
    for (Nid v : next) {
      if (parent[v] != kNone) continue;
      parent[v] = u;
      if (v == d) {
        std::vector<Nid> path{d};
        while (path.back() != s) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      q.push(v);
    }
  }
  return std::nullopt;
}

}  // namespace gredo
