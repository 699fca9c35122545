#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gredo/database.hpp"
#include "gredo/error.hpp"
#include "gredo/graph_ops.hpp"

namespace gredo::fixture {

/// Random two-label graph: vertex tables A and B (props x Int, s Text), edge
/// table E with label "rel" (prop w Int). No parallel edges; self-loops allowed.
struct RandomGraph {
  std::unique_ptr<Database> db = std::make_unique<Database>();
  Oid a = 0, b = 0, e = 0;
  std::vector<VertexKey> vertices;
  std::set<std::pair<VertexKey, VertexKey>> edges;
};

inline const char* kWords[] = {"red", "green", "blue", "food", "sport"};

inline RandomGraph make_random_graph(std::uint64_t seed, int max_vertices, int max_edges) {
  std::mt19937_64 rng(seed);
  RandomGraph g;
  Database& db = *g.db;
  g.a = db.create_collection(Schema::vertex_table("A", "A", {{"x", ColumnType::Int}, {"s", ColumnType::Text}})).oid;
  g.b = db.create_collection(Schema::vertex_table("B", "B", {{"x", ColumnType::Int}, {"s", ColumnType::Text}})).oid;
  g.e = db.create_collection(Schema::edge_table("E", "rel", {{"w", ColumnType::Int}})).oid;
  db.create_graph({"G", {g.a, g.b}, g.e, "rel"});
  int n = std::uniform_int_distribution<int>(1, max_vertices)(rng);
  std::vector<std::vector<Value>> rows_a, rows_b;
  for (int i = 0; i < n; ++i) {
    bool in_a = rng() % 2 == 0;
    std::int64_t vid = i;
    Value x = rng() % 10 == 0 ? Value() : Value(static_cast<std::int64_t>(rng() % 10));
    std::vector<Value> row{vid, x, kWords[rng() % 5]};
    (in_a ? rows_a : rows_b).push_back(std::move(row));
    g.vertices.push_back({in_a ? g.a : g.b, vid});
  }
  db.insert(g.a, rows_a);
  db.insert(g.b, rows_b);
  int m = std::uniform_int_distribution<int>(0, max_edges)(rng);
  std::vector<std::vector<Value>> rows_e;
  for (int i = 0; i < m; ++i) {
    VertexKey s = g.vertices[rng() % g.vertices.size()];
    VertexKey t = g.vertices[rng() % g.vertices.size()];
    if (!g.edges.insert({s, t}).second) continue;
    rows_e.push_back({static_cast<std::int64_t>(s.oid), s.vid, static_cast<std::int64_t>(t.oid), t.vid,
                      static_cast<std::int64_t>(rng() % 10)});
  }
  db.insert(g.e, rows_e);
  return g;
}

/// One matched binding as comparable identifiers: vertex keys then edge tids.
using Binding = std::pair<std::vector<VertexKey>, std::vector<Tid>>;

/// Multi-way join over the edge table with post-filtering; reads records by
/// scans only and never touches the topology.
inline std::vector<Binding> brute_force_match(const Database& db, const Pattern& p) {
  const Catalog& cat = db.catalog();
  const GraphDef& g = cat.require_graph(p.graph);
  const Schema& es = cat.get(g.edge_oid);
  std::map<VertexKey, const Record*> vertex;
  for (Oid o : g.vertex_oids) {
    for (const Record* r : db.collection(o).scan_all()) vertex[get_vertex_key(*r, cat.get(o))] = r;
  }
  std::vector<const Record*> edges = db.collection(g.edge_oid).scan_all();
  auto holds = [&](const std::optional<Expr>& pred, const std::string& var, const Record& r, const Schema& s) {
    if (!pred) return true;
    Expr b = bind(*pred, [&](std::string_view v) {
      if (v != var) throw SchemaError("foreign var");
      return std::pair<int, const Schema*>{0, &s};
    });
    const Record* slot[1] = {&r};
    return eval(b, RecordSlots(slot, 1));
  };
  auto vertex_ok = [&](std::size_t i, VertexKey k) {
    const Schema* s = cat.vertex_table_for_label(g, p.vertices[i].label);
    if (s == nullptr || s->oid != k.oid) return false;
    return holds(p.vertices[i].pred, p.vertices[i].var, *vertex.at(k), *s);
  };
  std::vector<Binding> out;
  Binding cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == p.edges.size()) {
      out.push_back(cur);
      return;
    }
    for (const Record* e : edges) {
      EdgeKey k = get_edge_key(*e, es);
      VertexKey from = p.edges[i].forward ? k.source() : k.target();
      VertexKey to = p.edges[i].forward ? k.target() : k.source();
      if (from != cur.first.back()) continue;
      if (!holds(p.edges[i].pred, p.edges[i].var, *e, es)) continue;
      if (!vertex_ok(i + 1, to)) continue;
      cur.first.push_back(to);
      cur.second.push_back(e->tid);
      rec(i + 1);
      cur.first.pop_back();
      cur.second.pop_back();
    }
  };
  for (const auto& [k, r] : vertex) {
    (void)r;
    if (!vertex_ok(0, k)) continue;
    cur = {{k}, {}};
    rec(0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Bindings of a match result; edge tids come from edgeMap so pruned edges still compare.
inline std::vector<Binding> bindings_of(const Database& db, const AnnotatedPattern& ap, const GraphRelation& rel) {
  const GraphTopology& t = db.topology(ap.graph->name);
  std::vector<Binding> out;
  for (const auto& row : rel.rows) {
    Binding b;
    for (Nid n : row.nids) b.first.push_back({t.vertex_of(n).oid, t.vid_of(n)});
    for (std::size_t i = 0; i < ap.pattern.edges.size(); ++i) {
      Nid s = row.nids[i], d = row.nids[i + 1];
      if (!ap.pattern.edges[i].forward) std::swap(s, d);
      b.second.push_back(t.edge_of(s, d).tid);
    }
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Expr random_predicate(std::mt19937_64& rng, const std::string& var, bool edge) {
  const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
  auto atom = [&]() {
    if (!edge && rng() % 3 == 0) {
      return Expr::cmp(rng() % 2 ? CmpOp::Eq : CmpOp::Ne, Expr::col(var, "s"), Expr::lit(kWords[rng() % 5]));
    }
    return Expr::cmp(ops[rng() % 6], Expr::col(var, edge ? "w" : "x"), Expr::lit(static_cast<std::int64_t>(rng() % 10)));
  };
  if (rng() % 5 == 0) return Expr::conj({atom(), atom()});
  return atom();
}

/// Chain of up to `max_edges` edges with random labels, directions and predicates.
inline Pattern random_pattern(std::mt19937_64& rng, int max_edges) {
  Pattern p;
  p.graph = "G";
  int len = static_cast<int>(rng() % (max_edges + 1));
  for (int i = 0; i <= len; ++i) {
    PatternVertex v{"v" + std::to_string(i), rng() % 2 ? "A" : "B", std::nullopt};
    if (rng() % 2 == 0) v.pred = random_predicate(rng, v.var, false);
    p.vertices.push_back(std::move(v));
  }
  for (int i = 0; i < len; ++i) {
    PatternEdge e{"e" + std::to_string(i), "rel", rng() % 3 != 0, std::nullopt};
    if (rng() % 4 == 0) e.pred = random_predicate(rng, e.var, true);
    p.edges.push_back(std::move(e));
  }
  return p;
}

}  // namespace gredo::fixture
