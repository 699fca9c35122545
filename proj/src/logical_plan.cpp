#include <algorithm>
#include <map>

#include "gredo/error.hpp"
#include "gredo/query.hpp"

namespace gredo {

int LogicalPlan::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const PlanVar& LogicalPlan::var(std::string_view name) const {
  int i = var_index(name);
  if (i < 0) throw SchemaError("unknown variable '" + std::string(name) + "'");
  return vars[i];
}

bool LogicalPlan::is_graph_var(std::string_view name) const {
  int i = var_index(name);
  return i >= 0 && vars[i].kind != VarKind::Relational;
}

namespace {

void check_refs(const Expr& e, const LogicalPlan& plan) {
  std::vector<const ColumnRef*> refs;
  collect_refs(e, refs);
  for (const ColumnRef* r : refs) {
    const PlanVar& v = plan.var(r->var);
    ColumnRef copy = *r;
    bind_ref(copy, 0, *v.schema);
  }
}

/// Bound check for predicates: whole-record references are rejected too.
void check_predicate(const Expr& e, const LogicalPlan& plan) {
  bind(e, [&](std::string_view var) { return std::pair<int, const Schema*>{0, plan.var(var).schema}; });
}

bool is_column_equality(const Expr& e) {
  return e.kind == Expr::Kind::Compare && e.op == CmpOp::Eq && e.args[0].kind == Expr::Kind::Column &&
         e.args[1].kind == Expr::Kind::Column && !e.args[0].ref.whole_record() && !e.args[1].ref.whole_record();
}

Expr substitute(Expr e, const ColumnRef& from, const ColumnRef& to) {
  if (e.kind == Expr::Kind::Column && e.ref == from) {
    e.ref = to;
    e.ref.slot = -1;
    e.ref.column_index = -1;
    e.ref.effective_path = {};
  }
  for (auto& a : e.args) a = substitute(std::move(a), from, to);
  return e;
}

std::optional<Expr>* phi_of(LogicalPlan& plan, std::string_view var) {
  const PlanVar& v = plan.var(var);
  if (v.kind == VarKind::Vertex) return &plan.match->pattern.vertices[v.element].pred;
  if (v.kind == VarKind::Edge) return &plan.match->pattern.edges[v.element].pred;
  return nullptr;
}

bool add_to_phi(std::optional<Expr>& phi, const Expr& e) {
  if (!phi) {
    phi = e;
    return true;
  }
  auto parts = split_conjuncts(*phi);
  if (std::find(parts.begin(), parts.end(), e) != parts.end()) return false;
  parts.push_back(e);
  phi = Expr::conj(std::move(parts));
  return true;
}

}  // namespace

LogicalPlan build_logical_plan(const QueryAst& ast, const Catalog& catalog) {
  LogicalPlan plan;
  int graph_source = -1;
  for (const auto& s : ast.sources) {
    PlanSource src;
    src.name = s.name;
    src.var = s.var();
    for (const auto& other : plan.sources) {
      if (other.var == src.var) throw SchemaError("variable '" + src.var + "' is bound twice in FROM");
    }
    if (const Schema* schema = catalog.find(s.name)) {
      src.schema = schema;
    } else if (const GraphDef* g = catalog.find_graph(s.name)) {
      if (graph_source >= 0) throw UnsupportedError("a query may reference only one graph");
      src.graph = true;
      src.graph_def = g;
      graph_source = static_cast<int>(plan.sources.size());
    } else {
      throw SchemaError("unknown collection or graph '" + s.name + "'");
    }
    plan.sources.push_back(src);
  }
  for (std::size_t i = 0; i < plan.sources.size(); ++i) {
    if (!plan.sources[i].graph) {
      plan.vars.push_back({plan.sources[i].var, VarKind::Relational, plan.sources[i].schema, static_cast<int>(i), -1});
    }
  }
  if (ast.match && graph_source < 0) throw SchemaError("MATCH needs a graph in FROM");
  if (!ast.match && graph_source >= 0) {
    throw SchemaError("graph '" + plan.sources[graph_source].name + "' needs a MATCH clause");
  }
  if (ast.match) {
    const GraphDef& g = *plan.sources[graph_source].graph_def;
    MatchSpec m;
    m.source = graph_source;
    m.pattern.graph = g.name;
    auto declare = [&](const std::string& var, VarKind kind, const Schema* schema, int element) {
      if (plan.var_index(var) >= 0) {
        throw SchemaError("variable '" + var + "' is bound twice; cyclic patterns are not supported");
      }
      plan.vars.push_back({var, kind, schema, graph_source, element});
    };
    for (std::size_t i = 0; i < ast.match->vertices.size(); ++i) {
      const MatchVertex& mv = ast.match->vertices[i];
      std::string label = mv.label;
      if (label.empty()) {
        if (g.vertex_oids.size() != 1) throw SchemaError("vertex label required: graph '" + g.name + "' has several vertex tables");
        label = catalog.get(g.vertex_oids[0]).label;
      }
      const Schema* table = catalog.vertex_table_for_label(g, label);
      if (table == nullptr) throw SchemaError("graph '" + g.name + "' has no vertex label '" + label + "'");
      std::string var = mv.var.empty() ? "_v" + std::to_string(i) : mv.var;
      declare(var, VarKind::Vertex, table, static_cast<int>(i));
      m.pattern.vertices.push_back({var, label, std::nullopt});
    }
    for (std::size_t i = 0; i < ast.match->edges.size(); ++i) {
      const MatchEdge& me = ast.match->edges[i];
      std::string label = me.label.empty() ? g.edge_label : me.label;
      if (!catalog.edge_label_matches(g, label)) throw SchemaError("graph '" + g.name + "' has no edge label '" + label + "'");
      std::string var = me.var.empty() ? "_e" + std::to_string(i) : me.var;
      declare(var, VarKind::Edge, &catalog.get(g.edge_oid), static_cast<int>(i));
      m.pattern.edges.push_back({var, label, me.forward, std::nullopt});
    }
    for (const auto& v : m.pattern.vars()) m.projected.insert(v);
    plan.match = std::move(m);
  }

  if (ast.where) {
    for (Expr c : split_conjuncts(*ast.where)) {
      check_predicate(c, plan);
      auto vars = gredo::referenced_vars(c);
      if (vars.size() == 2 && is_column_equality(c)) {
        plan.joins.push_back({c, c.args[0].ref.var, c.args[1].ref.var, true});
      } else {
        plan.selections.push_back(std::move(c));
      }
    }
  }

  if (ast.star) {
    for (const auto& v : plan.vars) {
      for (const auto& col : v.schema->columns) {
        plan.projection.push_back({Expr::col(v.name, col.name), ""});
      }
    }
  } else {
    plan.projection = ast.items;
  }
  for (const auto& item : plan.projection) {
    check_refs(item.expr, plan);
    plan.output_names.push_back(item.alias.empty() ? to_string(item.expr) : item.alias);
  }
  return plan;
}

std::set<std::string> referenced_vars(const LogicalPlan& plan) {
  std::set<std::string> out;
  auto add = [&](const Expr& e) {
    for (const auto& v : gredo::referenced_vars(e)) out.insert(v);
  };
  for (const auto& p : plan.projection) add(p.expr);
  for (const auto& s : plan.selections) add(s);
  for (const auto& j : plan.joins) add(j.expr);
  return out;
}

bool rule_graph_predicate_pushdown(LogicalPlan& plan) {
  if (!plan.match || plan.match->trim != TrimKind::None) return false;
  bool changed = false;
  std::vector<Expr> keep;
  for (auto& s : plan.selections) {
    auto vars = gredo::referenced_vars(s);
    if (vars.size() == 1 && plan.is_graph_var(*vars.begin())) {
      add_to_phi(*phi_of(plan, *vars.begin()), s);
      changed = true;
    } else {
      keep.push_back(s);
    }
  }
  plan.selections = std::move(keep);
  // replicate selections over a join attribute onto the graph side
  for (const auto& s : plan.selections) {
    auto vars = gredo::referenced_vars(s);
    if (vars.size() != 1 || plan.is_graph_var(*vars.begin())) continue;
    std::vector<const ColumnRef*> refs;
    collect_refs(s, refs);
    bool single = !refs.empty() && std::all_of(refs.begin(), refs.end(), [&](const ColumnRef* r) { return *r == *refs[0]; });
    if (!single) continue;
    for (const auto& j : plan.joins) {
      for (int side = 0; side < 2; ++side) {
        const ColumnRef& mine = j.expr.args[side].ref;
        const ColumnRef& other = j.expr.args[1 - side].ref;
        if (!(mine == *refs[0]) || !plan.is_graph_var(other.var)) continue;
        if (add_to_phi(*phi_of(plan, other.var), substitute(s, mine, other))) changed = true;
      }
    }
  }
  return changed;
}

bool rule_match_trimming(LogicalPlan& plan, const Catalog& catalog) {
  (void)catalog;
  if (!plan.match || plan.match->trim != TrimKind::None) return false;
  Pattern& p = plan.match->pattern;
  if (p.edges.empty()) {
    plan.match->trim = TrimKind::VertexScan;
    return true;
  }
  if (p.edges.size() != 1 || p.vertices[0].pred || p.vertices[1].pred) return false;
  // endpoints may only be used through their vid, which the edge record carries
  std::vector<const ColumnRef*> refs;
  for (const auto& item : plan.projection) collect_refs(item.expr, refs);
  for (const auto& s : plan.selections) collect_refs(s, refs);
  for (const auto& j : plan.joins) collect_refs(j.expr, refs);
  for (const ColumnRef* r : refs) {
    if ((r->var == p.vertices[0].var || r->var == p.vertices[1].var) && !(r->column == "vid" && r->path.empty())) {
      return false;
    }
  }
  const std::string& e = p.edges[0].var;
  bool fwd = p.edges[0].forward;
  auto ref = [](const std::string& var, const char* column) {
    ColumnRef r;
    r.var = var;
    r.column = column;
    return r;
  };
  ColumnRef src_vid = ref(p.vertices[0].var, "vid"), dst_vid = ref(p.vertices[1].var, "vid");
  ColumnRef e_src = ref(e, fwd ? "svid" : "tvid"), e_dst = ref(e, fwd ? "tvid" : "svid");
  auto rewrite = [&](Expr x) { return substitute(substitute(std::move(x), src_vid, e_src), dst_vid, e_dst); };
  for (auto& item : plan.projection) item.expr = rewrite(item.expr);
  for (auto& s : plan.selections) s = rewrite(s);
  for (auto& j : plan.joins) {
    j.expr = rewrite(j.expr);
    j.left = j.expr.args[0].ref.var;
    j.right = j.expr.args[1].ref.var;
  }
  plan.match->trim = TrimKind::EdgeScan;
  return true;
}

bool rule_projection_trimming(LogicalPlan& plan) {
  if (!plan.match) return false;
  auto used = referenced_vars(plan);
  std::set<std::string> keep;
  for (const auto& v : plan.match->projected) {
    if (used.count(v)) keep.insert(v);
  }
  bool changed = keep != plan.match->projected;
  plan.match->projected = std::move(keep);
  return changed;
}

namespace {

std::string join_text(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::string pattern_text(const Pattern& p) {
  MatchClause m;
  for (const auto& v : p.vertices) m.vertices.push_back({v.var, v.label});
  for (const auto& e : p.edges) m.edges.push_back({e.var, e.label, e.forward});
  std::string s = to_string(m);
  std::vector<std::string> phi;
  for (const auto& v : p.vertices) {
    if (v.pred) phi.push_back(v.var + ": " + to_string(*v.pred));
  }
  for (const auto& e : p.edges) {
    if (e.pred) phi.push_back(e.var + ": " + to_string(*e.pred));
  }
  if (!phi.empty()) s += " phi{" + join_text(phi, "; ") + "}";
  return s;
}

}  // namespace

LogicalNode logical_tree(const LogicalPlan& plan) {
  std::vector<std::string> proj;
  for (std::size_t i = 0; i < plan.projection.size(); ++i) proj.push_back(plan.output_names[i]);
  LogicalNode root{"Projection", join_text(proj, ", "), {}};

  std::set<std::string> bound;
  std::vector<bool> used(plan.joins.size(), false);
  std::optional<LogicalNode> tree;
  for (std::size_t i = 0; i < plan.sources.size(); ++i) {
    const PlanSource& s = plan.sources[i];
    LogicalNode leaf{"CollectionRef", s.name + (s.var != s.name ? " AS " + s.var : ""), {}};
    if (s.graph) {
      const MatchSpec& m = *plan.match;
      std::string trim = m.trim == TrimKind::VertexScan ? " trimmed=vertex-scan"
                         : m.trim == TrimKind::EdgeScan ? " trimmed=edge-scan"
                                                        : "";
      LogicalNode match{"Match", pattern_text(m.pattern) + trim, {leaf}};
      std::vector<std::string> a(m.projected.begin(), m.projected.end());
      leaf = LogicalNode{"GraphProjection", join_text(a, ", "), {match}};
      for (const auto& v : m.pattern.vars()) bound.insert(v);
    } else {
      bound.insert(s.var);
    }
    if (!tree) {
      tree = leaf;
      continue;
    }
    std::vector<std::string> preds;
    for (std::size_t j = 0; j < plan.joins.size(); ++j) {
      if (!used[j] && bound.count(plan.joins[j].left) && bound.count(plan.joins[j].right)) {
        used[j] = true;
        preds.push_back(to_string(plan.joins[j].expr));
      }
    }
    tree = LogicalNode{"CrossModelJoin", join_text(preds, " AND "), {*tree, leaf}};
  }
  LogicalNode body = *tree;
  if (!plan.selections.empty()) {
    std::vector<std::string> s;
    for (const auto& e : plan.selections) s.push_back(to_string(e));
    body = LogicalNode{"Selection", join_text(s, " AND "), {body}};
  }
  root.children.push_back(body);
  return root;
}

std::string render(const LogicalNode& node, int depth) {
  std::string s(static_cast<std::size_t>(depth) * 2, ' ');
  s += node.op;
  if (!node.detail.empty()) s += " [" + node.detail + "]";
  s += "\n";
  for (const auto& c : node.children) s += render(c, depth + 1);
  return s;
}

std::string canonical_text(const LogicalPlan& plan) {
  // relational variables renamed by (collection name, FROM position); pattern variables by position
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < plan.sources.size(); ++i) {
    if (!plan.sources[i].graph) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return plan.sources[a].name < plan.sources[b].name; });
  std::map<std::string, std::string> rename;
  std::vector<std::string> sources;
  for (std::size_t k = 0; k < order.size(); ++k) {
    rename[plan.sources[order[k]].var] = "r" + std::to_string(k);
    sources.push_back(plan.sources[order[k]].name);
  }
  std::string graph;
  Pattern p;
  if (plan.match) {
    p = plan.match->pattern;
    graph = p.graph;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) rename[p.vertices[i].var] = "v" + std::to_string(i);
    for (std::size_t i = 0; i < p.edges.size(); ++i) rename[p.edges[i].var] = "e" + std::to_string(i);
  }
  auto canon = [&](Expr e) {
    for (const auto& [from, to] : rename) e = rename_var(std::move(e), from, "#" + to);
    for (const auto& [from, to] : rename) e = rename_var(std::move(e), "#" + to, to);
    return e;
  };
  auto sorted_conjuncts = [&](const std::vector<Expr>& parts) {
    std::vector<std::string> out;
    for (const auto& e : parts) {
      Expr c = canon(e);
      std::string text = to_string(c);
      if (is_column_equality(c)) {
        std::string flipped = to_string(Expr::cmp(CmpOp::Eq, c.args[1], c.args[0]));
        text = std::min(text, flipped);
      }
      out.push_back(text);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  std::string s = "sources{" + join_text(sources, ",") + "}";
  if (plan.match) {
    for (auto& v : p.vertices) {
      v.var = rename[v.var];
      v.pred.reset();
    }
    for (auto& e : p.edges) {
      e.var = rename[e.var];
      e.pred.reset();
    }
    s += " graph{" + graph + " " + pattern_text(p) + "}";
    std::vector<std::string> phi;
    for (std::size_t i = 0; i < plan.match->pattern.vertices.size(); ++i) {
      const auto& v = plan.match->pattern.vertices[i];
      if (v.pred) phi.push_back("v" + std::to_string(i) + ":" + join_text(sorted_conjuncts(split_conjuncts(*v.pred)), "&"));
    }
    for (std::size_t i = 0; i < plan.match->pattern.edges.size(); ++i) {
      const auto& e = plan.match->pattern.edges[i];
      if (e.pred) phi.push_back("e" + std::to_string(i) + ":" + join_text(sorted_conjuncts(split_conjuncts(*e.pred)), "&"));
    }
    s += " phi{" + join_text(phi, ";") + "}";
  }
  std::vector<Expr> joins;
  for (const auto& j : plan.joins) joins.push_back(j.expr);
  s += " joins{" + join_text(sorted_conjuncts(joins), ";") + "}";
  s += " where{" + join_text(sorted_conjuncts(plan.selections), ";") + "}";
  std::vector<std::string> proj;
  for (const auto& item : plan.projection) proj.push_back(to_string(canon(item.expr)));
  s += " select{" + join_text(proj, ",") + "}";
  return s;
}

std::uint64_t fingerprint(const LogicalPlan& plan) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(plan)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gredo
