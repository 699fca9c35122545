#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gredo/cost.hpp"
#include "gredo/database.hpp"
#include "gredo/graph_ops.hpp"
#include "gredo/query_ast.hpp"

namespace gredo {

// ---------------------------------------------------------------- logical plan

enum class VarKind { Relational, Vertex, Edge };

/// Every variable a row can bind: FROM aliases of relations and document
/// collections, and pattern vertices and edges.
struct PlanVar {
  std::string name;
  VarKind kind = VarKind::Relational;
  const Schema* schema = nullptr;
  int source = -1;   // FROM position (the graph's position for pattern variables)
  int element = -1;  // pattern vertex or edge index
};

struct PlanSource {
  std::string name;
  std::string var;
  bool graph = false;
  const Schema* schema = nullptr;   // relations and document collections
  const GraphDef* graph_def = nullptr;
};

/// Binary conjunct between two variables.
struct JoinPredicate {
  Expr expr;
  std::string left;
  std::string right;
  bool equality = false;  // column = column
};

enum class TrimKind { None, VertexScan, EdgeScan };

/// P(H, P) with its graph projection.
struct MatchSpec {
  int source = -1;
  Pattern pattern;                  // Phi lives in the pattern elements
  std::set<std::string> projected;  // pattern variables read above the match
  TrimKind trim = TrimKind::None;
};

struct LogicalPlan {
  std::vector<PlanSource> sources;
  std::vector<PlanVar> vars;
  std::optional<MatchSpec> match;
  std::vector<Expr> selections;         // Psi conjuncts
  std::vector<JoinPredicate> joins;
  std::vector<SelectItem> projection;   // A, star expanded
  std::vector<std::string> output_names;
  std::vector<std::string> rules;       // rules that changed the plan, in order

  int var_index(std::string_view name) const;
  const PlanVar& var(std::string_view name) const;
  bool is_graph_var(std::string_view name) const;
};

/// Resolves names and splits WHERE into joins and selections.
LogicalPlan build_logical_plan(const QueryAst& ast, const Catalog& catalog);

/// Operator tree in the canonical projection / selection / join / match shape.
struct LogicalNode {
  std::string op;      // Projection, Selection, CrossModelJoin, Match, GraphProjection, CollectionRef
  std::string detail;
  std::vector<LogicalNode> children;
};
LogicalNode logical_tree(const LogicalPlan& plan);
std::string render(const LogicalNode& node, int depth = 0);

// Rewrite rules. Each returns true when it changed the plan.
bool rule_graph_predicate_pushdown(LogicalPlan& plan);
bool rule_match_trimming(LogicalPlan& plan, const Catalog& catalog);
bool rule_projection_trimming(LogicalPlan& plan);

/// Variables referenced outside the pattern's own predicates.
std::set<std::string> referenced_vars(const LogicalPlan& plan);

/// Canonical form of the plan: variables renamed by position, conjuncts sorted.
std::string canonical_text(const LogicalPlan& plan);
/// FNV-1a over canonical_text.
std::uint64_t fingerprint(const LogicalPlan& plan);

// ------------------------------------------------------------------ execution

enum class JoinShape { MatchFirst, PushDirect, PushAll };  // the three join placements around a match
const char* join_shape_name(JoinShape s);

enum class ExecMode { Full, OptimizerOff, JoinEmulation };
const char* exec_mode_name(ExecMode m);

struct RuleToggles {
  bool predicate_pushdown = true;
  bool match_trimming = true;
  bool projection_trimming = true;
  bool traversal_pruning = true;
  bool join_pushdown = true;
  bool attribute_pushdown = true;  // pushdown strategies inside pattern matching

  static RuleToggles none();
  bool set(std::string_view rule, bool on);  // false for unknown names
};

const std::vector<std::string>& rule_names();

struct QueryOptions {
  ExecMode mode = ExecMode::Full;
  RuleToggles rules;
  CostConstants costs;
  std::optional<JoinShape> force_shape;  // skip costing and use this placement when legal
};

using Row = std::vector<const Record*>;

struct ExecCounters {
  std::uint64_t scanned = 0;
  std::uint64_t tid_fetches = 0;
  std::uint64_t pruned_emissions = 0;
  std::uint64_t membership_tests = 0;

  std::uint64_t record_reads() const { return scanned + tid_fetches; }
};

/// Volcano operator. Rows hold one record pointer per plan variable.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual void open() = 0;
  virtual bool next(Row& row) = 0;
  virtual void close() {}

  virtual std::string name() const = 0;
  virtual std::string params() const { return ""; }
  std::vector<Operator*> children() const;

  double est_cost = 0;
  double est_rows = 0;

 protected:
  std::vector<std::unique_ptr<Operator>> children_;
};

struct PhysicalPlan {
  LogicalPlan logical;
  std::unique_ptr<Operator> root;
  std::vector<Expr> outputs;              // bound projection
  std::vector<std::string> output_names;
  JoinShape shape = JoinShape::MatchFirst;
  std::vector<std::pair<JoinShape, double>> alternatives;  // costed candidates
  std::vector<std::string> rules;
  ExecMode mode = ExecMode::Full;
  std::shared_ptr<TraversalCounters> traversal = std::make_shared<TraversalCounters>();

  double cost() const { return root ? root->est_cost : 0; }
};

/// Applies the rules, enumerates the legal join placements, costs them and
/// keeps the cheapest (or the forced one).
PhysicalPlan optimize(const Database& db, LogicalPlan plan, const QueryOptions& options);

/// One line per operator, two spaces per depth, then a `rules:` line.
std::string explain(const PhysicalPlan& plan);

struct QueryResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  ExecCounters counters;

  std::size_t row_count() const { return rows.size(); }
};

QueryResult execute(const Database& db, PhysicalPlan& plan);

/// Parse, plan, optimize and execute.
QueryResult run_query(const Database& db, std::string_view text, const QueryOptions& options = {});
QueryResult run_query(const Database& db, const QueryAst& ast, const QueryOptions& options = {});

/// Rows as a sorted multiset, for comparing executions.
std::vector<std::vector<Value>> sorted_rows(const QueryResult& r);
/// Order-insensitive hash of the result multiset.
std::uint64_t result_hash(const QueryResult& r);

// ------------------------------------------------------- cross-model join

/// Linked record pairs of two relations or document collections satisfying a
/// binary predicate whose left variable is `left_var`. Equality predicates use a
/// hash index on the smaller side.
std::vector<std::pair<const Record*, const Record*>> cross_model_join(const Collection& left, std::string_view left_var,
                                                                      const Collection& right,
                                                                      std::string_view right_var, const Expr& pred);

/// Joins records into a graph's vertex (or edge) set: the result is the
/// element's candidate set restricted to join partners, each carrying the index
/// of its partner in `records`. `pred` is `element.col = other.col`, bound
/// with the element in slot 0 and the other record in slot 1.
ExternalCandidates cross_model_join_graph(const Database& db, const GraphDef& graph, const Schema& element_table,
                                          bool element_is_edge, const std::vector<const Record*>& records,
                                          const Expr& bound_pred);

}  // namespace gredo
