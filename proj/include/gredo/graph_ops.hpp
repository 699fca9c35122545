#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gredo/cost.hpp"
#include "gredo/database.hpp"
#include "gredo/expr.hpp"

namespace gredo {

/// Instrumentation shared by traversal and matching.
struct TraversalCounters {
  std::uint64_t tid_fetches = 0;        // vertex and edge records fetched by tid
  std::uint64_t pruned_emissions = 0;   // emissions of steps removed by traversal pruning
  std::uint64_t membership_tests = 0;   // nid membership checks at the far end of a hop
  std::uint64_t pairs = 0;              // pairs emitted by hybrid traversal
};

enum class OperandKind { VertexRecords, NodeIds, EdgeRecords };

/// Operand of a hybrid traversal: records of one table, or a set of nids.
struct OperandSet {
  OperandKind kind = OperandKind::NodeIds;
  Oid oid = 0;                          // table of V / E members
  std::vector<const Record*> records;   // V or E members
  std::vector<Nid> nids;                // I members
  bool everything = false;              // the full nid set I (or every record of the table)
  std::unordered_set<std::uint64_t> index;  // nids (I) or tids (V/E)

  static OperandSet vertex_records(Oid oid, std::vector<const Record*> records);
  static OperandSet edge_records(Oid oid, std::vector<const Record*> records);
  static OperandSet all_edges(Oid oid);
  static OperandSet node_ids(std::vector<Nid> nids);
  static OperandSet all_nodes();

  bool contains_nid(Nid nid) const { return everything || index.count(nid) != 0; }
  bool contains_record(Oid o, Tid tid) const { return o == oid && (everything || index.count(tid) != 0); }
};

struct TraversalPair {
  const Record* first_record = nullptr;
  Nid first_nid = 0;
  const Record* second_record = nullptr;
  Nid second_nid = 0;
};

/// Volcano-style hybrid traversal: results for one first operand at a time are
/// queued and handed out by emit().
class HybridTraversal {
 public:
  HybridTraversal(const Database& db, const GraphDef& graph, TraversalCase c, const OperandSet& first,
                  const OperandSet& second, TraversalCounters* counters = nullptr);

  std::optional<TraversalPair> emit();

 private:
  void expand(std::size_t i);

  const Database& db_;
  const GraphDef& graph_;
  const GraphTopology& topo_;
  TraversalCase case_;
  const OperandSet& first_;
  const OperandSet& second_;
  TraversalCounters* counters_;
  std::size_t next_ = 0;
  std::deque<TraversalPair> queue_;
};

std::vector<TraversalPair> hybrid_traverse(const Database& db, const GraphDef& graph, TraversalCase c,
                                           const OperandSet& first, const OperandSet& second,
                                           TraversalCounters* counters = nullptr);

struct PatternVertex {
  std::string var;
  std::string label;
  std::optional<Expr> pred;  // Phi(v), unbound; references use `var`
};

/// Edge i joins chain vertices i and i+1. `forward` means the stored edge runs
/// from vertex i to vertex i+1.
struct PatternEdge {
  std::string var;
  std::string label;
  bool forward = true;
  std::optional<Expr> pred;
};

/// Chain pattern over one graph: v0 -e0- v1 -e1- ... vn.
struct Pattern {
  std::string graph;
  std::vector<PatternVertex> vertices;
  std::vector<PatternEdge> edges;

  std::vector<std::string> vars() const;
};

/// Overrides used by the optimizer-off mode, ablations and property tests.
struct PatternPlanOptions {
  bool pushdown = true;                           // apply the pushdown strategy at all
  bool pruning = true;                            // query-aware traversal pruning
  bool elision = true;                            // far-end membership test elision
  std::optional<bool> start_at_last;              // force the start end
  std::optional<std::set<std::string>> needed;    // variables read downstream; nullopt = every variable
  std::set<std::string> force_push;               // variables whose predicate must be pushed
  std::set<std::string> force_defer;              // variables whose predicate must be deferred
  std::set<std::string> externally_restricted;    // variables whose candidates come from a pushed join
  std::map<std::string, double> external_rows;    // estimated candidate count per such variable
};

/// One step of the hybrid traversal sequence.
struct TraversalStep {
  TraversalCase kind;
  bool element_is_edge = false;
  std::size_t element = 0;   // pattern vertex or edge index the step produces
  std::size_t hop = 0;
  bool pruned = false;
};

struct ElementPlan {
  std::optional<Expr> pred;      // bound unary predicate
  bool pushed = false;
  bool needed = true;            // read downstream
  bool restricted = false;       // candidate set narrower than the whole label table
  bool external = false;         // candidates supplied by a pushed join instead of a scan
  bool pruned = false;           // its fetch step was removed
  double selectivity = 1.0;
  double table_rows = 0;
  Oid oid = 0;
};

struct HopPlan {
  std::size_t from = 0;          // chain vertex index
  std::size_t to = 0;
  std::size_t edge = 0;
  Direction adjacency = Direction::Forward;
  bool elide_membership = false;
};

struct AnnotatedPattern {
  Pattern pattern;
  const GraphDef* graph = nullptr;
  bool start_at_last = false;
  std::vector<ElementPlan> vertex_plans;
  std::vector<ElementPlan> edge_plans;
  std::vector<HopPlan> hops;
  std::vector<TraversalStep> steps;   // traversal sequence
  double est_cost = 0;
  double est_rows = 0;
  double avg_degree = 0;
  std::vector<std::string> decisions;  // human-readable notes for EXPLAIN

  std::size_t start() const { return start_at_last ? pattern.vertices.size() - 1 : 0; }
  std::string summary() const;
};

using StatsProvider = std::function<const ColumnStats*(Oid)>;

/// Resolves labels, binds predicates and chooses direction, pushdown and
/// pruning. Unknown labels raise SchemaError.
AnnotatedPattern plan_pattern(const Database& db, const Pattern& p, const StatsProvider& stats,
                              const CostConstants& consts, const PatternPlanOptions& options = {});

/// Estimated matching cost of an annotation; used by plan_pattern and by tests.
double estimate_pattern_cost(const AnnotatedPattern& ap, const CostConstants& consts, double* rows = nullptr);

/// Candidates supplied by a cross-model join pushed into the graph: each
/// element record travels with an opaque payload index.
struct ExternalCandidates {
  std::vector<std::pair<const Record*, std::int32_t>> members;
};

/// Materialized graph-relation. Records of pruned elements are null.
struct GraphRelation {
  std::vector<std::string> vertex_vars;
  std::vector<std::string> edge_vars;
  struct Row {
    std::vector<Nid> nids;                    // per vertex
    std::vector<const Record*> vertices;      // per vertex
    std::vector<const Record*> edges;         // per edge
    std::vector<std::int32_t> vertex_ext;     // payload per vertex, -1 when none
    std::vector<std::int32_t> edge_ext;
  };
  std::vector<Row> rows;
};

struct MatchInputs {
  std::unordered_map<std::string, ExternalCandidates> external;  // by pattern variable
};

GraphRelation match_pattern(const Database& db, const AnnotatedPattern& ap, const MatchInputs& inputs = {},
                            TraversalCounters* counters = nullptr);

/// Minimum-hop path over forward adjacency; BFS expands smaller nids first.
std::optional<std::vector<Nid>> shortest_path(const Database& db, const GraphDef& graph, VertexKey src,
                                              VertexKey dst);

}  // namespace gredo
