#pragma once

#include <cstdint>

namespace gredo {

struct CostConstants {
  double io = 100.0;
  double cpu = 1.0;
  double block = 100.0;   // records per block
  double buffer = 1e6;    // records the buffer pool holds

  /// Throws ContractError unless every constant is positive.
  void validate() const;
};

enum class TraversalCase { VxI, IxV, IxI, IxE };

const char* traversal_case_name(TraversalCase c);

/// Cost of one hybrid traversal over |O1| first operands; `avg_degree` is |E|/|V|.
double cost_traverse(TraversalCase c, double first_operands, double avg_degree, const CostConstants& k);

struct MatchCostInput {
  double pushed_vertex_rows = 0;  // sum of |V| over vertex tables scanned for pushed predicates
  double pushed_edge_rows = 0;    // same for edge tables
  double traversal = 0;           // lambda * Cost of the traversal steps
  double residual_rows = 0;       // rows reaching deferred predicate evaluation
};

/// Cost_algo2 + Cost_prop.
double cost_match(const MatchCostInput& in, const CostConstants& k);

enum class JoinPlacement { InMemory, BothFit, LeftFits };

const char* join_placement_name(JoinPlacement p);
/// In-memory when both inputs are already materialized intermediates; otherwise
/// chosen by comparing N_L + N_R and N_L against the buffer capacity.
JoinPlacement choose_join_placement(double left, double right, bool in_memory, const CostConstants& k);
/// Nested-loop cost. `hash` replaces the N_L * N_R CPU term with N_L + N_R.
double cost_join(double left, double right, JoinPlacement p, const CostConstants& k, bool hash = false);

inline constexpr double kTraversalFanoutCap = 1e6;

}  // namespace gredo
