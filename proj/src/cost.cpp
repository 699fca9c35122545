#include "gredo/cost.hpp"

#include "gredo/error.hpp"

namespace gredo {

void CostConstants::validate() const {
  if (!(io > 0) || !(cpu > 0) || !(block > 0) || !(buffer > 0)) {
    throw ContractError("cost constants must be positive");
  }
}

const char* traversal_case_name(TraversalCase c) {
  switch (c) {
    case TraversalCase::VxI: return "VxI";
    case TraversalCase::IxV: return "IxV";
    case TraversalCase::IxI: return "IxI";
    case TraversalCase::IxE: return "IxE";
  }
  return "?";
}

double cost_traverse(TraversalCase c, double n, double avg_degree, const CostConstants& k) {
  switch (c) {
    case TraversalCase::VxI: return n * k.cpu;
    case TraversalCase::IxV: return n * (k.cpu + k.io);
    case TraversalCase::IxI: return n * avg_degree * k.cpu;
    case TraversalCase::IxE: return n * avg_degree * (2 * k.cpu + k.io);
  }
  return 0;
}

double cost_match(const MatchCostInput& in, const CostConstants& k) {
  double algo2 = (in.pushed_vertex_rows + in.pushed_edge_rows) * (k.io + k.cpu) + in.traversal;
  double prop = in.residual_rows * k.cpu;
  return algo2 + prop;
}

const char* join_placement_name(JoinPlacement p) {
  switch (p) {
    case JoinPlacement::InMemory: return "in-memory";
    case JoinPlacement::BothFit: return "both-fit";
    case JoinPlacement::LeftFits: return "left-fits";
  }
  return "?";
}

JoinPlacement choose_join_placement(double left, double right, bool in_memory, const CostConstants& k) {
  if (in_memory) return JoinPlacement::InMemory;
  if (left + right <= k.buffer) return JoinPlacement::BothFit;
  return JoinPlacement::LeftFits;
}

double cost_join(double nl, double nr, JoinPlacement p, const CostConstants& k, bool hash) {
  double cpu = (hash ? nl + nr : nl * nr) * k.cpu;
  switch (p) {
    case JoinPlacement::InMemory: return cpu;
    case JoinPlacement::BothFit: return (nl / k.block + nr / k.block) * k.io + cpu;
    case JoinPlacement::LeftFits: return (nl / k.block + nl * nr / k.block) * k.io + cpu;
  }
  return cpu;
}

}  // namespace gredo
