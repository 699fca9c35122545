#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gredo/expr.hpp"
#include "gredo/value.hpp"

namespace gredo {

class Collection;

struct ColumnStat {
  std::uint64_t null_count = 0;
  std::optional<Value> min;
  std::optional<Value> max;
  std::uint64_t ndv = 0;
};

/// Per-collection statistics. Top-level keys of document columns get their own
/// entries under "<column>.<key>" so path predicates can be estimated too.
struct ColumnStats {
  std::uint64_t row_count = 0;
  std::vector<ColumnStat> columns;
  std::map<std::string, ColumnStat> document_keys;

  /// Stats for a bound reference; nullptr when not tracked.
  const ColumnStat* find(const ColumnRef& bound_ref, const Schema& schema) const;
};

/// One full scan; exact counts, min/max and distinct values.
ColumnStats collect_stats(const Collection& collection);

/// Fraction of rows expected to satisfy a bound unary predicate, in [0, 1].
/// Uniformity and attribute independence are assumed; missing stats yield 1.
double estimate_selectivity(const Expr& bound_pred, const ColumnStats* stats, const Schema& schema);

}  // namespace gredo
