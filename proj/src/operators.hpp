#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gredo/query.hpp"

namespace gredo::detail {

/// Slots set in either row; the inputs never share a variable.
Row merge_rows(const Row& a, const Row& b);

class TableScanOp final : public Operator {
 public:
  TableScanOp(const Collection& coll, std::string var, int slot, std::size_t width, std::optional<Expr> pred,
              std::string kind = "TableScan");

  void open() override;
  bool next(Row& row) override;
  void close() override { cursor_.reset(); }
  std::string name() const override { return kind_; }
  std::string params() const override;

 private:
  const Collection& coll_;
  std::string var_;
  int slot_;
  std::size_t width_;
  std::optional<Expr> pred_;
  std::string kind_;
  std::optional<RecordCursor> cursor_;
};

class FilterOp final : public Operator {
 public:
  FilterOp(std::unique_ptr<Operator> child, std::vector<Expr> preds, std::vector<Expr> bound);

  void open() override { children_[0]->open(); }
  bool next(Row& row) override;
  void close() override { children_[0]->close(); }
  std::string name() const override { return "Filter"; }
  std::string params() const override;

 private:
  std::vector<Expr> preds_;
  std::vector<Expr> bound_;
};

/// Equality keys are (left ref, right ref) pairs, bound to row slots.
class HashJoinOp final : public Operator {
 public:
  HashJoinOp(std::unique_ptr<Operator> left, std::unique_ptr<Operator> right,
             std::vector<std::pair<ColumnRef, ColumnRef>> keys, std::vector<Expr> preds, std::vector<Expr> residual);

  void open() override;
  bool next(Row& row) override;
  void close() override;
  std::string name() const override { return "HashJoin"; }
  std::string params() const override;

 private:
  std::size_t hash_keys(const Row& row, bool left, bool& has_null) const;

  std::vector<std::pair<ColumnRef, ColumnRef>> keys_;
  std::vector<Expr> preds_;
  std::vector<Expr> residual_;
  std::vector<Row> build_;
  std::unordered_multimap<std::size_t, std::size_t> table_;
  Row probe_;
  std::vector<std::size_t> matches_;
  std::size_t match_pos_ = 0;
};

class NestedLoopJoinOp final : public Operator {
 public:
  NestedLoopJoinOp(std::unique_ptr<Operator> left, std::unique_ptr<Operator> right, std::vector<Expr> preds,
                   std::vector<Expr> bound);

  void open() override;
  bool next(Row& row) override;
  void close() override;
  std::string name() const override { return "NestedLoopJoin"; }
  std::string params() const override;

 private:
  std::vector<Expr> preds_;
  std::vector<Expr> bound_;
  std::vector<Row> inner_;
  Row outer_;
  bool have_outer_ = false;
  std::size_t pos_ = 0;
};

/// Relational rows pushed into the matcher as candidates of one pattern element.
struct PushedJoin {
  std::string var;         // anchor pattern variable
  bool is_edge = false;
  std::size_t element = 0;
  const Schema* table = nullptr;
  Expr pred;               // unbound link predicate
  Expr bound;              // element in slot 0, partner in slot 1
  int partner_slot = -1;   // partner variable's slot in the block rows
};

class PatternMatchOp final : public Operator {
 public:
  PatternMatchOp(const Database& db, AnnotatedPattern ap, std::vector<int> vertex_slots, std::vector<int> edge_slots,
                 std::size_t width, std::shared_ptr<TraversalCounters> counters);

  void add_block(std::unique_ptr<Operator> block, PushedJoin push);

  void open() override;
  bool next(Row& row) override;
  void close() override;
  std::string name() const override { return "PatternMatch"; }
  std::string params() const override;

  const AnnotatedPattern& annotated() const { return ap_; }

 private:
  const Database& db_;
  AnnotatedPattern ap_;
  std::vector<int> vertex_slots_;
  std::vector<int> edge_slots_;
  std::size_t width_;
  std::shared_ptr<TraversalCounters> counters_;
  std::vector<PushedJoin> pushes_;
  std::vector<std::vector<Row>> blocks_;
  GraphRelation rel_;
  std::size_t pos_ = 0;
};

class ProjectOp final : public Operator {
 public:
  ProjectOp(std::unique_ptr<Operator> child, std::vector<std::string> names);

  void open() override { children_[0]->open(); }
  bool next(Row& row) override { return children_[0]->next(row); }
  void close() override { children_[0]->close(); }
  std::string name() const override { return "Project"; }
  std::string params() const override;

 private:
  std::vector<std::string> names_;
};

}  // namespace gredo::detail
