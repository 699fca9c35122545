#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "gredo/query.hpp"

namespace gredo {

/// Dense row-major matrix of finite doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  /// Throws ContractError on a length mismatch and ExecutionError on NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::vector<double>& data() const noexcept { return data_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::size_t bytes() const noexcept { return data_.size() * sizeof(double); }

  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  Matrix transposed() const;
  static Matrix identity(std::size_t n);

  /// Header line with column labels when present, then one line per row.
  std::string to_csv() const;

  /// Dimensions and entries; labels are ignored.
  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Local access: numeric columns of every live record, in tid order. Row
/// labels are tids. Empty `columns` takes every numeric column.
Matrix rel2matrix(const Collection& coll, const std::vector<std::string>& columns = {});
/// Same over a query result; rows follow sorted_rows order, labels are positions.
Matrix rel2matrix(const QueryResult& result, const std::vector<std::string>& columns = {});

/// Random access: one row per record satisfying `pred`, taken from a numeric
/// array column. Ragged rows are an error unless `pad` zero-extends them.
Matrix gather_matrix(const Collection& coll, const std::optional<Predicate>& pred, std::string_view array_column,
                     bool pad = false);

/// Fixed-size pool; run() splits [0, tasks) across the workers and returns
/// once every task finished.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return threads_.size() + 1; }
  void run(std::size_t tasks, const std::function<void(std::size_t)>& body);

 private:
  void loop();

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t tasks_ = 0;
  std::size_t next_ = 0;
  std::size_t running_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

struct KernelOptions {
  std::size_t workers = 1;
  std::size_t tile = 64;
};

/// Tiled product; each output entry accumulates k in ascending order, so the
/// result does not depend on the worker count.
Matrix multiply(const Matrix& x, const Matrix& y, const KernelOptions& opt = {});
/// Row-pair cosine similarity; rows with zero norm give 0.
Matrix cosine_similarity(const Matrix& x, const Matrix& y, const KernelOptions& opt = {});

struct RegressionParams {
  double rate = 0.1;
  int iterations = 100;
  double tolerance = 1e-6;
  double l2 = 0.0;
  bool standardize = false;

  /// Throws ContractError on out-of-range values.
  void validate() const;
};

struct RegressionResult {
  std::vector<double> weights;  // intercept first, then one per column
  double loss = 0;              // at the returned weights
  std::vector<double> losses;   // before each update, then the final loss
  int iterations = 0;
  double gradient_norm = 0;
};

/// Mean log-loss plus l2/2 * |w[1:]|^2.
double logistic_loss(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w, double l2 = 0.0);
/// Gradient of logistic_loss, summed over fixed row blocks in block order.
std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w,
                                      double l2 = 0.0, const KernelOptions& opt = {});
/// Batch gradient descent from zero weights.
RegressionResult logistic_regression(const Matrix& x, const std::vector<double>& y, const RegressionParams& params = {},
                                     const KernelOptions& opt = {});
/// Columns shifted to mean 0 and scaled to unit variance (constant columns become 0).
Matrix standardize(const Matrix& x);

// ---------------------------------------------------------------- buffer

/// Materialized matrices keyed by plan fingerprint, valid while the source
/// collections keep the versions they had at materialization.
class InterBuffer {
 public:
  explicit InterBuffer(std::size_t budget_bytes = 64u << 20) : budget_(budget_bytes) {}

  using Versions = std::vector<std::pair<Oid, std::uint64_t>>;

  std::optional<Matrix> lookup(std::uint64_t key, const Database& db);
  void put(std::uint64_t key, Matrix m, Versions versions);
  void clear();

  std::size_t size() const;
  std::size_t bytes() const;
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  struct Entry {
    Matrix matrix;
    Versions versions;
    std::list<std::uint64_t>::iterator lru;
  };
  void evict();

  std::size_t budget_;
  std::size_t used_ = 0;
  std::unordered_map<std::uint64_t, Entry> entries_;
  std::list<std::uint64_t> lru_;  // most recent first
  mutable std::mutex mu_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// Versions of every collection a plan reads.
InterBuffer::Versions source_versions(const Database& db, const LogicalPlan& plan);

// -------------------------------------------------------------- pipeline

enum class StepKind { Materialize, Rel2Matrix, Multiply, Similarity, Regression };
const char* step_kind_name(StepKind k);

struct TaskInput {
  enum class Kind { Query, Task };
  Kind kind = Kind::Query;
  std::size_t index = 0;
};

struct AnalysisTask {
  AnalyzeOp op = AnalyzeOp::Regression;
  std::vector<TaskInput> inputs;
  std::vector<std::pair<std::string, Value>> options;
};

struct AnalysisSpec {
  std::vector<std::uint64_t> query_fingerprints;  // one per input query
  std::vector<AnalysisTask> tasks;
};

struct PipelineStep {
  StepKind kind = StepKind::Materialize;
  std::vector<std::size_t> inputs;  // earlier step indices
  std::size_t query = 0;            // Materialize: query index
  std::size_t task = 0;             // operator steps: task index
};

struct PipelinePlan {
  std::vector<PipelineStep> steps;
  std::vector<std::size_t> task_step;  // output step of each task

  std::string to_string() const;
};

/// Topologically ordered invocations with matrix generation in front of every
/// query input; equal fingerprints share one materialization. Cycles and
/// unbound inputs raise ExecutionError.
PipelinePlan plan_pipeline(const AnalysisSpec& spec);

struct AnalyticsOptions {
  KernelOptions kernel;
  InterBuffer* buffer = nullptr;
};

struct AnalyzeResult {
  AnalyzeOp op = AnalyzeOp::Regression;
  Matrix matrix;                            // product or similarity
  std::optional<RegressionResult> regression;
  double baseline_loss = 0;                 // intercept-only loss, regression only
  std::vector<std::string> features;
  PipelinePlan pipeline;
  std::size_t buffer_hits = 0;
};

/// Runs `ANALYZE ...`: materializes the queries (through the buffer when
/// given), generates matrices and invokes the operator.
AnalyzeResult run_analyze(const Database& db, const AnalyzeAst& ast, const QueryOptions& qopt = {},
                          const AnalyticsOptions& aopt = {});

}  // namespace gredo
