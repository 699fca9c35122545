#include "gredo/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gredo/error.hpp"

namespace gredo {

// --------------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ContractError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                        std::to_string(rows * cols));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ExecutionError("matrix entry (" + std::to_string(i / std::max<std::size_t>(cols, 1)) + ", " +
                           std::to_string(cols ? i % cols : 0) + ") is not finite");
    }
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  t.row_labels = col_labels;
  t.col_labels = row_labels;
  return t;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::to_csv() const {
  std::string out;
  if (!col_labels.empty()) {
    for (std::size_t j = 0; j < col_labels.size(); ++j) out += (j ? "," : "") + col_labels[j];
    out += "\n";
  }
  char buf[32];
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", (*this)(i, j));
      if (j) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------- matrix generation

namespace {

double numeric_cell(const Value& v, const std::string& column, std::size_t row) {
  if (v.is_null()) throw ExecutionError("column '" + column + "' is Null in row " + std::to_string(row));
  if (v.type() == Value::Type::Bool) return v.as_bool() ? 1.0 : 0.0;
  auto n = v.as_number();
  if (!n) throw ExecutionError("column '" + column + "' is not numeric (" + type_name(v.type()) + ")");
  return *n;
}

bool numeric_type(ColumnType t) { return t == ColumnType::Int || t == ColumnType::Float || t == ColumnType::Bool; }

}  // namespace

Matrix rel2matrix(const Collection& coll, const std::vector<std::string>& columns) {
  const Schema& s = coll.schema();
  std::vector<std::size_t> idx;
  std::vector<std::string> names;
  if (columns.empty()) {
    for (std::size_t i = 0; i < s.columns.size(); ++i) {
      if (numeric_type(s.columns[i].type)) {
        idx.push_back(i);
        names.push_back(s.columns[i].name);
      }
    }
  } else {
    for (const auto& c : columns) {
      auto i = s.column_index(c);
      if (!i) throw SchemaError("unknown column '" + c + "' in '" + s.name + "'");
      if (!numeric_type(s.columns[*i].type)) throw ExecutionError("column '" + c + "' is not numeric");
      idx.push_back(*i);
      names.push_back(c);
    }
  }
  auto records = coll.scan_all();
  std::vector<double> data;
  data.reserve(records.size() * idx.size());
  std::vector<std::string> labels;
  labels.reserve(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& values = records[r]->values;
    for (std::size_t k = 0; k < idx.size(); ++k) data.push_back(numeric_cell(values[idx[k]], names[k], r));
    labels.push_back(std::to_string(records[r]->tid));
  }
  Matrix m(records.size(), idx.size(), std::move(data));
  m.row_labels = std::move(labels);
  m.col_labels = std::move(names);
  return m;
}

Matrix rel2matrix(const QueryResult& result, const std::vector<std::string>& columns) {
  std::vector<std::size_t> idx;
  if (columns.empty()) {
    for (std::size_t i = 0; i < result.columns.size(); ++i) idx.push_back(i);
  } else {
    for (const auto& c : columns) {
      auto it = std::find(result.columns.begin(), result.columns.end(), c);
      if (it == result.columns.end()) throw SchemaError("query result has no column '" + c + "'");
      idx.push_back(static_cast<std::size_t>(it - result.columns.begin()));
    }
  }
  auto rows = sorted_rows(result);
  std::vector<double> data;
  data.reserve(rows.size() * idx.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k : idx) data.push_back(numeric_cell(rows[r][k], result.columns[k], r));
  }
  Matrix m(rows.size(), idx.size(), std::move(data));
  for (std::size_t k : idx) m.col_labels.push_back(result.columns[k]);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row_labels.push_back(std::to_string(r));
  return m;
}

Matrix gather_matrix(const Collection& coll, const std::optional<Predicate>& pred, std::string_view array_column,
                     bool pad) {
  const Schema& s = coll.schema();
  ColumnRef ref;
  ref.var = "x";
  ref.column = std::string(array_column);
  bind_ref(ref, 0, s);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::size_t width = 0;
  bool ragged = false;
  auto cursor = coll.scan(pred);
  while (const Record* r = cursor.next()) {
    const Record* slots[1] = {r};
    const Value* v = lookup(ref, RecordSlots(slots, 1));
    if (v == nullptr || v->type() != Value::Type::Array) {
      throw ExecutionError("'" + std::string(array_column) + "' of record " + std::to_string(r->tid) +
                           " is not an array");
    }
    std::vector<double> row;
    for (const auto& e : v->as_array()) {
      auto n = e.as_number();
      if (!n) throw ExecutionError("non-numeric element in '" + std::string(array_column) + "' of record " + std::to_string(r->tid));
      row.push_back(*n);
    }
    if (!rows.empty() && row.size() != width) ragged = true;
    width = rows.empty() ? row.size() : std::max(width, row.size());
    rows.push_back(std::move(row));
    labels.push_back(std::to_string(r->tid));
  }
  if (ragged && !pad) throw ExecutionError("ragged arrays in '" + std::string(array_column) + "'; use padding");
  std::vector<double> data;
  data.reserve(rows.size() * width);
  for (auto& row : rows) {
    row.resize(width, 0.0);
    data.insert(data.end(), row.begin(), row.end());
  }
  Matrix m(rows.size(), width, std::move(data));
  m.row_labels = std::move(labels);
  return m;
}

// ---------------------------------------------------------------- WorkerPool

WorkerPool::WorkerPool(std::size_t workers) {
  if (workers == 0) throw ContractError("worker count must be at least 1");
  for (std::size_t i = 1; i < workers; ++i) threads_.emplace_back([this] { loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::loop() {
  std::uint64_t seen = 0;
  std::unique_lock lock(mu_);
  for (;;) {
    wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
    if (stop_) return;
    seen = generation_;
    ++running_;
    while (next_ < tasks_) {
      std::size_t t = next_++;
      lock.unlock();
      try {
        (*body_)(t);
      } catch (...) {
        lock.lock();
        if (!error_) error_ = std::current_exception();
        lock.unlock();
      }
      lock.lock();
    }
    if (--running_ == 0) done_.notify_all();
  }
}

void WorkerPool::run(std::size_t tasks, const std::function<void(std::size_t)>& body) {
  std::unique_lock lock(mu_);
  body_ = &body;
  tasks_ = tasks;
  next_ = 0;
  error_ = nullptr;
  ++generation_;
  wake_.notify_all();
  // the caller works too
  ++running_;
  while (next_ < tasks_) {
    std::size_t t = next_++;
    lock.unlock();
    try {
      body(t);
    } catch (...) {
      lock.lock();
      if (!error_) error_ = std::current_exception();
      lock.unlock();
    }
    lock.lock();
  }
  --running_;
  done_.wait(lock, [&] { return running_ == 0 && next_ >= tasks_; });
  body_ = nullptr;
  tasks_ = 0;
  if (error_) std::rethrow_exception(error_);
}

// ------------------------------------------------------------------- kernels

namespace {

void for_each_task(const KernelOptions& opt, std::size_t tasks, const std::function<void(std::size_t)>& body) {
  if (opt.workers <= 1 || tasks <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) body(t);
    return;
  }
  WorkerPool pool(std::min(opt.workers, tasks));
  pool.run(tasks, body);
}

std::size_t tile_of(const KernelOptions& opt) {
  if (opt.tile == 0) throw ContractError("tile size must be positive");
  return opt.tile;
}

}  // namespace

Matrix multiply(const Matrix& x, const Matrix& y, const KernelOptions& opt) {
  if (x.cols() != y.rows()) {
    throw ExecutionError("cannot multiply " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " by " +
                         std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
  const std::size_t n = x.rows(), m = y.cols(), K = x.cols(), T = tile_of(opt);
  std::vector<double> z(n * m, 0.0);
  const std::size_t bi = (n + T - 1) / T, bj = (m + T - 1) / T;
  for_each_task(opt, bi * bj, [&](std::size_t t) {
    const std::size_t i0 = (t / bj) * T, j0 = (t % bj) * T;
    const std::size_t i1 = std::min(n, i0 + T), j1 = std::min(m, j0 + T);
    // k blocks in ascending order keep every entry's summation order fixed
    for (std::size_t k0 = 0; k0 < K; k0 += T) {
      const std::size_t k1 = std::min(K, k0 + T);
      for (std::size_t i = i0; i < i1; ++i) {
        const double* xr = x.row(i);
        double* zr = z.data() + i * m;
        for (std::size_t k = k0; k < k1; ++k) {
          const double a = xr[k];
          const double* yr = y.row(k);
          for (std::size_t j = j0; j < j1; ++j) zr[j] += a * yr[j];
        }
      }
    }
  });
  Matrix out(n, m, std::move(z));
  out.row_labels = x.row_labels;
  out.col_labels = y.col_labels;
  return out;
}

Matrix cosine_similarity(const Matrix& x, const Matrix& y, const KernelOptions& opt) {
  if (x.cols() != y.cols()) {
    throw ExecutionError("similarity needs equal widths, got " + std::to_string(x.cols()) + " and " +
                         std::to_string(y.cols()));
  }
  auto norms = [](const Matrix& a) {
    std::vector<double> n(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * a(i, k);
      n[i] = std::sqrt(s);
    }
    return n;
  };
  const auto nx = norms(x), ny = norms(y);
  const std::size_t n = x.rows(), m = y.rows(), K = x.cols(), T = tile_of(opt);
  std::vector<double> s(n * m, 0.0);
  const std::size_t bi = (n + T - 1) / T, bj = (m + T - 1) / T;
  for_each_task(opt, bi * bj, [&](std::size_t t) {
    const std::size_t i0 = (t / bj) * T, j0 = (t % bj) * T;
    for (std::size_t i = i0; i < std::min(n, i0 + T); ++i) {
      for (std::size_t j = j0; j < std::min(m, j0 + T); ++j) {
        if (nx[i] == 0 || ny[j] == 0) continue;
        double dot = 0;
        for (std::size_t k = 0; k < K; ++k) dot += x(i, k) * y(j, k);
        s[i * m + j] = dot / (nx[i] * ny[j]);
      }
    }
  });
  Matrix out(n, m, std::move(s));
  out.row_labels = x.row_labels;
  out.col_labels = y.row_labels;
  return out;
}

// ---------------------------------------------------------------- regression

void RegressionParams::validate() const {
  if (!(rate > 0)) throw ContractError("learning rate must be positive");
  if (iterations < 1) throw ContractError("iterations must be at least 1");
  if (!(tolerance >= 0)) throw ContractError("tolerance must be non-negative");
  if (!(l2 >= 0)) throw ContractError("l2 penalty must be non-negative");
}

namespace {

constexpr std::size_t kRowBlock = 256;

void check_inputs(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w) {
  if (x.rows() == 0) throw ExecutionError("regression needs at least one row");
  if (y.size() != x.rows()) throw ExecutionError("label count does not match row count");
  if (w.size() != x.cols() + 1) throw ContractError("weight vector must have cols+1 entries");
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw ExecutionError("labels must be 0 or 1");
  }
}

double linear(const Matrix& x, std::size_t i, const std::vector<double>& w) {
  double z = w[0];
  const double* r = x.row(i);
  for (std::size_t k = 0; k < x.cols(); ++k) z += w[k + 1] * r[k];
  return z;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logistic_loss(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w, double l2) {
  check_inputs(x, y, w);
  double sum = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = linear(x, i, w);
    // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
    sum += softplus(z) - y[i] * z;
  }
  double penalty = 0;
  for (std::size_t k = 1; k < w.size(); ++k) penalty += w[k] * w[k];
  return sum / static_cast<double>(x.rows()) + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w,
                                      double l2, const KernelOptions& opt) {
  check_inputs(x, y, w);
  const std::size_t d = w.size();
  const std::size_t blocks = (x.rows() + kRowBlock - 1) / kRowBlock;
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(d, 0.0));
  for_each_task(opt, blocks, [&](std::size_t b) {
    std::vector<double>& g = partial[b];
    for (std::size_t i = b * kRowBlock; i < std::min(x.rows(), (b + 1) * kRowBlock); ++i) {
      double r = sigmoid(linear(x, i, w)) - y[i];
      g[0] += r;
      const double* row = x.row(i);
      for (std::size_t k = 0; k < x.cols(); ++k) g[k + 1] += r * row[k];
    }
  });
  std::vector<double> grad(d, 0.0);
  for (const auto& g : partial) {
    for (std::size_t k = 0; k < d; ++k) grad[k] += g[k];
  }
  const double n = static_cast<double>(x.rows());
  for (std::size_t k = 0; k < d; ++k) grad[k] /= n;
  for (std::size_t k = 1; k < d; ++k) grad[k] += l2 * w[k];
  return grad;
}

RegressionResult logistic_regression(const Matrix& x, const std::vector<double>& y, const RegressionParams& params,
                                     const KernelOptions& opt) {
  params.validate();
  const Matrix& in = x;
  Matrix scaled;
  if (params.standardize) scaled = standardize(x);
  const Matrix& m = params.standardize ? scaled : in;
  RegressionResult out;
  out.weights.assign(m.cols() + 1, 0.0);
  for (int it = 0; it < params.iterations; ++it) {
    out.losses.push_back(logistic_loss(m, y, out.weights, params.l2));
    auto g = logistic_gradient(m, y, out.weights, params.l2, opt);
    double norm = 0;
    for (double v : g) norm += v * v;
    out.gradient_norm = std::sqrt(norm);
    if (out.gradient_norm < params.tolerance) break;
    for (std::size_t k = 0; k < g.size(); ++k) out.weights[k] -= params.rate * g[k];
    out.iterations = it + 1;
  }
  out.loss = logistic_loss(m, y, out.weights, params.l2);
  out.losses.push_back(out.loss);
  return out;
}

Matrix standardize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= std::max<std::size_t>(1, x.rows());
    double var = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    double sd = std::sqrt(var / std::max<std::size_t>(1, x.rows()));
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = sd > 0 ? (x(i, j) - mean) / sd : 0.0;
  }
  out.row_labels = x.row_labels;
  out.col_labels = x.col_labels;
  return out;
}

// ---------------------------------------------------------------- InterBuffer

std::optional<Matrix> InterBuffer::lookup(std::uint64_t key, const Database& db) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  for (const auto& [oid, version] : it->second.versions) {
    if (!db.records().contains(oid) || db.collection(oid).version() != version) {
      used_ -= it->second.matrix.bytes();
      lru_.erase(it->second.lru);
      entries_.erase(it);
      ++misses_;
      return std::nullopt;
    }
  }
  lru_.splice(lru_.begin(), lru_, it->second.lru);
  ++hits_;
  return it->second.matrix;
}

void InterBuffer::put(std::uint64_t key, Matrix m, Versions versions) {
  std::lock_guard lock(mu_);
  if (auto it = entries_.find(key); it != entries_.end()) {
    used_ -= it->second.matrix.bytes();
    lru_.erase(it->second.lru);
    entries_.erase(it);
  }
  if (m.bytes() > budget_) return;
  used_ += m.bytes();
  lru_.push_front(key);
  entries_.emplace(key, Entry{std::move(m), std::move(versions), lru_.begin()});
  evict();
}

void InterBuffer::evict() {
  while (used_ > budget_ && !lru_.empty()) {
    auto it = entries_.find(lru_.back());
    used_ -= it->second.matrix.bytes();
    entries_.erase(it);
    lru_.pop_back();
  }
}

void InterBuffer::clear() {
  std::lock_guard lock(mu_);
  entries_.clear();
  lru_.clear();
  used_ = 0;
}

std::size_t InterBuffer::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::size_t InterBuffer::bytes() const {
  std::lock_guard lock(mu_);
  return used_;
}

InterBuffer::Versions source_versions(const Database& db, const LogicalPlan& plan) {
  std::set<Oid> oids;
  for (const auto& s : plan.sources) {
    if (s.graph) {
      for (Oid o : s.graph_def->vertex_oids) oids.insert(o);
      oids.insert(s.graph_def->edge_oid);
    } else {
      oids.insert(s.schema->oid);
    }
  }
  InterBuffer::Versions out;
  for (Oid o : oids) out.emplace_back(o, db.collection(o).version());
  return out;
}

}  // namespace gredo
