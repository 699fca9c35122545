#include <algorithm>
#include <cmath>
#include <map>

#include "gredo/analytics.hpp"
#include "gredo/error.hpp"

namespace gredo {

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Materialize: return "materialize";
    case StepKind::Rel2Matrix: return "rel2matrix";
    case StepKind::Multiply: return "multiply";
    case StepKind::Similarity: return "similarity";
    case StepKind::Regression: return "regression";
  }
  return "?";
}

std::string PipelinePlan::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const PipelineStep& s = steps[i];
    out += std::to_string(i) + ": " + step_kind_name(s.kind);
    if (s.kind == StepKind::Materialize) out += " query " + std::to_string(s.query);
    if (!s.inputs.empty()) {
      out += " <-";
      for (std::size_t in : s.inputs) out += " " + std::to_string(in);
    }
    out += "\n";
  }
  return out;
}

namespace {

StepKind step_for(AnalyzeOp op) {
  switch (op) {
    case AnalyzeOp::Multiply: return StepKind::Multiply;
    case AnalyzeOp::Similarity: return StepKind::Similarity;
    case AnalyzeOp::Regression: return StepKind::Regression;
  }
  return StepKind::Regression;
}

}  // namespace

PipelinePlan plan_pipeline(const AnalysisSpec& spec) {
  const std::size_t n = spec.tasks.size();
  // Kahn over task -> task dependencies, ties broken by task index
  std::vector<std::vector<std::size_t>> users(n);
  std::vector<std::size_t> pending(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (spec.tasks[t].inputs.empty()) throw ExecutionError("task " + std::to_string(t) + " has no inputs");
    for (const auto& in : spec.tasks[t].inputs) {
      if (in.kind == TaskInput::Kind::Query) {
        if (in.index >= spec.query_fingerprints.size()) {
          throw ExecutionError("task " + std::to_string(t) + " reads unbound query " + std::to_string(in.index));
        }
      } else {
        if (in.index >= n) throw ExecutionError("task " + std::to_string(t) + " reads unbound task " + std::to_string(in.index));
        users[in.index].push_back(t);
        ++pending[t];
      }
    }
  }
  std::vector<std::size_t> order;
  std::vector<bool> queued(n, false);
  for (bool progress = true; progress && order.size() < n;) {
    progress = false;
    for (std::size_t t = 0; t < n; ++t) {
      if (!queued[t] && pending[t] == 0) {
        queued[t] = true;
        order.push_back(t);
        for (std::size_t u : users[t]) --pending[u];
        progress = true;
        break;
      }
    }
  }
  if (order.size() < n) throw ExecutionError("cyclic dependency between analysis tasks");

  PipelinePlan plan;
  plan.task_step.assign(n, 0);
  std::map<std::uint64_t, std::size_t> matrix_step;  // fingerprint -> rel2matrix step
  auto query_matrix = [&](std::size_t q) {
    std::uint64_t fp = spec.query_fingerprints[q];
    if (auto it = matrix_step.find(fp); it != matrix_step.end()) return it->second;
    PipelineStep m{StepKind::Materialize, {}, q, 0};
    plan.steps.push_back(m);
    PipelineStep r{StepKind::Rel2Matrix, {plan.steps.size() - 1}, q, 0};
    plan.steps.push_back(r);
    matrix_step[fp] = plan.steps.size() - 1;
    return plan.steps.size() - 1;
  };
  for (std::size_t t : order) {
    PipelineStep s{step_for(spec.tasks[t].op), {}, 0, t};
    for (const auto& in : spec.tasks[t].inputs) {
      s.inputs.push_back(in.kind == TaskInput::Kind::Query ? query_matrix(in.index) : plan.task_step[in.index]);
    }
    plan.steps.push_back(s);
    plan.task_step[t] = plan.steps.size() - 1;
  }
  return plan;
}

namespace {

const Value* option(const std::vector<std::pair<std::string, Value>>& opts, std::string_view key) {
  for (const auto& [k, v] : opts) {
    if (k == key) return &v;
  }
  return nullptr;
}

double number_option(const std::vector<std::pair<std::string, Value>>& opts, std::string_view key, double fallback) {
  const Value* v = option(opts, key);
  if (v == nullptr) return fallback;
  auto n = v->as_number();
  if (!n) throw SchemaError("option '" + std::string(key) + "' must be numeric");
  return *n;
}

const std::vector<std::string>& known_options() {
  static const std::vector<std::string> keys = {"label", "rate", "iterations", "tolerance", "l2", "standardize"};
  return keys;
}

}  // namespace

AnalyzeResult run_analyze(const Database& db, const AnalyzeAst& ast, const QueryOptions& qopt,
                          const AnalyticsOptions& aopt) {
  for (const auto& [k, v] : ast.options) {
    if (std::find(known_options().begin(), known_options().end(), k) == known_options().end()) {
      throw SchemaError("unknown ANALYZE option '" + k + "'");
    }
  }
  std::vector<QueryAst> queries{ast.first};
  if (ast.second) queries.push_back(*ast.second);
  if (ast.op == AnalyzeOp::Regression && ast.second) throw SchemaError("REGRESSION takes a single query");

  std::vector<LogicalPlan> plans;
  AnalysisSpec spec;
  for (const auto& q : queries) {
    plans.push_back(build_logical_plan(q, db.catalog()));
    spec.query_fingerprints.push_back(fingerprint(plans.back()));
  }
  AnalysisTask task{ast.op, {}, ast.options};
  for (std::size_t i = 0; i < queries.size(); ++i) task.inputs.push_back({TaskInput::Kind::Query, i});
  spec.tasks.push_back(task);

  AnalyzeResult out;
  out.op = ast.op;
  out.pipeline = plan_pipeline(spec);

  std::vector<Matrix> values(out.pipeline.steps.size());
  std::vector<QueryResult> results(out.pipeline.steps.size());
  std::vector<bool> from_buffer(out.pipeline.steps.size(), false);
  for (std::size_t i = 0; i < out.pipeline.steps.size(); ++i) {
    const PipelineStep& s = out.pipeline.steps[i];
    switch (s.kind) {
      case StepKind::Materialize: {
        if (aopt.buffer) {
          if (auto hit = aopt.buffer->lookup(spec.query_fingerprints[s.query], db)) {
            values[i + 1] = std::move(*hit);
            from_buffer[i + 1] = true;
            ++out.buffer_hits;
            break;
          }
        }
        PhysicalPlan p = optimize(db, plans[s.query], qopt);
        results[i] = execute(db, p);
        break;
      }
      case StepKind::Rel2Matrix: {
        if (from_buffer[i]) break;
        values[i] = rel2matrix(results[s.inputs[0]]);
        if (aopt.buffer) {
          aopt.buffer->put(spec.query_fingerprints[s.query], values[i], source_versions(db, plans[s.query]));
        }
        break;
      }
      case StepKind::Multiply: {
        const Matrix& x = values[s.inputs[0]];
        out.matrix = s.inputs.size() > 1 ? multiply(x, values[s.inputs[1]], aopt.kernel)
                                         : multiply(x, x.transposed(), aopt.kernel);
        break;
      }
      case StepKind::Similarity: {
        const Matrix& x = values[s.inputs[0]];
        out.matrix = cosine_similarity(x, s.inputs.size() > 1 ? values[s.inputs[1]] : x, aopt.kernel);
        break;
      }
      case StepKind::Regression: {
        const Matrix& m = values[s.inputs[0]];
        const Value* label = option(ast.options, "label");
        if (label == nullptr || label->type() != Value::Type::Text) {
          throw SchemaError("REGRESSION needs WITH (label='<column>')");
        }
        auto col = std::find(m.col_labels.begin(), m.col_labels.end(), label->as_text());
        if (col == m.col_labels.end()) throw SchemaError("label column '" + label->as_text() + "' is not in the query result");
        const std::size_t lc = static_cast<std::size_t>(col - m.col_labels.begin());
        std::vector<double> y(m.rows()), feats;
        feats.reserve(m.rows() * (m.cols() - 1));
        for (std::size_t r = 0; r < m.rows(); ++r) {
          for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c == lc) {
              y[r] = m(r, c);
            } else {
              feats.push_back(m(r, c));
            }
          }
        }
        Matrix x(m.rows(), m.cols() - 1, std::move(feats));
        for (std::size_t c = 0; c < m.cols(); ++c) {
          if (c != lc) out.features.push_back(m.col_labels[c]);
        }
        RegressionParams params;
        params.rate = number_option(ast.options, "rate", params.rate);
        params.iterations = static_cast<int>(number_option(ast.options, "iterations", params.iterations));
        params.tolerance = number_option(ast.options, "tolerance", params.tolerance);
        params.l2 = number_option(ast.options, "l2", params.l2);
        if (const Value* st = option(ast.options, "standardize")) {
          params.standardize = st->type() == Value::Type::Bool ? st->as_bool() : st->as_number().value_or(0) != 0;
        }
        out.regression = logistic_regression(x, y, params, aopt.kernel);
        double mean = 0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(y.size());
        out.baseline_loss = (mean <= 0 || mean >= 1) ? 0.0 : -(mean * std::log(mean) + (1 - mean) * std::log(1 - mean));
        break;
      }
    }
  }
  return out;
}

}  // namespace gredo
