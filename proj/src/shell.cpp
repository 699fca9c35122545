#include "gredo/shell.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "gredo/error.hpp"
#include "gredo/fixtures.hpp"
#include "gredo/io.hpp"
#include "gredo/json_io.hpp"

namespace gredo {

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

void SessionConfig::validate() const {
  if (workers == 0) throw ContractError("worker count must be at least 1");
  query.costs.validate();
}

// ------------------------------------------------------------- formatting

std::string format_table(const std::vector<std::string>& columns, const std::vector<std::vector<Value>>& rows) {
  std::vector<std::size_t> width(columns.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
  for (const auto& row : rows) {
    auto& out = cells.emplace_back();
    for (std::size_t c = 0; c < row.size(); ++c) {
      out.push_back(to_display(row[c]));
      width[c] = std::max(width[c], out.back().size());
    }
  }
  auto line = [&](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (c) s += " | ";
      s += v[c];
      if (c + 1 < v.size()) s.append(width[c] - v[c].size(), ' ');
    }
    return s + "\n";
  };
  std::string out = line(columns);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += "-+-";
    out.append(width[c], '-');
  }
  out += "\n";
  for (const auto& r : cells) out += line(r);
  out += "(" + std::to_string(rows.size()) + (rows.size() == 1 ? " row)\n" : " rows)\n");
  return out;
}

std::string format_csv(const std::vector<std::string>& columns, const std::vector<std::vector<Value>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::string& h = columns[c];
    const bool quote = h.empty() || h.find_first_of(",\"\r\n") != std::string::npos;
    out += (c ? "," : "") + (quote ? csv_cell(Value(h)) : h);
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_cell(row[c]);
    out += "\n";
  }
  return out;
}

std::string format_json(const std::vector<std::string>& columns, const std::vector<std::vector<Value>>& rows) {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json obj = Json::object();
    for (std::size_t c = 0; c < row.size(); ++c) obj[columns[c]] = to_json(row[c]);
    arr.push_back(std::move(obj));
  }
  return arr.dump() + "\n";
}

// ------------------------------------------------------------------ bench

bool BenchReport::hashes_agree() const {
  for (const auto& e : entries) {
    for (const auto& o : entries) {
      if (e.scenario == o.scenario && e.hash != o.hash) return false;
    }
  }
  return true;
}

const BenchEntry* BenchReport::find(std::string_view scenario, std::string_view mode) const {
  for (const auto& e : entries) {
    if (e.scenario == scenario && e.mode == mode) return &e;
  }
  return nullptr;
}

std::string BenchReport::to_string(bool with_times) const {
  std::ostringstream out;
  out << "suite " << suite << " scale " << scale << "\n";
  if (entries.empty()) {
    out << "(no scenarios)\n";
    return out.str();
  }
  std::vector<std::string> cols{"scenario", "mode"};
  if (with_times) cols.push_back("wall_ms");
  for (const char* c : {"scanned", "tid_fetches", "record_reads", "rows", "hash"}) cols.push_back(c);
  std::vector<std::vector<Value>> rows;
  for (const auto& e : entries) {
    std::vector<Value> r{e.scenario, e.mode};
    if (with_times) r.emplace_back(std::round(e.wall_ms * 1000) / 1000);
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(e.hash));
    r.emplace_back(static_cast<std::int64_t>(e.scanned));
    r.emplace_back(static_cast<std::int64_t>(e.tid_fetches));
    r.emplace_back(static_cast<std::int64_t>(e.record_reads()));
    r.emplace_back(static_cast<std::int64_t>(e.rows));
    r.emplace_back(std::string(hash));
    rows.push_back(std::move(r));
  }
  out << format_table(cols, rows);
  out << "hashes " << (hashes_agree() ? "agree" : "DIFFER") << "\n";
  return out.str();
}

const std::vector<std::string>& bench_modes() {
  static const std::vector<std::string> modes = {"full", "no-pushdown", "optimizer-off", "join-emulation"};
  return modes;
}

QueryOptions bench_mode_options(std::string_view mode, const QueryOptions& base) {
  QueryOptions o = base;
  if (mode == "full") {
    o.mode = ExecMode::Full;
  } else if (mode == "no-pushdown") {
    o.mode = ExecMode::Full;
    o.rules.attribute_pushdown = false;
    o.rules.join_pushdown = false;
  } else if (mode == "optimizer-off") {
    o.mode = ExecMode::OptimizerOff;
  } else if (mode == "join-emulation") {
    o.mode = ExecMode::JoinEmulation;
  } else {
    throw SchemaError("unknown bench mode '" + std::string(mode) + "'");
  }
  return o;
}

namespace {

struct Scenario {
  std::string name;
  std::string query;
};

void run_scenarios(BenchReport& report, const Database& db, const std::vector<Scenario>& scenarios,
                   const QueryOptions& base, int repetitions) {
  for (const auto& sc : scenarios) {
    const QueryAst ast = parse_query(sc.query);
    for (const auto& mode : bench_modes()) {
      const QueryOptions opt = bench_mode_options(mode, base);
      std::vector<double> times;
      QueryResult last;
      for (int rep = 0; rep < std::max(1, repetitions); ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        last = run_query(db, ast, opt);
        times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
      }
      std::sort(times.begin(), times.end());
      BenchEntry e;
      e.scenario = sc.name;
      e.mode = mode;
      e.wall_ms = times[times.size() / 2];
      e.scanned = last.counters.scanned;
      e.tid_fetches = last.counters.tid_fetches;
      e.rows = last.row_count();
      e.hash = result_hash(last);
      report.entries.push_back(std::move(e));
    }
  }
}

}  // namespace

BenchReport bench(std::string_view suite, int scale, std::uint64_t seed, const QueryOptions& base, int repetitions) {
  if (suite != "social" && suite != "commerce" && suite != "all") {
    throw SchemaError("unknown bench suite '" + std::string(suite) + "' (social, commerce, all)");
  }
  if (scale < 0) throw SchemaError("bench scale must be non-negative");
  BenchReport report;
  report.suite = std::string(suite);
  report.scale = scale;
  if (scale == 0) return report;
  if (suite == "social" || suite == "all") {
    Database db;
    fixtures::load_social(db, seed, 2000 * scale, 200 * scale, 10000 * scale);
    run_scenarios(report, db, {{"social-tag", fixtures::kSocialQuery}}, base, repetitions);
  }
  if (suite == "commerce" || suite == "all") {
    Database db;
    fixtures::CommerceScale s;
    s.persons *= scale;
    s.tags *= scale;
    s.edges *= scale;
    s.customers *= scale;
    s.products *= scale;
    s.orders *= scale;
    fixtures::load_commerce(db, seed, s);
    run_scenarios(report, db,
                  {{"yogurt", fixtures::kYogurtQuery},
                   {"food-interests",
                    "SELECT p.name AS person, t.name AS tag FROM Interests MATCH (p:Persons)-[e:Interested in]->(t:Tags) "
                    "WHERE t.category = 'food' AND e.weight > 5"},
                   {"cheap-orders",
                    "SELECT C.id AS cid, P.title AS title FROM Customers C, Orders O, Products P "
                    "WHERE O->>'customer_id' = C.id AND O->>'product_id' = P.id AND P.price < 3"}},
                  base, repetitions);
  }
  return report;
}

// ---------------------------------------------------------------- session

std::vector<std::string> split_commands(std::string_view script) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t\r\n");
    if (b != std::string::npos) {
      auto e = cur.find_last_not_of(" \t\r\n");
      out.push_back(cur.substr(b, e - b + 1));
    }
    cur.clear();
  };
  char quote = 0;
  bool dot = false;
  for (std::size_t i = 0; i < script.size(); ++i) {
    char c = script[i];
    if (cur.find_first_not_of(" \t\r\n") == std::string::npos && c == '.' && quote == 0) dot = true;
    if (dot) {
      if (c == '\n') {
        flush();
        dot = false;
      } else {
        cur += c;
      }
      continue;
    }
    if (quote) {
      cur += c;
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      cur += c;
    } else if (c == ';') {
      flush();
    } else if (c == '-' && i + 1 < script.size() && script[i + 1] == '-' && (i + 2 >= script.size() || script[i + 2] != '>')) {
      // comment to end of line
      while (i < script.size() && script[i] != '\n') ++i;
      cur += '\n';
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

Session::Session(SessionConfig config) : config_(std::move(config)), buffer_(config_.buffer_bytes) {
  config_.validate();
  db_ = config_.db_dir ? Database::open(*config_.db_dir) : std::make_unique<Database>();
}

Session::~Session() {
  try {
    if (db_ && db_->directory()) db_->flush();
  } catch (...) {
  }
}

CommandResult Session::run_command(std::string_view text) {
  try {
    return dispatch(text);
  } catch (const Error& e) {
    return {std::string("error [") + category_name(e.category()) + "]: " + e.what() + "\n", 1};
  } catch (const std::exception& e) {
    return {std::string("error [execution]: ") + e.what() + "\n", 1};
  }
}

std::string Session::format_result(const QueryResult& r) const {
  switch (config_.format) {
    case OutputFormat::Csv: return format_csv(r.columns, r.rows);
    case OutputFormat::Json: return format_json(r.columns, r.rows);
    case OutputFormat::Table: break;
  }
  return format_table(r.columns, r.rows);
}

namespace {

std::vector<std::string> words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool parse_on_off(const std::string& s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw SchemaError("expected on|off, got '" + s + "'");
}

std::vector<ColumnDef> column_list(TokenStream& ts, bool optional) {
  std::vector<ColumnDef> cols;
  if (!ts.accept_symbol("(")) {
    if (!optional) ts.fail("expected '('");
    return cols;
  }
  if (ts.accept_symbol(")")) return cols;
  do {
    std::string name = ts.expect_ident("column name");
    const Token& t = ts.peek();
    if (t.kind != Token::Kind::Ident) ts.fail("expected column type");
    auto type = parse_column_type(t.text);
    if (!type) ts.fail("unknown column type '" + t.text + "'");
    ts.next();
    cols.push_back({name, *type});
  } while (ts.accept_symbol(","));
  ts.expect_symbol(")");
  return cols;
}

void expect_end(TokenStream& ts) {
  if (!ts.at_end()) ts.fail("unexpected '" + ts.peek().text + "'");
}

std::string stats_text(Database& db) {
  std::vector<std::vector<Value>> rows;
  for (const Schema& s : db.catalog().collections()) {
    const ColumnStats& st = db.stats(s.oid);
    std::string ndv;
    for (std::size_t c = 0; c < s.columns.size() && c < st.columns.size(); ++c) {
      if (c) ndv += " ";
      ndv += s.columns[c].name + "=" + std::to_string(st.columns[c].ndv);
    }
    const Collection& coll = db.collection(s.oid);
    rows.push_back({s.name, collection_kind_name(s.kind), static_cast<std::int64_t>(coll.live_count()),
                    static_cast<std::int64_t>(coll.version()), ndv});
  }
  std::string out = format_table({"collection", "kind", "rows", "version", "distinct"}, rows);
  AccessSnapshot a = db.records().counters();
  out += "scans " + std::to_string(a.scans) + ", scanned " + std::to_string(a.scanned) + ", tid fetches " +
         std::to_string(a.tid_fetches) + "\n";
  return out;
}

}  // namespace

CommandResult Session::dispatch(std::string_view raw) {
  std::string text(raw);
  while (!text.empty() && (text.back() == ';' || std::isspace(static_cast<unsigned char>(text.back())))) text.pop_back();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  text.erase(0, first);
  Database& db = *db_;

  if (text[0] == '.') {
    auto w = words(text);
    const std::string& cmd = w[0];
    if (cmd == ".audit") {
      auto reports = db.audit_all();
      std::string out;
      bool ok = true;
      for (const auto& r : reports) {
        if (r.ok()) {
          out += "graph " + r.graph + ": consistent (" + std::to_string(r.vertices) + " vertices, " +
                 std::to_string(r.edges) + " edges)\n";
        } else {
          ok = false;
          out += "graph " + r.graph + ": INCONSISTENT\n";
          for (const auto& f : r.failures) out += "  " + f + "\n";
        }
      }
      if (reports.empty()) out = "consistent (0 graphs)\n";
      return {out, ok ? 0 : 2};
    }
    if (cmd == ".stats") return {stats_text(db), 0};
    if (cmd == ".bench") {
      if (w.size() < 2 || w.size() > 3) throw SchemaError("usage: .bench <social|commerce|all> [scale]");
      int scale = 1;
      if (w.size() == 3) {
        try {
          scale = std::stoi(w[2]);
        } catch (const std::exception&) {
          throw SchemaError("bench scale must be an integer");
        }
      }
      BenchReport r = bench(w[1], scale, config_.seed, config_.query);
      return {r.to_string(), 0};
    }
    if (cmd == ".rule") {
      if (w.size() != 3) throw SchemaError("usage: .rule <name> on|off");
      if (!config_.query.rules.set(w[1], parse_on_off(w[2]))) throw SchemaError("unknown rule '" + w[1] + "'");
      return {"rule " + w[1] + " " + w[2] + "\n", 0};
    }
    if (cmd == ".opt") {
      if (w.size() != 2) throw SchemaError("usage: .opt on|off");
      config_.query.mode = parse_on_off(w[1]) ? ExecMode::Full : ExecMode::OptimizerOff;
      return {std::string("optimizer ") + w[1] + "\n", 0};
    }
    if (cmd == ".mode") {
      if (w.size() != 2) throw SchemaError("usage: .mode full|optimizer-off|join-emulation");
      config_.query = bench_mode_options(w[1] == "off" ? "optimizer-off" : w[1], config_.query);
      return {"mode " + w[1] + "\n", 0};
    }
    if (cmd == ".format") {
      auto f = w.size() == 2 ? parse_output_format(w[1]) : std::nullopt;
      if (!f) throw SchemaError("usage: .format table|csv|json");
      config_.format = *f;
      return {"format " + w[1] + "\n", 0};
    }
    if (cmd == ".tables") {
      std::vector<std::vector<Value>> rows;
      for (const Schema& s : db.catalog().collections()) {
        std::string cols;
        for (const auto& c : s.columns) cols += (cols.empty() ? "" : ", ") + c.name + " " + column_type_name(c.type);
        rows.push_back({s.name, collection_kind_name(s.kind), s.label, cols});
      }
      return {format_table({"name", "kind", "label", "columns"}, rows), 0};
    }
    if (cmd == ".help") {
      return {"CREATE TABLE|COLLECTION|VERTEX TABLE|EDGE TABLE|GRAPH, INSERT INTO, IMPORT, EXPORT,\n"
              "SELECT, EXPLAIN, ANALYZE, .audit, .stats, .bench, .rule, .opt, .mode, .format, .tables\n",
              0};
    }
    throw SchemaError("unknown command '" + cmd + "'");
  }

  TokenStream ts(tokenize(text));
  if (ts.accept_keyword("CREATE")) {
    if (ts.accept_keyword("TABLE")) {
      std::string name = ts.expect_ident("table name");
      auto cols = column_list(ts, false);
      expect_end(ts);
      db.create_collection(Schema::relation(name, std::move(cols)));
    } else if (ts.accept_keyword("COLLECTION")) {
      std::string name = ts.expect_ident("collection name");
      expect_end(ts);
      db.create_collection(Schema::document_collection(name));
    } else if (ts.is_keyword("VERTEX") || ts.is_keyword("EDGE")) {
      bool vertex = ts.accept_keyword("VERTEX");
      if (!vertex) ts.expect_keyword("EDGE");
      ts.expect_keyword("TABLE");
      std::string name = ts.expect_ident("table name");
      std::string label = name;
      if (ts.accept_keyword("LABEL")) {
        label = ts.peek().kind == Token::Kind::String ? ts.expect_string("label") : ts.expect_ident("label");
      }
      auto cols = column_list(ts, true);
      expect_end(ts);
      db.create_collection(vertex ? Schema::vertex_table(name, label, std::move(cols))
                                  : Schema::edge_table(name, label, std::move(cols)));
    } else if (ts.accept_keyword("GRAPH")) {
      GraphDef g;
      g.name = ts.expect_ident("graph name");
      ts.expect_keyword("VERTICES");
      ts.expect_symbol("(");
      do {
        std::string v = ts.expect_ident("vertex table");
        const Schema& s = db.catalog().require(v);
        if (s.kind != CollectionKind::VertexTable) throw SchemaError("'" + v + "' is not a vertex table");
        g.vertex_oids.push_back(s.oid);
      } while (ts.accept_symbol(","));
      ts.expect_symbol(")");
      ts.expect_keyword("EDGES");
      std::string e = ts.expect_ident("edge table");
      expect_end(ts);
      const Schema& es = db.catalog().require(e);
      if (es.kind != CollectionKind::EdgeTable) throw SchemaError("'" + e + "' is not an edge table");
      g.edge_oid = es.oid;
      g.edge_label = es.label;
      db.create_graph(std::move(g));
    } else {
      ts.fail("expected TABLE, COLLECTION, VERTEX TABLE, EDGE TABLE or GRAPH");
    }
    if (db.directory()) db.flush();
    return {"ok\n", 0};
  }

  if (ts.accept_keyword("INSERT")) {
    ts.expect_keyword("INTO");
    const Schema& s = db.catalog().require(ts.expect_ident("collection name"));
    ts.expect_keyword("VALUES");
    std::vector<std::vector<Value>> rows;
    do {
      ts.expect_symbol("(");
      std::vector<Value> row;
      do {
        std::size_t col = row.size();
        Value v = parse_literal(ts);
        if (s.kind == CollectionKind::DocumentCollection && v.type() == Value::Type::Text) {
          v = parse_json_value(v.as_text());
        } else if (s.kind == CollectionKind::EdgeTable && (col == 0 || col == 2) && v.type() == Value::Type::Text) {
          // endpoint tables may be named instead of given by oid
          v = Value(static_cast<std::int64_t>(db.catalog().require(v.as_text()).oid));
        }
        row.push_back(std::move(v));
      } while (ts.accept_symbol(","));
      ts.expect_symbol(")");
      rows.push_back(std::move(row));
    } while (ts.accept_symbol(","));
    expect_end(ts);
    auto tids = db.insert(s.oid, std::move(rows));
    return {"inserted " + std::to_string(tids.size()) + "\n", 0};
  }

  if (ts.is_keyword("IMPORT") || ts.is_keyword("EXPORT")) {
    bool import = ts.accept_keyword("IMPORT");
    if (!import) ts.expect_keyword("EXPORT");
    const Schema& s = db.catalog().require(ts.expect_ident("collection name"));
    ts.expect_keyword(import ? "FROM" : "TO");
    std::string path = ts.expect_string("file path");
    expect_end(ts);
    const bool jsonl = path.ends_with(".jsonl") || path.ends_with(".json") || path.ends_with(".ndjson");
    if (import) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("cannot open '" + path + "'");
      auto rows = jsonl ? read_jsonl(in, s, path) : read_csv(in, s, path);
      auto tids = db.insert(s.oid, std::move(rows));
      return {"imported " + std::to_string(tids.size()) + "\n", 0};
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    const Collection& c = db.collection(s.oid);
    if (jsonl) {
      write_jsonl(out, c);
    } else {
      write_csv(out, c);
    }
    if (!out) throw IoError("write to '" + path + "' failed");
    return {"exported " + std::to_string(c.live_count()) + "\n", 0};
  }

  StatementAst st = parse_statement(text);
  switch (st.kind) {
    case StatementAst::Kind::Query: {
      QueryResult r = run_query(db, st.query, config_.query);
      return {format_result(r), 0};
    }
    case StatementAst::Kind::Explain: {
      PhysicalPlan p = optimize(db, build_logical_plan(st.query, db.catalog()), config_.query);
      return {explain(p), 0};
    }
    case StatementAst::Kind::ExplainAnalyze: {
      AnalysisSpec spec;
      std::vector<QueryAst> qs{st.analyze.first};
      if (st.analyze.second) qs.push_back(*st.analyze.second);
      AnalysisTask task{st.analyze.op, {}, st.analyze.options};
      for (std::size_t i = 0; i < qs.size(); ++i) {
        spec.query_fingerprints.push_back(fingerprint(build_logical_plan(qs[i], db.catalog())));
        task.inputs.push_back({TaskInput::Kind::Query, i});
      }
      spec.tasks.push_back(std::move(task));
      return {plan_pipeline(spec).to_string(), 0};
    }
    case StatementAst::Kind::Analyze: {
      AnalyticsOptions ao;
      ao.kernel.workers = config_.workers;
      ao.buffer = &buffer_;
      AnalyzeResult r = run_analyze(db, st.analyze, config_.query, ao);
      std::ostringstream out;
      out.precision(10);
      if (r.regression) {
        const auto& g = *r.regression;
        std::vector<std::vector<Value>> rows{{std::string("(intercept)"), g.weights[0]}};
        for (std::size_t i = 0; i < r.features.size(); ++i) rows.push_back({r.features[i], g.weights[i + 1]});
        if (config_.format == OutputFormat::Table) {
          out << format_table({"feature", "weight"}, rows);
          out << "loss " << g.loss << " (baseline " << r.baseline_loss << ") after " << g.iterations
              << " iterations\n";
        } else {
          out << (config_.format == OutputFormat::Csv ? format_csv({"feature", "weight"}, rows)
                                                      : format_json({"feature", "weight"}, rows));
        }
      } else {
        if (config_.format == OutputFormat::Csv) {
          out << r.matrix.to_csv();
        } else {
          std::vector<std::string> cols;
          for (std::size_t c = 0; c < r.matrix.cols(); ++c) cols.push_back("c" + std::to_string(c));
          std::vector<std::vector<Value>> rows;
          for (std::size_t i = 0; i < r.matrix.rows(); ++i) {
            auto& row = rows.emplace_back();
            for (std::size_t c = 0; c < r.matrix.cols(); ++c) row.emplace_back(r.matrix(i, c));
          }
          out << (config_.format == OutputFormat::Json ? format_json(cols, rows) : format_table(cols, rows));
        }
      }
      if (r.buffer_hits && config_.format == OutputFormat::Table) out << "inter-buffer hits " << r.buffer_hits << "\n";
      return {out.str(), 0};
    }
  }
  return {};
}

}  // namespace gredo
