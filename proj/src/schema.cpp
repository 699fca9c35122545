#include "gredo/schema.hpp"

#include <algorithm>

#include "gredo/error.hpp"
#include "gredo/json_io.hpp"

namespace gredo {

const char* column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Int: return "INT";
    case ColumnType::Float: return "FLOAT";
    case ColumnType::Text: return "TEXT";
    case ColumnType::Bool: return "BOOL";
    case ColumnType::Document: return "DOCUMENT";
    case ColumnType::Array: return "ARRAY";
  }
  return "TEXT";
}

std::optional<ColumnType> parse_column_type(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "INT" || up == "INTEGER" || up == "BIGINT") return ColumnType::Int;
  if (up == "FLOAT" || up == "DOUBLE" || up == "REAL") return ColumnType::Float;
  if (up == "TEXT" || up == "STRING" || up == "VARCHAR") return ColumnType::Text;
  if (up == "BOOL" || up == "BOOLEAN") return ColumnType::Bool;
  if (up == "DOCUMENT" || up == "JSON" || up == "JSONB") return ColumnType::Document;
  if (up == "ARRAY") return ColumnType::Array;
  return std::nullopt;
}

const char* collection_kind_name(CollectionKind k) {
  switch (k) {
    case CollectionKind::Relation: return "Relation";
    case CollectionKind::DocumentCollection: return "DocumentCollection";
    case CollectionKind::VertexTable: return "VertexTable";
    case CollectionKind::EdgeTable: return "EdgeTable";
  }
  return "Relation";
}

namespace {

CollectionKind parse_kind(const std::string& s) {
  if (s == "Relation") return CollectionKind::Relation;
  if (s == "DocumentCollection") return CollectionKind::DocumentCollection;
  if (s == "VertexTable") return CollectionKind::VertexTable;
  if (s == "EdgeTable") return CollectionKind::EdgeTable;
  throw SchemaError("unknown collection kind '" + s + "'");
}

}  // namespace

std::optional<std::size_t> Schema::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::document_column() const {
  if (auto props = column_index("props"); props && columns[*props].type == ColumnType::Document) return props;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].type == ColumnType::Document) return i;
  }
  return std::nullopt;
}

std::size_t Schema::key_columns() const noexcept {
  switch (kind) {
    case CollectionKind::VertexTable: return 1;
    case CollectionKind::EdgeTable: return 4;
    default: return 0;
  }
}

Schema Schema::relation(std::string name, std::vector<ColumnDef> columns) {
  Schema s;
  s.name = std::move(name);
  s.kind = CollectionKind::Relation;
  s.columns = std::move(columns);
  return s;
}

Schema Schema::document_collection(std::string name) {
  Schema s;
  s.name = std::move(name);
  s.kind = CollectionKind::DocumentCollection;
  s.columns = {{"doc", ColumnType::Document}};
  return s;
}

Schema Schema::vertex_table(std::string name, std::string label, std::vector<ColumnDef> props) {
  Schema s;
  s.name = std::move(name);
  s.kind = CollectionKind::VertexTable;
  s.label = std::move(label);
  s.columns = {{"vid", ColumnType::Int}};
  for (auto& c : props) s.columns.push_back(std::move(c));
  return s;
}

Schema Schema::edge_table(std::string name, std::string label, std::vector<ColumnDef> props) {
  Schema s;
  s.name = std::move(name);
  s.kind = CollectionKind::EdgeTable;
  s.label = std::move(label);
  s.columns = {{"soid", ColumnType::Int}, {"svid", ColumnType::Int}, {"toid", ColumnType::Int}, {"tvid", ColumnType::Int}};
  for (auto& c : props) s.columns.push_back(std::move(c));
  return s;
}

namespace {

std::int64_t key_int(const Record& r, std::size_t i, const Schema& schema) {
  if (i >= r.values.size() || r.values[i].type() != Value::Type::Int) {
    throw SchemaError("record " + std::to_string(r.tid) + " in '" + schema.name + "' has no integer key column " +
                      schema.columns.at(i).name);
  }
  return r.values[i].as_int();
}

}  // namespace

VertexKey get_vertex_key(const Record& v, const Schema& schema) {
  if (schema.kind != CollectionKind::VertexTable) {
    throw SchemaError("'" + schema.name + "' is a " + collection_kind_name(schema.kind) + ", not a vertex table");
  }
  return {schema.oid, key_int(v, 0, schema)};
}

EdgeKey get_edge_key(const Record& e, const Schema& schema) {
  if (schema.kind != CollectionKind::EdgeTable) {
    throw SchemaError("'" + schema.name + "' is a " + collection_kind_name(schema.kind) + ", not an edge table");
  }
  return {schema.oid, static_cast<Oid>(key_int(e, 0, schema)), key_int(e, 1, schema),
          static_cast<Oid>(key_int(e, 2, schema)), key_int(e, 3, schema)};
}

std::vector<Value> conform_to_schema(std::vector<Value> values, const Schema& schema) {
  if (values.size() != schema.arity()) {
    throw SchemaError("'" + schema.name + "' expects " + std::to_string(schema.arity()) + " values, got " +
                      std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    Value& v = values[i];
    const ColumnDef& col = schema.columns[i];
    if (v.is_null()) {
      if (i < schema.key_columns()) throw SchemaError("key column '" + col.name + "' cannot be null");
      continue;
    }
    bool ok = false;
    switch (col.type) {
      case ColumnType::Int: ok = v.type() == Value::Type::Int; break;
      case ColumnType::Float:
        if (v.type() == Value::Type::Int) v = Value(static_cast<double>(v.as_int()));
        ok = v.type() == Value::Type::Float;
        break;
      case ColumnType::Text: ok = v.type() == Value::Type::Text; break;
      case ColumnType::Bool: ok = v.type() == Value::Type::Bool; break;
      case ColumnType::Document: ok = v.type() == Value::Type::Document; break;
      case ColumnType::Array: ok = v.type() == Value::Type::Array; break;
    }
    if (!ok) {
      throw SchemaError("column '" + col.name + "' of '" + schema.name + "' expects " + column_type_name(col.type) +
                        ", got " + type_name(v.type()));
    }
  }
  return values;
}

const Schema& Catalog::add_collection(Schema schema) {
  if (find(schema.name) != nullptr || find_graph(schema.name) != nullptr) {
    throw SchemaError("name '" + schema.name + "' already exists");
  }
  schema.oid = next_oid_++;
  collections_.push_back(std::move(schema));
  return collections_.back();
}

const GraphDef& Catalog::add_graph(GraphDef graph) {
  if (find(graph.name) != nullptr || find_graph(graph.name) != nullptr) {
    throw SchemaError("name '" + graph.name + "' already exists");
  }
  const Schema& edges = get(graph.edge_oid);
  if (edges.kind != CollectionKind::EdgeTable) throw SchemaError("'" + edges.name + "' is not an edge table");
  for (Oid oid : graph.vertex_oids) {
    if (get(oid).kind != CollectionKind::VertexTable) throw SchemaError("'" + get(oid).name + "' is not a vertex table");
  }
  if (graph.edge_label.empty()) graph.edge_label = edges.label;
  graphs_.push_back(std::move(graph));
  return graphs_.back();
}

const Schema* Catalog::find(std::string_view name) const {
  for (const auto& s : collections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Schema& Catalog::get(Oid oid) const {
  for (const auto& s : collections_) {
    if (s.oid == oid) return s;
  }
  throw SchemaError("unknown collection oid " + std::to_string(oid));
}

const Schema& Catalog::require(std::string_view name) const {
  if (const Schema* s = find(name)) return *s;
  throw SchemaError("unknown collection '" + std::string(name) + "'");
}

const GraphDef* Catalog::find_graph(std::string_view name) const {
  for (const auto& g : graphs_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const GraphDef& Catalog::require_graph(std::string_view name) const {
  if (const GraphDef* g = find_graph(name)) return *g;
  throw SchemaError("unknown graph '" + std::string(name) + "'");
}

std::vector<const GraphDef*> Catalog::graphs_containing(Oid oid) const {
  std::vector<const GraphDef*> out;
  for (const auto& g : graphs_) {
    if (g.edge_oid == oid || std::find(g.vertex_oids.begin(), g.vertex_oids.end(), oid) != g.vertex_oids.end()) {
      out.push_back(&g);
    }
  }
  return out;
}

const Schema* Catalog::vertex_table_for_label(const GraphDef& graph, std::string_view label) const {
  for (Oid oid : graph.vertex_oids) {
    const Schema& s = get(oid);
    if (s.label == label || s.name == label) return &s;
  }
  return nullptr;
}

bool Catalog::edge_label_matches(const GraphDef& graph, std::string_view label) const {
  return graph.edge_label == label || get(graph.edge_oid).name == label;
}

std::string Catalog::to_json_text() const {
  Json root = Json::object();
  root["next_oid"] = next_oid_;
  Json cols = Json::array();
  for (const auto& s : collections_) {
    Json j = Json::object();
    j["name"] = s.name;
    j["oid"] = s.oid;
    j["kind"] = collection_kind_name(s.kind);
    j["label"] = s.label;
    Json cj = Json::array();
    for (const auto& c : s.columns) cj.push_back(Json{{"name", c.name}, {"type", column_type_name(c.type)}});
    j["columns"] = cj;
    cols.push_back(j);
  }
  root["collections"] = cols;
  Json graphs = Json::array();
  for (const auto& g : graphs_) {
    Json j = Json::object();
    j["name"] = g.name;
    j["vertex_oids"] = g.vertex_oids;
    j["edge_oid"] = g.edge_oid;
    j["edge_label"] = g.edge_label;
    j["topology"] = Json{{"forward", g.name + ".fwd.topo"}, {"reverse", g.name + ".rev.topo"}};
    graphs.push_back(j);
  }
  root["graphs"] = graphs;
  return root.dump(2);
}

Catalog Catalog::from_json_text(std::string_view text) {
  Catalog cat;
  try {
    Json root = Json::parse(text);
    cat.next_oid_ = root.at("next_oid").get<Oid>();
    for (const auto& j : root.at("collections")) {
      Schema s;
      s.name = j.at("name").get<std::string>();
      s.oid = j.at("oid").get<Oid>();
      s.kind = parse_kind(j.at("kind").get<std::string>());
      s.label = j.value("label", "");
      for (const auto& c : j.at("columns")) {
        auto t = parse_column_type(c.at("type").get<std::string>());
        if (!t) throw SchemaError("unknown column type in catalog");
        s.columns.push_back({c.at("name").get<std::string>(), *t});
      }
      cat.collections_.push_back(std::move(s));
    }
    for (const auto& j : root.at("graphs")) {
      GraphDef g;
      g.name = j.at("name").get<std::string>();
      g.vertex_oids = j.at("vertex_oids").get<std::vector<Oid>>();
      g.edge_oid = j.at("edge_oid").get<Oid>();
      g.edge_label = j.at("edge_label").get<std::string>();
      cat.graphs_.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed catalog: ") + e.what());
  }
  return cat;
}

}  // namespace gredo
