#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gredo/value.hpp"

namespace gredo {

using Oid = std::uint32_t;
using Tid = std::uint64_t;
using Nid = std::uint64_t;

enum class ColumnType { Int, Float, Text, Bool, Document, Array };
enum class CollectionKind { Relation, DocumentCollection, VertexTable, EdgeTable };

const char* column_type_name(ColumnType t);
std::optional<ColumnType> parse_column_type(std::string_view name);
const char* collection_kind_name(CollectionKind k);

struct ColumnDef {
  std::string name;
  ColumnType type = ColumnType::Text;

  bool operator==(const ColumnDef&) const = default;
};

/// Column layout conventions:
///   VertexTable:        [vid, props...]
///   EdgeTable:          [soid, svid, toid, tvid, props...]
///   DocumentCollection: [doc]
struct Schema {
  std::string name;
  Oid oid = 0;
  CollectionKind kind = CollectionKind::Relation;
  std::vector<ColumnDef> columns;
  std::string label;

  std::size_t arity() const noexcept { return columns.size(); }
  std::optional<std::size_t> column_index(std::string_view column) const;
  /// Index of the first column holding documents, used to resolve `var->>'k'`
  /// and property names not declared as columns.
  std::optional<std::size_t> document_column() const;

  /// Number of reserved key columns at the front (1 for vertices, 4 for edges).
  std::size_t key_columns() const noexcept;

  static Schema relation(std::string name, std::vector<ColumnDef> columns);
  static Schema document_collection(std::string name);
  static Schema vertex_table(std::string name, std::string label, std::vector<ColumnDef> props);
  static Schema edge_table(std::string name, std::string label, std::vector<ColumnDef> props);

  bool operator==(const Schema&) const = default;
};

/// NF2 record. `values` is aligned to the owning collection's schema.
struct Record {
  Tid tid = 0;
  std::vector<Value> values;

  bool operator==(const Record&) const = default;
};

struct VertexKey {
  Oid oid = 0;
  std::int64_t vid = 0;

  auto operator<=>(const VertexKey&) const = default;
};

struct EdgeKey {
  Oid oid = 0;
  Oid soid = 0;
  std::int64_t svid = 0;
  Oid toid = 0;
  std::int64_t tvid = 0;

  auto operator<=>(const EdgeKey&) const = default;
  VertexKey source() const { return {soid, svid}; }
  VertexKey target() const { return {toid, tvid}; }
};

/// Throws SchemaError unless `schema` is a vertex table.
VertexKey get_vertex_key(const Record& v, const Schema& schema);
/// Throws SchemaError unless `schema` is an edge table.
EdgeKey get_edge_key(const Record& e, const Schema& schema);

/// Validates arity and declared types; Int widens to Float for Float columns.
/// Null is accepted everywhere except key columns.
std::vector<Value> conform_to_schema(std::vector<Value> values, const Schema& schema);

struct GraphDef {
  std::string name;
  std::vector<Oid> vertex_oids;
  Oid edge_oid = 0;
  std::string edge_label;

  bool operator==(const GraphDef&) const = default;
};

/// Schemas and graph definitions, persisted as catalog.json.
class Catalog {
 public:
  /// Assigns the next oid; throws SchemaError on duplicate names.
  const Schema& add_collection(Schema schema);
  const GraphDef& add_graph(GraphDef graph);

  const Schema* find(std::string_view name) const;
  const Schema& get(Oid oid) const;
  const Schema& require(std::string_view name) const;
  const std::deque<Schema>& collections() const noexcept { return collections_; }

  const GraphDef* find_graph(std::string_view name) const;
  const GraphDef& require_graph(std::string_view name) const;
  const std::deque<GraphDef>& graphs() const noexcept { return graphs_; }
  std::vector<const GraphDef*> graphs_containing(Oid oid) const;

  /// Vertex table of `graph` whose label (or name) is `label`.
  const Schema* vertex_table_for_label(const GraphDef& graph, std::string_view label) const;
  bool edge_label_matches(const GraphDef& graph, std::string_view label) const;

  std::string to_json_text() const;
  static Catalog from_json_text(std::string_view text);

  bool operator==(const Catalog&) const = default;

 private:
  // deques keep references handed out by add_* stable
  std::deque<Schema> collections_;
  std::deque<GraphDef> graphs_;
  Oid next_oid_ = 0;
};

}  // namespace gredo

template <>
struct std::hash<gredo::VertexKey> {
  std::size_t operator()(const gredo::VertexKey& k) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(k.oid) << 48) ^
                                      static_cast<std::uint64_t>(k.vid) * 0x9e3779b97f4a7c15ULL);
  }
};
