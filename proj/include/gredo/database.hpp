#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gredo/record_store.hpp"
#include "gredo/schema.hpp"
#include "gredo/stats.hpp"
#include "gredo/topology.hpp"

namespace gredo {

struct AuditReport {
  std::string graph;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::vector<std::string> failures;  // one line per violated clause

  bool ok() const noexcept { return failures.empty(); }
};

/// Catalog, record storage and graph cache of one database. Vertex and edge
/// inserts/deletes go through the staged protocol that keeps every graph's
/// topology and mappers in step with the records.
class Database {
 public:
  Database() = default;
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  /// Opens (creating if needed) a directory-backed database: catalog.json,
  /// one mutation log per collection, topology files per graph.
  static std::unique_ptr<Database> open(const std::filesystem::path& dir);

  const Catalog& catalog() const noexcept { return catalog_; }
  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

  const Schema& create_collection(Schema schema);
  /// Builds the topology from the records already present.
  const GraphDef& create_graph(GraphDef graph);

  Collection& collection(Oid oid) { return records_.get(oid); }
  const Collection& collection(Oid oid) const { return records_.get(oid); }
  Collection& collection(std::string_view name) { return records_.get(catalog_.require(name).oid); }
  const Collection& collection(std::string_view name) const { return records_.get(catalog_.require(name).oid); }
  const RecordStore& records() const noexcept { return records_; }
  RecordStore& records() noexcept { return records_; }

  /// Dispatches to insert_vertices / insert_edges for graph tables.
  std::vector<Tid> insert(Oid oid, std::vector<std::vector<Value>> rows);
  /// Key columns of vertex and edge records are immutable; topology is untouched.
  void update(Oid oid, Tid tid, std::vector<Value> values);
  /// Vertex deletion cascades to incident edges.
  void erase(Oid oid, Tid tid);

  std::vector<Tid> insert_vertices(Oid table, std::vector<std::vector<Value>> rows);
  std::vector<Tid> insert_edges(Oid table, std::vector<std::vector<Value>> rows);
  void delete_vertex(VertexKey key);
  void delete_edge(const EdgeKey& key);

  std::optional<Tid> find_vertex(VertexKey key) const;
  std::optional<Tid> find_edge(const EdgeKey& key) const;

  /// Graph cache: deserialized on first use, patched by mutations.
  const GraphTopology& topology(std::string_view graph) const;
  bool topology_loaded(std::string_view graph) const;

  AuditReport audit(std::string_view graph) const;
  std::vector<AuditReport> audit_all() const;

  /// Cached per-collection statistics, recomputed when the collection changed.
  const ColumnStats& stats(Oid oid) const;

  /// Writes catalog.json and every loaded topology.
  void flush() const;

  std::shared_lock<std::shared_mutex> read_claim() const { return std::shared_lock(mu_); }

 private:
  GraphTopology& topology_mut(const GraphDef& g) const;
  GraphTopology build_topology(const GraphDef& g) const;
  std::optional<GraphTopology> load_topology(const GraphDef& g) const;
  void write_topology(const GraphDef& g, const GraphTopology& t) const;
  void index_collection(const Schema& schema);
  std::vector<Tid> insert_vertices_locked(Oid table, std::vector<std::vector<Value>> rows);
  std::vector<Tid> insert_edges_locked(Oid table, std::vector<std::vector<Value>> rows);
  void delete_vertex_locked(VertexKey key);
  void delete_edge_locked(const EdgeKey& key);

  Catalog catalog_;
  RecordStore records_;
  std::optional<std::filesystem::path> dir_;
  std::map<VertexKey, Tid> vertex_index_;
  std::map<EdgeKey, Tid> edge_index_;
  mutable std::map<std::string, std::unique_ptr<GraphTopology>, std::less<>> cache_;
  mutable std::map<Oid, std::pair<std::uint64_t, ColumnStats>> stats_;
  mutable std::shared_mutex mu_;
  mutable std::mutex cache_mu_;
};

}  // namespace gredo
