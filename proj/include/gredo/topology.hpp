#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gredo/schema.hpp"

namespace gredo {

enum class Direction : std::uint8_t { Forward = 0, Reverse = 1 };

inline Direction opposite(Direction d) { return d == Direction::Forward ? Direction::Reverse : Direction::Forward; }
inline const char* direction_name(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

/// List-based topology over dense nids 0..node_count()-1. Each source keeps its
/// targets in insertion order.
class AdjacencyGraph {
 public:
  explicit AdjacencyGraph(Direction direction = Direction::Forward, std::size_t nodes = 0)
      : direction_(direction), adj_(nodes) {}

  Direction direction() const noexcept { return direction_; }
  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }

  Nid add_node() {
    adj_.emplace_back();
    return adj_.size() - 1;
  }
  void add_edge(Nid source, Nid target);
  /// Removes the first (source, target) entry; false when absent.
  bool remove_edge(Nid source, Nid target);
  /// Empty for sinks; ContractError when nid is out of range.
  const std::vector<Nid>& neighbors(Nid nid) const;

  AdjacencyGraph transposed() const;

  bool operator==(const AdjacencyGraph&) const = default;

 private:
  Direction direction_;
  std::vector<std::vector<Nid>> adj_;
  std::size_t edges_ = 0;
};

struct RecordLoc {
  Oid oid = 0;
  Tid tid = 0;

  auto operator<=>(const RecordLoc&) const = default;
};

struct EdgeMapEntry {
  Nid source = 0;
  Nid target = 0;
  RecordLoc loc;

  auto operator<=>(const EdgeMapEntry&) const = default;
};

inline constexpr std::uint32_t kTopologyFormatVersion = 1;

/// Little-endian CSR image: magic, version, direction, |V|, |E|, offsets,
/// targets, then one edgeMap entry per adjacency entry.
std::vector<std::uint8_t> serialize(const AdjacencyGraph& graph, std::vector<EdgeMapEntry> edge_map);

struct TopologyImage {
  AdjacencyGraph graph;
  std::vector<EdgeMapEntry> edge_map;
};

/// Throws FormatError on bad magic, unknown version, truncation or inconsistent sizes.
TopologyImage deserialize(std::span<const std::uint8_t> bytes);

struct NidPairHash {
  std::size_t operator()(const std::pair<Nid, Nid>& p) const noexcept {
    return std::hash<std::uint64_t>{}(p.first * 0x9e3779b97f4a7c15ULL ^ (p.second + 0x7f4a7c159e3779b9ULL));
  }
};

/// Topology of one graph: both adjacency directions plus the three mappers.
/// Retired nids (deleted vertices) keep their slot with no adjacency and no
/// vertexMap entry.
class GraphTopology {
 public:
  GraphTopology() : forward_(Direction::Forward), reverse_(Direction::Reverse) {}

  Nid nid_of(VertexKey key) const;
  std::optional<Nid> find_nid(VertexKey key) const;
  RecordLoc vertex_of(Nid nid) const;
  /// Vertex id stored alongside vertexMap so nidMap can be rebuilt without record fetches.
  std::int64_t vid_of(Nid nid) const;
  RecordLoc edge_of(Nid source, Nid target) const;
  std::optional<RecordLoc> find_edge(Nid source, Nid target) const;
  bool is_live(Nid nid) const { return nid < vertex_map_.size() && vertex_map_[nid].has_value(); }

  const std::vector<Nid>& neighbors(Nid nid, Direction d) const {
    return d == Direction::Forward ? forward_.neighbors(nid) : reverse_.neighbors(nid);
  }
  const AdjacencyGraph& adjacency(Direction d) const { return d == Direction::Forward ? forward_ : reverse_; }

  std::size_t node_slots() const noexcept { return vertex_map_.size(); }
  std::size_t live_vertices() const noexcept { return nid_map_.size(); }
  std::size_t edge_count() const noexcept { return forward_.edge_count(); }
  std::uint64_t live_vertices_of(Oid oid) const;
  /// Number of edges whose source (Forward) or target (Reverse) vertex lives in `oid`.
  std::uint64_t edges_ending_in(Oid oid, Direction d) const;

  Nid add_vertex(VertexKey key, Tid tid);
  void add_edge(Nid source, Nid target, RecordLoc loc);
  /// Removes adjacency in both directions first, then the edgeMap entry.
  void remove_edge(Nid source, Nid target);
  /// Callers must remove incident edges first.
  void retire_vertex(Nid nid);

  const std::unordered_map<VertexKey, Nid>& nid_map() const noexcept { return nid_map_; }
  const std::vector<std::optional<RecordLoc>>& vertex_map() const noexcept { return vertex_map_; }
  const std::unordered_map<std::pair<Nid, Nid>, RecordLoc, NidPairHash>& edge_map() const noexcept {
    return edge_map_;
  }
  std::vector<EdgeMapEntry> edge_map_entries(Direction d) const;

  /// Order-insensitive digest of adjacency and mappers.
  std::uint64_t checksum() const;
  std::uint64_t version() const noexcept { return version_; }

  /// Topology files plus a sidecar holding vertexMap (oid, tid, vid per nid).
  std::vector<std::uint8_t> serialize_vertices() const;
  static GraphTopology from_images(TopologyImage fwd, TopologyImage rev, std::span<const std::uint8_t> vertices);

 private:
  AdjacencyGraph forward_;
  AdjacencyGraph reverse_;
  std::unordered_map<VertexKey, Nid> nid_map_;
  std::vector<std::optional<RecordLoc>> vertex_map_;
  std::vector<std::int64_t> vids_;
  std::unordered_map<std::pair<Nid, Nid>, RecordLoc, NidPairHash> edge_map_;
  std::map<Oid, std::uint64_t> vertices_per_oid_;
  std::map<Oid, std::uint64_t> source_oids_;
  std::map<Oid, std::uint64_t> target_oids_;
  std::uint64_t version_ = 0;
};

}  // namespace gredo
