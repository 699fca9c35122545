#include "gredo/topology.hpp"

#include <algorithm>
#include <cstring>

#include "gredo/error.hpp"

namespace gredo {

void AdjacencyGraph::add_edge(Nid source, Nid target) {
  if (source >= adj_.size() || target >= adj_.size()) {
    throw ContractError("edge (" + std::to_string(source) + ", " + std::to_string(target) + ") outside node range");
  }
  adj_[source].push_back(target);
  ++edges_;
}

bool AdjacencyGraph::remove_edge(Nid source, Nid target) {
  if (source >= adj_.size()) return false;
  auto& list = adj_[source];
  auto it = std::find(list.begin(), list.end(), target);
  if (it == list.end()) return false;
  list.erase(it);
  --edges_;
  return true;
}

const std::vector<Nid>& AdjacencyGraph::neighbors(Nid nid) const {
  if (nid >= adj_.size()) throw ContractError("nid " + std::to_string(nid) + " out of range");
  return adj_[nid];
}

AdjacencyGraph AdjacencyGraph::transposed() const {
  AdjacencyGraph t(opposite(direction_), adj_.size());
  for (Nid s = 0; s < adj_.size(); ++s) {
    for (Nid n : adj_[s]) t.add_edge(n, s);
  }
  return t;
}

namespace {

constexpr char kMagic[4] = {'G', 'R', 'D', 'O'};
constexpr std::size_t kHeaderSize = 4 + 4 + 1 + 8 + 8;
constexpr std::size_t kEntrySize = 8 + 8 + 4 + 8;

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  template <class T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("truncated topology image");
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const AdjacencyGraph& graph, std::vector<EdgeMapEntry> edge_map) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 8 * (graph.node_count() + 1 + graph.edge_count()) + kEntrySize * edge_map.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  Writer w(out);
  w.put<std::uint32_t>(kTopologyFormatVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(graph.direction()));
  w.put<std::uint64_t>(graph.node_count());
  w.put<std::uint64_t>(graph.edge_count());
  std::uint64_t offset = 0;
  w.put<std::uint64_t>(0);
  for (Nid n = 0; n < graph.node_count(); ++n) {
    offset += graph.neighbors(n).size();
    w.put<std::uint64_t>(offset);
  }
  for (Nid n = 0; n < graph.node_count(); ++n) {
    for (Nid t : graph.neighbors(n)) w.put<std::uint64_t>(t);
  }
  std::sort(edge_map.begin(), edge_map.end());
  for (const auto& e : edge_map) {
    w.put<std::uint64_t>(e.source);
    w.put<std::uint64_t>(e.target);
    w.put<std::uint32_t>(e.loc.oid);
    w.put<std::uint64_t>(e.loc.tid);
  }
  return out;
}

TopologyImage deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("truncated topology header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad topology magic");
  Reader r(bytes.subspan(4));
  auto version = r.get<std::uint32_t>();
  if (version != kTopologyFormatVersion) throw FormatError("unsupported topology version " + std::to_string(version));
  auto dir = r.get<std::uint8_t>();
  if (dir > 1) throw FormatError("bad direction byte");
  auto nodes = r.get<std::uint64_t>();
  auto edges = r.get<std::uint64_t>();
  // size check before any allocation
  if (nodes >= r.remaining() / 8 || edges > r.remaining() / 8 ||
      r.remaining() != 8 * (nodes + 1) + 8 * edges + kEntrySize * edges) {
    throw FormatError("topology image size does not match its header");
  }
  std::vector<std::uint64_t> offsets(nodes + 1);
  for (auto& o : offsets) o = r.get<std::uint64_t>();
  if (offsets.front() != 0 || offsets.back() != edges) throw FormatError("bad offsets array");
  TopologyImage img{AdjacencyGraph(static_cast<Direction>(dir), nodes), {}};
  for (Nid n = 0; n < nodes; ++n) {
    if (offsets[n + 1] < offsets[n]) throw FormatError("offsets not monotone");
    for (auto k = offsets[n]; k < offsets[n + 1]; ++k) {
      auto t = r.get<std::uint64_t>();
      if (t >= nodes) throw FormatError("target nid out of range");
      img.graph.add_edge(n, t);
    }
  }
  img.edge_map.reserve(edges);
  for (std::uint64_t i = 0; i < edges; ++i) {
    EdgeMapEntry e;
    e.source = r.get<std::uint64_t>();
    e.target = r.get<std::uint64_t>();
    e.loc.oid = r.get<std::uint32_t>();
    e.loc.tid = r.get<std::uint64_t>();
    img.edge_map.push_back(e);
  }
  return img;
}

Nid GraphTopology::nid_of(VertexKey key) const {
  auto it = nid_map_.find(key);
  if (it == nid_map_.end()) {
    throw NotFoundError("no vertex (" + std::to_string(key.oid) + ", " + std::to_string(key.vid) + ")");
  }
  return it->second;
}

std::optional<Nid> GraphTopology::find_nid(VertexKey key) const {
  auto it = nid_map_.find(key);
  if (it == nid_map_.end()) return std::nullopt;
  return it->second;
}

RecordLoc GraphTopology::vertex_of(Nid nid) const {
  if (!is_live(nid)) throw NotFoundError("no live vertex at nid " + std::to_string(nid));
  return *vertex_map_[nid];
}

std::int64_t GraphTopology::vid_of(Nid nid) const {
  if (!is_live(nid)) throw NotFoundError("no live vertex at nid " + std::to_string(nid));
  return vids_[nid];
}

RecordLoc GraphTopology::edge_of(Nid source, Nid target) const {
  auto loc = find_edge(source, target);
  if (!loc) throw NotFoundError("no edge (" + std::to_string(source) + ", " + std::to_string(target) + ")");
  return *loc;
}

std::optional<RecordLoc> GraphTopology::find_edge(Nid source, Nid target) const {
  auto it = edge_map_.find({source, target});
  if (it == edge_map_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t GraphTopology::live_vertices_of(Oid oid) const {
  auto it = vertices_per_oid_.find(oid);
  return it == vertices_per_oid_.end() ? 0 : it->second;
}

std::uint64_t GraphTopology::edges_ending_in(Oid oid, Direction d) const {
  const auto& m = d == Direction::Forward ? source_oids_ : target_oids_;
  auto it = m.find(oid);
  return it == m.end() ? 0 : it->second;
}

Nid GraphTopology::add_vertex(VertexKey key, Tid tid) {
  if (nid_map_.count(key)) {
    throw ExecutionError("duplicate vertex (" + std::to_string(key.oid) + ", " + std::to_string(key.vid) + ")");
  }
  Nid nid = forward_.add_node();
  reverse_.add_node();
  vertex_map_.push_back(RecordLoc{key.oid, tid});
  vids_.push_back(key.vid);
  nid_map_.emplace(key, nid);
  ++vertices_per_oid_[key.oid];
  ++version_;
  return nid;
}

void GraphTopology::add_edge(Nid source, Nid target, RecordLoc loc) {
  if (!is_live(source) || !is_live(target)) throw ExecutionError("edge endpoint is not a live vertex");
  if (!edge_map_.emplace(std::pair{source, target}, loc).second) {
    throw ExecutionError("duplicate edge between nids " + std::to_string(source) + " and " + std::to_string(target));
  }
  forward_.add_edge(source, target);
  reverse_.add_edge(target, source);
  ++source_oids_[vertex_map_[source]->oid];
  ++target_oids_[vertex_map_[target]->oid];
  ++version_;
}

void GraphTopology::remove_edge(Nid source, Nid target) {
  auto it = edge_map_.find({source, target});
  if (it == edge_map_.end()) throw NotFoundError("no edge (" + std::to_string(source) + ", " + std::to_string(target) + ")");
  if (!forward_.remove_edge(source, target) || !reverse_.remove_edge(target, source)) {
    throw ConsistencyError("edgeMap entry without adjacency");
  }
  edge_map_.erase(it);
  --source_oids_[vertex_map_[source]->oid];
  --target_oids_[vertex_map_[target]->oid];
  ++version_;
}

void GraphTopology::retire_vertex(Nid nid) {
  if (!is_live(nid)) throw NotFoundError("no live vertex at nid " + std::to_string(nid));
  if (!forward_.neighbors(nid).empty() || !reverse_.neighbors(nid).empty()) {
    throw ContractError("vertex still has incident edges");
  }
  Oid oid = vertex_map_[nid]->oid;
  nid_map_.erase(VertexKey{oid, vids_[nid]});
  vertex_map_[nid].reset();
  --vertices_per_oid_[oid];
  ++version_;
}

std::vector<EdgeMapEntry> GraphTopology::edge_map_entries(Direction d) const {
  std::vector<EdgeMapEntry> out;
  out.reserve(edge_map_.size());
  for (const auto& [pair, loc] : edge_map_) {
    if (d == Direction::Forward) {
      out.push_back({pair.first, pair.second, loc});
    } else {
      out.push_back({pair.second, pair.first, loc});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

std::uint64_t GraphTopology::checksum() const {
  std::uint64_t h = mix(vertex_map_.size() + 1);
  for (Nid n = 0; n < vertex_map_.size(); ++n) {
    if (vertex_map_[n]) h += mix(mix(n) ^ mix(vertex_map_[n]->oid + 7) ^ mix(vertex_map_[n]->tid + 13) ^ mix(vids_[n]));
    std::uint64_t pos = 0;
    for (Nid t : forward_.neighbors(n)) h += mix(mix(n * 31 + 1) ^ mix(t + 17) ^ mix(++pos));
    pos = 0;
    for (Nid s : reverse_.neighbors(n)) h += mix(mix(n * 37 + 3) ^ mix(s + 19) ^ mix(++pos));
  }
  for (const auto& [pair, loc] : edge_map_) {
    h += mix(mix(pair.first + 23) ^ mix(pair.second + 29) ^ mix(loc.oid + 31) ^ mix(loc.tid + 37));
  }
  return h;
}

std::vector<std::uint8_t> GraphTopology::serialize_vertices() const {
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.put<std::uint64_t>(vertex_map_.size());
  for (Nid n = 0; n < vertex_map_.size(); ++n) {
    w.put<std::uint8_t>(vertex_map_[n] ? 1 : 0);
    w.put<std::uint32_t>(vertex_map_[n] ? vertex_map_[n]->oid : 0);
    w.put<std::uint64_t>(vertex_map_[n] ? vertex_map_[n]->tid : 0);
    w.put<std::int64_t>(vids_[n]);
  }
  return out;
}

GraphTopology GraphTopology::from_images(TopologyImage fwd, TopologyImage rev, std::span<const std::uint8_t> vertices) {
  if (fwd.graph.direction() != Direction::Forward || rev.graph.direction() != Direction::Reverse) {
    throw FormatError("topology images have the wrong direction");
  }
  if (fwd.graph.node_count() != rev.graph.node_count() || fwd.graph.edge_count() != rev.graph.edge_count()) {
    throw FormatError("forward and reverse topology disagree in size");
  }
  GraphTopology g;
  Reader r(vertices);
  auto slots = r.get<std::uint64_t>();
  if (slots != fwd.graph.node_count() || r.remaining() != slots * 21) throw FormatError("vertex map size mismatch");
  for (Nid n = 0; n < slots; ++n) {
    bool live = r.get<std::uint8_t>() != 0;
    auto oid = r.get<std::uint32_t>();
    auto tid = r.get<std::uint64_t>();
    auto vid = r.get<std::int64_t>();
    g.vids_.push_back(vid);
    if (live) {
      g.vertex_map_.push_back(RecordLoc{oid, tid});
      g.nid_map_.emplace(VertexKey{oid, vid}, n);
      ++g.vertices_per_oid_[oid];
    } else {
      g.vertex_map_.emplace_back();
    }
  }
  g.forward_ = std::move(fwd.graph);
  g.reverse_ = std::move(rev.graph);
  for (const auto& e : fwd.edge_map) {
    if (!g.is_live(e.source) || !g.is_live(e.target)) throw FormatError("edgeMap references a retired nid");
    g.edge_map_.emplace(std::pair{e.source, e.target}, e.loc);
    ++g.source_oids_[g.vertex_map_[e.source]->oid];
    ++g.target_oids_[g.vertex_map_[e.target]->oid];
  }
  return g;
}

}  // namespace gredo
