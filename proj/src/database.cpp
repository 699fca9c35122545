#include "gredo/database.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "gredo/error.hpp"

namespace gredo {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  fs::rename(tmp, p);
}

fs::path log_path(const fs::path& dir, const Schema& s) { return dir / (s.name + ".log"); }

}  // namespace

std::unique_ptr<Database> Database::open(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create database directory " + dir.string());
  auto db = std::make_unique<Database>();
  db->dir_ = dir;
  fs::path cat = dir / "catalog.json";
  if (fs::exists(cat)) {
    std::ifstream in(cat);
    std::stringstream ss;
    ss << in.rdbuf();
    db->catalog_ = Catalog::from_json_text(ss.str());
    for (const auto& s : db->catalog_.collections()) {
      Collection& c = db->records_.create(s);
      c.replay_log(log_path(dir, s));
      c.attach_log(log_path(dir, s));
      db->index_collection(s);
    }
  } else {
    db->flush();
  }
  return db;
}

void Database::index_collection(const Schema& schema) {
  const Collection& c = records_.get(schema.oid);
  UncountedScope quiet(c);
  if (schema.kind == CollectionKind::VertexTable) {
    auto cursor = c.scan();
    while (const Record* r = cursor.next()) vertex_index_.emplace(get_vertex_key(*r, schema), r->tid);
  } else if (schema.kind == CollectionKind::EdgeTable) {
    auto cursor = c.scan();
    while (const Record* r = cursor.next()) edge_index_.emplace(get_edge_key(*r, schema), r->tid);
  }
}

const Schema& Database::create_collection(Schema schema) {
  std::unique_lock lock(mu_);
  const Schema& s = catalog_.add_collection(std::move(schema));
  Collection& c = records_.create(s);
  if (dir_) {
    fs::remove(log_path(*dir_, s));
    c.attach_log(log_path(*dir_, s));
    std::ofstream(*dir_ / "catalog.json") << catalog_.to_json_text();
  }
  return s;
}

const GraphDef& Database::create_graph(GraphDef graph) {
  std::unique_lock lock(mu_);
  const Schema& edges = catalog_.get(graph.edge_oid);
  if (!graph.edge_label.empty() && !edges.label.empty() && graph.edge_label != edges.label) {
    throw SchemaError("edge label '" + graph.edge_label + "' differs from table label '" + edges.label + "'");
  }
  GraphDef probe = graph;
  // validate by building before registering
  Catalog trial = catalog_;
  const GraphDef& registered_probe = trial.add_graph(probe);
  GraphTopology topo = build_topology(registered_probe);
  const GraphDef& g = catalog_.add_graph(std::move(graph));
  {
    std::lock_guard cl(cache_mu_);
    cache_[g.name] = std::make_unique<GraphTopology>(std::move(topo));
  }
  if (dir_) {
    std::ofstream(*dir_ / "catalog.json") << catalog_.to_json_text();
    write_topology(g, *cache_[g.name]);
  }
  return g;
}

GraphTopology Database::build_topology(const GraphDef& g) const {
  GraphTopology t;
  std::set<Oid> members(g.vertex_oids.begin(), g.vertex_oids.end());
  for (Oid oid : g.vertex_oids) {
    const Schema& s = catalog_.get(oid);
    UncountedScope quiet(records_.get(oid));
    auto cursor = records_.get(oid).scan();
    while (const Record* r = cursor.next()) t.add_vertex(get_vertex_key(*r, s), r->tid);
  }
  const Schema& es = catalog_.get(g.edge_oid);
  UncountedScope quiet(records_.get(g.edge_oid));
  auto cursor = records_.get(g.edge_oid).scan();
  while (const Record* r = cursor.next()) {
    EdgeKey k = get_edge_key(*r, es);
    if (!members.count(k.soid) || !members.count(k.toid)) {
      throw SchemaError("edge " + std::to_string(r->tid) + " of '" + es.name + "' has an endpoint outside graph '" +
                        g.name + "'");
    }
    auto s = t.find_nid(k.source());
    auto d = t.find_nid(k.target());
    if (!s || !d) throw ExecutionError("edge " + std::to_string(r->tid) + " of '" + es.name + "' has a dangling endpoint");
    t.add_edge(*s, *d, RecordLoc{g.edge_oid, r->tid});
  }
  return t;
}

std::optional<GraphTopology> Database::load_topology(const GraphDef& g) const {
  if (!dir_) return std::nullopt;
  fs::path fwd = *dir_ / (g.name + ".fwd.topo");
  fs::path rev = *dir_ / (g.name + ".rev.topo");
  fs::path nids = *dir_ / (g.name + ".nids");
  if (!fs::exists(fwd) || !fs::exists(rev) || !fs::exists(nids)) return std::nullopt;
  auto fb = read_bytes(fwd);
  auto rb = read_bytes(rev);
  auto nb = read_bytes(nids);
  GraphTopology t = GraphTopology::from_images(deserialize(fb), deserialize(rb), nb);
  // stale files (records changed after the last flush) are rebuilt instead
  std::size_t vertices = 0;
  for (Oid oid : g.vertex_oids) vertices += records_.get(oid).live_count();
  if (vertices != t.live_vertices() || records_.get(g.edge_oid).live_count() != t.edge_count()) return std::nullopt;
  return t;
}

void Database::write_topology(const GraphDef& g, const GraphTopology& t) const {
  if (!dir_) return;
  write_bytes(*dir_ / (g.name + ".fwd.topo"), serialize(t.adjacency(Direction::Forward), t.edge_map_entries(Direction::Forward)));
  write_bytes(*dir_ / (g.name + ".rev.topo"), serialize(t.adjacency(Direction::Reverse), t.edge_map_entries(Direction::Reverse)));
  write_bytes(*dir_ / (g.name + ".nids"), t.serialize_vertices());
}

GraphTopology& Database::topology_mut(const GraphDef& g) const {
  std::lock_guard lock(cache_mu_);
  auto it = cache_.find(g.name);
  if (it != cache_.end()) return *it->second;
  auto loaded = load_topology(g);
  auto ptr = std::make_unique<GraphTopology>(loaded ? std::move(*loaded) : build_topology(g));
  return *cache_.emplace(g.name, std::move(ptr)).first->second;
}

const GraphTopology& Database::topology(std::string_view graph) const {
  return topology_mut(catalog_.require_graph(graph));
}

bool Database::topology_loaded(std::string_view graph) const {
  std::lock_guard lock(cache_mu_);
  return cache_.find(graph) != cache_.end();
}

std::optional<Tid> Database::find_vertex(VertexKey key) const {
  auto it = vertex_index_.find(key);
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Tid> Database::find_edge(const EdgeKey& key) const {
  auto it = edge_index_.find(key);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Tid> Database::insert(Oid oid, std::vector<std::vector<Value>> rows) {
  const Schema& s = catalog_.get(oid);
  if (s.kind == CollectionKind::VertexTable) return insert_vertices(oid, std::move(rows));
  if (s.kind == CollectionKind::EdgeTable) return insert_edges(oid, std::move(rows));
  std::unique_lock lock(mu_);
  return records_.get(oid).insert(std::move(rows));
}

std::vector<Tid> Database::insert_vertices(Oid table, std::vector<std::vector<Value>> rows) {
  std::unique_lock lock(mu_);
  return insert_vertices_locked(table, std::move(rows));
}

std::vector<Tid> Database::insert_vertices_locked(Oid table, std::vector<std::vector<Value>> rows) {
  const Schema& s = catalog_.get(table);
  if (s.kind != CollectionKind::VertexTable) throw SchemaError("'" + s.name + "' is not a vertex table");
  std::vector<VertexKey> keys;
  std::set<VertexKey> batch;
  for (auto& r : rows) {
    r = conform_to_schema(std::move(r), s);
    VertexKey k{table, r[0].as_int()};
    if (vertex_index_.count(k) || !batch.insert(k).second) {
      throw ExecutionError("duplicate vertex key (" + std::to_string(k.oid) + ", " + std::to_string(k.vid) + ")");
    }
    keys.push_back(k);
  }
  auto graphs = catalog_.graphs_containing(table);
  std::vector<GraphTopology*> topos;
  for (const auto* g : graphs) topos.push_back(&topology_mut(*g));
  // stage 1: records
  auto tids = records_.get(table).insert(std::move(rows));
  // stage 2: fresh nids and mapper entries; no adjacency change for edge-less vertices
  for (std::size_t i = 0; i < tids.size(); ++i) {
    vertex_index_.emplace(keys[i], tids[i]);
    for (auto* t : topos) t->add_vertex(keys[i], tids[i]);
  }
  return tids;
}

std::vector<Tid> Database::insert_edges(Oid table, std::vector<std::vector<Value>> rows) {
  std::unique_lock lock(mu_);
  return insert_edges_locked(table, std::move(rows));
}

std::vector<Tid> Database::insert_edges_locked(Oid table, std::vector<std::vector<Value>> rows) {
  const Schema& s = catalog_.get(table);
  if (s.kind != CollectionKind::EdgeTable) throw SchemaError("'" + s.name + "' is not an edge table");
  auto graphs = catalog_.graphs_containing(table);
  std::vector<GraphTopology*> topos;
  for (const auto* g : graphs) topos.push_back(&topology_mut(*g));
  std::vector<EdgeKey> keys;
  std::vector<std::set<std::pair<Nid, Nid>>> batch_pairs(topos.size());
  std::vector<std::vector<std::pair<Nid, Nid>>> pairs(topos.size());
  std::set<EdgeKey> batch;
  for (auto& r : rows) {
    r = conform_to_schema(std::move(r), s);
    EdgeKey k{table, static_cast<Oid>(r[0].as_int()), r[1].as_int(), static_cast<Oid>(r[2].as_int()), r[3].as_int()};
    if (!vertex_index_.count(k.source()) || !vertex_index_.count(k.target())) {
      throw ExecutionError("edge (" + std::to_string(k.soid) + "," + std::to_string(k.svid) + ") -> (" +
                           std::to_string(k.toid) + "," + std::to_string(k.tvid) + ") has a dangling endpoint");
    }
    if (edge_index_.count(k) || !batch.insert(k).second) throw ExecutionError("duplicate edge key");
    for (std::size_t g = 0; g < topos.size(); ++g) {
      auto src = topos[g]->find_nid(k.source());
      auto dst = topos[g]->find_nid(k.target());
      if (!src || !dst) {
        throw ExecutionError("edge endpoint is not a vertex of graph '" + graphs[g]->name + "'");
      }
      std::pair<Nid, Nid> p{*src, *dst};
      if (topos[g]->find_edge(p.first, p.second) || !batch_pairs[g].insert(p).second) {
        throw ExecutionError("parallel edge between the same endpoints in graph '" + graphs[g]->name + "'");
      }
      pairs[g].push_back(p);
    }
    keys.push_back(k);
  }
  auto tids = records_.get(table).insert(std::move(rows));
  for (std::size_t i = 0; i < tids.size(); ++i) {
    edge_index_.emplace(keys[i], tids[i]);
    for (std::size_t g = 0; g < topos.size(); ++g) {
      topos[g]->add_edge(pairs[g][i].first, pairs[g][i].second, RecordLoc{table, tids[i]});
    }
  }
  return tids;
}

void Database::delete_edge(const EdgeKey& key) {
  std::unique_lock lock(mu_);
  delete_edge_locked(key);
}

void Database::delete_edge_locked(const EdgeKey& key) {
  auto it = edge_index_.find(key);
  if (it == edge_index_.end()) throw NotFoundError("edge not found");
  Tid tid = it->second;
  // topology first, then mapper entries, then the record
  for (const auto* g : catalog_.graphs_containing(key.oid)) {
    GraphTopology& t = topology_mut(*g);
    t.remove_edge(t.nid_of(key.source()), t.nid_of(key.target()));
  }
  edge_index_.erase(it);
  records_.get(key.oid).erase(tid);
}

void Database::delete_vertex(VertexKey key) {
  std::unique_lock lock(mu_);
  delete_vertex_locked(key);
}

void Database::delete_vertex_locked(VertexKey key) {
  auto it = vertex_index_.find(key);
  if (it == vertex_index_.end()) throw NotFoundError("vertex not found");
  Tid tid = it->second;
  std::vector<EdgeKey> incident;
  for (const auto& [ek, etid] : edge_index_) {
    if (ek.source() == key || ek.target() == key) incident.push_back(ek);
  }
  for (const auto& ek : incident) delete_edge_locked(ek);
  for (const auto* g : catalog_.graphs_containing(key.oid)) {
    GraphTopology& t = topology_mut(*g);
    t.retire_vertex(t.nid_of(key));
  }
  vertex_index_.erase(key);
  records_.get(key.oid).erase(tid);
}

void Database::update(Oid oid, Tid tid, std::vector<Value> values) {
  std::unique_lock lock(mu_);
  const Schema& s = catalog_.get(oid);
  Collection& c = records_.get(oid);
  values = conform_to_schema(std::move(values), s);
  if (s.key_columns() > 0) {
    const Record& old = c.fetch(tid);
    for (std::size_t i = 0; i < s.key_columns(); ++i) {
      if (old.values[i] != values[i]) throw SchemaError("key column '" + s.columns[i].name + "' cannot be updated");
    }
  }
  c.update(tid, std::move(values));
}

void Database::erase(Oid oid, Tid tid) {
  std::unique_lock lock(mu_);
  const Schema& s = catalog_.get(oid);
  Collection& c = records_.get(oid);
  if (s.kind == CollectionKind::VertexTable) {
    delete_vertex_locked(get_vertex_key(c.fetch(tid), s));
  } else if (s.kind == CollectionKind::EdgeTable) {
    delete_edge_locked(get_edge_key(c.fetch(tid), s));
  } else {
    c.erase(tid);
  }
}

AuditReport Database::audit(std::string_view graph) const {
  const GraphDef& g = catalog_.require_graph(graph);
  const GraphTopology& t = topology_mut(g);
  AuditReport rep;
  rep.graph = g.name;
  rep.vertices = t.live_vertices();
  rep.edges = t.edge_count();

  // (a) vertexMap . nidMap = identity on live vertex keys
  std::size_t live_keys = 0;
  bool a_ok = true;
  for (Oid oid : g.vertex_oids) {
    const Schema& s = catalog_.get(oid);
    UncountedScope quiet(records_.get(oid));
    auto cursor = records_.get(oid).scan();
    while (const Record* r = cursor.next()) {
      ++live_keys;
      VertexKey k = get_vertex_key(*r, s);
      auto nid = t.find_nid(k);
      if (!nid || !t.is_live(*nid) || t.vertex_of(*nid) != RecordLoc{oid, r->tid}) a_ok = false;
    }
  }
  if (live_keys != t.live_vertices()) a_ok = false;
  for (Nid n = 0; n < t.node_slots(); ++n) {
    if (!t.is_live(n)) {
      if (!t.neighbors(n, Direction::Forward).empty() || !t.neighbors(n, Direction::Reverse).empty()) a_ok = false;
      continue;
    }
    auto loc = t.vertex_of(n);
    auto back = t.find_nid(VertexKey{loc.oid, t.vid_of(n)});
    if (!back || *back != n) a_ok = false;
  }
  if (!a_ok) rep.failures.push_back("nidMap and vertexMap are not mutually inverse over live vertices");

  // (b) reverse is the transpose of forward
  std::vector<std::pair<Nid, Nid>> fwd, rev;
  const auto& F = t.adjacency(Direction::Forward);
  const auto& R = t.adjacency(Direction::Reverse);
  for (Nid n = 0; n < F.node_count(); ++n) {
    for (Nid m : F.neighbors(n)) fwd.emplace_back(n, m);
  }
  for (Nid n = 0; n < R.node_count(); ++n) {
    for (Nid m : R.neighbors(n)) rev.emplace_back(m, n);
  }
  std::sort(fwd.begin(), fwd.end());
  std::sort(rev.begin(), rev.end());
  if (fwd != rev) rep.failures.push_back("reverse adjacency is not the transpose of forward adjacency");

  // (c) edgeMap domain = set of forward pairs
  std::vector<std::pair<Nid, Nid>> dom;
  for (const auto& [p, loc] : t.edge_map()) dom.push_back(p);
  std::sort(dom.begin(), dom.end());
  auto fwd_set = fwd;
  fwd_set.erase(std::unique(fwd_set.begin(), fwd_set.end()), fwd_set.end());
  bool c_ok = dom == fwd_set;
  for (const auto& [p, loc] : t.edge_map()) {
    if (loc.oid != g.edge_oid || !records_.get(loc.oid).is_live(loc.tid)) c_ok = false;
  }
  if (!c_ok) rep.failures.push_back("edgeMap domain differs from the forward adjacency pairs");

  // (d) |edgeMap| = |E| = forward entries
  std::size_t live_edges = records_.get(g.edge_oid).live_count();
  if (t.edge_map().size() != F.edge_count() || fwd.size() != F.edge_count() || live_edges != F.edge_count()) {
    rep.failures.push_back("edge counts disagree: edgeMap " + std::to_string(t.edge_map().size()) + ", adjacency " +
                           std::to_string(fwd.size()) + ", records " + std::to_string(live_edges));
  }
  return rep;
}

std::vector<AuditReport> Database::audit_all() const {
  std::vector<AuditReport> out;
  for (const auto& g : catalog_.graphs()) out.push_back(audit(g.name));
  return out;
}

const ColumnStats& Database::stats(Oid oid) const {
  std::lock_guard lock(cache_mu_);
  const Collection& c = records_.get(oid);
  auto it = stats_.find(oid);
  if (it != stats_.end() && it->second.first == c.version()) return it->second.second;
  UncountedScope quiet(c);
  ColumnStats s = collect_stats(c);
  auto& slot = stats_[oid];
  slot = {c.version(), std::move(s)};
  return slot.second;
}

void Database::flush() const {
  if (!dir_) return;
  std::ofstream(*dir_ / "catalog.json") << catalog_.to_json_text();
  std::lock_guard lock(cache_mu_);
  for (const auto& [name, topo] : cache_) {
    if (const GraphDef* g = catalog_.find_graph(name)) write_topology(*g, *topo);
  }
}

}  // namespace gredo
