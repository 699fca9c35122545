#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "gredo/database.hpp"
#include "gredo/error.hpp"
#include "gredo/topology.hpp"
#include "graph_fixture.hpp"

using namespace gredo;

namespace {

AdjacencyGraph random_adjacency(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  AdjacencyGraph g(Direction::Forward, n);
  std::set<std::pair<Nid, Nid>> seen;
  for (std::size_t i = 0; i < m && n > 0; ++i) {
    Nid s = rng() % n, t = rng() % n;
    if (seen.insert({s, t}).second) g.add_edge(s, t);
  }
  return g;
}

std::vector<EdgeMapEntry> entries_for(const AdjacencyGraph& g) {
  std::vector<EdgeMapEntry> out;
  Tid tid = 0;
  for (Nid s = 0; s < g.node_count(); ++s) {
    for (Nid t : g.neighbors(s)) out.push_back({s, t, {7, tid++}});
  }
  return out;
}

struct SmallGraph {
  Database db;
  Oid v = 0, e = 0;
  SmallGraph() {
    v = db.create_collection(Schema::vertex_table("V", "V", {{"name", ColumnType::Text}})).oid;
    e = db.create_collection(Schema::edge_table("E", "rel", {})).oid;
    db.create_graph({"G", {v}, e, "rel"});
  }
  std::vector<Value> edge(std::int64_t s, std::int64_t t) const {
    return {static_cast<std::int64_t>(v), s, static_cast<std::int64_t>(v), t};
  }
};

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gredo_topo_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Adjacency, IsolatedVertexHasNoNeighbors) {
  AdjacencyGraph g(Direction::Forward, 3);
  EXPECT_TRUE(g.neighbors(2).empty());
}

TEST(Adjacency, InsertionOrder) {
  AdjacencyGraph g(Direction::Forward, 3);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  EXPECT_EQ(g.neighbors(0), (std::vector<Nid>{1, 2}));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_THROW(g.add_edge(0, 9), ContractError);
}

TEST(Adjacency, ReverseIsTransposeOnRandomGraphs) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 30; ++i) {
    AdjacencyGraph g = random_adjacency(rng, 1 + rng() % 40, rng() % 200);
    AdjacencyGraph r = g.transposed();
    std::multiset<std::pair<Nid, Nid>> fwd, rev;
    for (Nid s = 0; s < g.node_count(); ++s) {
      for (Nid t : g.neighbors(s)) fwd.insert({s, t});
      for (Nid t : r.neighbors(s)) rev.insert({t, s});
    }
    EXPECT_EQ(fwd, rev);
    EXPECT_EQ(r.direction(), Direction::Reverse);
  }
}

TEST(Serialize, EmptyAndSingleEdge) {
  AdjacencyGraph empty;
  auto img = deserialize(serialize(empty, {}));
  EXPECT_EQ(img.graph, empty);
  AdjacencyGraph one(Direction::Forward, 2);
  one.add_edge(0, 1);
  auto entries = entries_for(one);
  img = deserialize(serialize(one, entries));
  EXPECT_EQ(img.graph, one);
  EXPECT_EQ(img.edge_map, entries);
}

TEST(Serialize, RandomGraphsRoundTrip) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    AdjacencyGraph g = random_adjacency(rng, rng() % 60, rng() % 300);
    auto entries = entries_for(g);
    auto img = deserialize(serialize(g, entries));
    EXPECT_EQ(img.graph, g);
    std::sort(entries.begin(), entries.end());
    EXPECT_EQ(img.edge_map, entries);
  }
}

TEST(Serialize, CorruptInputsRejected) {
  AdjacencyGraph g(Direction::Forward, 2);
  g.add_edge(0, 1);
  auto bytes = serialize(g, entries_for(g));
  EXPECT_THROW(deserialize(std::span(bytes.data(), bytes.size() - 1)), FormatError);
  EXPECT_THROW(deserialize(std::span(bytes.data(), std::size_t{10})), FormatError);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(deserialize(bad), FormatError);
  bad = bytes;
  bad[4] = 9;
  EXPECT_THROW(deserialize(bad), FormatError);
}

TEST(Mappers, NidRoundTrip) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "v1"}, {1, "v2"}, {2, "v3"}});
  const GraphTopology& t = g.db.topology("G");
  Nid n = t.nid_of({g.v, 0});
  RecordLoc loc = t.vertex_of(n);
  EXPECT_EQ(get_vertex_key(g.db.collection(loc.oid).fetch(loc.tid), g.db.catalog().get(g.v)), (VertexKey{g.v, 0}));
  EXPECT_THROW(t.nid_of({g.v, 77}), NotFoundError);
  std::set<Nid> nids;
  for (std::int64_t i = 0; i < 3; ++i) nids.insert(t.nid_of({g.v, i}));
  EXPECT_EQ(nids, (std::set<Nid>{0, 1, 2}));
}

TEST(Mappers, EdgeOf) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "a"}, {1, "b"}});
  g.db.insert(g.e, {g.edge(0, 1)});
  const GraphTopology& t = g.db.topology("G");
  RecordLoc loc = t.edge_of(t.nid_of({g.v, 0}), t.nid_of({g.v, 1}));
  EXPECT_EQ(get_edge_key(g.db.collection(loc.oid).fetch(loc.tid), g.db.catalog().get(g.e)).tvid, 1);
  EXPECT_THROW(t.edge_of(t.nid_of({g.v, 1}), t.nid_of({g.v, 0})), NotFoundError);
}

TEST(Insert, VertexGrowsNodesOnly) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "a"}});
  const GraphTopology& t = g.db.topology("G");
  EXPECT_EQ(t.node_slots(), 1u);
  EXPECT_EQ(t.edge_count(), 0u);
  EXPECT_THROW(g.db.insert(g.v, {{0, "dup"}}), ExecutionError);
  EXPECT_EQ(g.db.collection(g.v).live_count(), 1u);
}

TEST(Insert, EdgeExtendsBothDirections) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "a"}, {1, "b"}});
  g.db.insert(g.e, {g.edge(0, 1)});
  const GraphTopology& t = g.db.topology("G");
  Nid a = t.nid_of({g.v, 0}), b = t.nid_of({g.v, 1});
  EXPECT_EQ(t.neighbors(a, Direction::Forward), (std::vector<Nid>{b}));
  EXPECT_EQ(t.neighbors(b, Direction::Reverse), (std::vector<Nid>{a}));
  EXPECT_THROW(g.db.insert(g.e, {g.edge(0, 5)}), ExecutionError);
  EXPECT_THROW(g.db.insert(g.e, {g.edge(0, 1)}), ExecutionError);
  EXPECT_EQ(t.edge_count(), 1u);
  EXPECT_EQ(g.db.collection(g.e).live_count(), 1u);
}

TEST(Insert, SelfLoopAllowed) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "a"}});
  g.db.insert(g.e, {g.edge(0, 0)});
  EXPECT_TRUE(g.db.audit("G").ok());
}

TEST(Update, LeavesTopologyUntouched) {
  SmallGraph g;
  auto tids = g.db.insert(g.v, {{0, "a"}, {1, "b"}});
  g.db.insert(g.e, {g.edge(0, 1)});
  std::uint64_t sum = g.db.topology("G").checksum();
  Nid n = g.db.topology("G").nid_of({g.v, 0});
  g.db.update(g.v, tids[0], {0, "renamed"});
  EXPECT_EQ(g.db.topology("G").checksum(), sum);
  EXPECT_EQ(g.db.topology("G").nid_of({g.v, 0}), n);
  EXPECT_THROW(g.db.update(g.v, tids[0], {9, "rekey"}), SchemaError);
}

TEST(Delete, EdgeRemovedFromBothDirections) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "a"}, {1, "b"}});
  g.db.insert(g.e, {g.edge(0, 1)});
  g.db.delete_edge({g.e, g.v, 0, g.v, 1});
  const GraphTopology& t = g.db.topology("G");
  EXPECT_EQ(t.edge_count(), 0u);
  EXPECT_TRUE(t.neighbors(t.nid_of({g.v, 1}), Direction::Reverse).empty());
  EXPECT_TRUE(t.edge_map().empty());
  EXPECT_EQ(g.db.collection(g.e).live_count(), 0u);
  EXPECT_THROW(g.db.delete_edge({g.e, g.v, 0, g.v, 1}), NotFoundError);
}

TEST(Delete, VertexCascadesIncidentEdges) {
  SmallGraph g;
  g.db.insert(g.v, {{0, "a"}, {1, "b"}, {2, "c"}});
  g.db.insert(g.e, {g.edge(0, 1), g.edge(1, 2), g.edge(2, 1), g.edge(1, 1), g.edge(0, 2)});
  g.db.delete_vertex({g.v, 1});
  const GraphTopology& t = g.db.topology("G");
  EXPECT_EQ(t.edge_count(), 1u);
  EXPECT_EQ(g.db.collection(g.e).live_count(), 1u);
  EXPECT_FALSE(t.find_nid({g.v, 1}));
  EXPECT_TRUE(g.db.audit("G").ok());
  EXPECT_THROW(g.db.delete_vertex({g.v, 1}), NotFoundError);
}

TEST(Audit, RandomMutationsMatchEdgeSetOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    SmallGraph g;
    std::set<std::int64_t> live;
    std::set<std::pair<std::int64_t, std::int64_t>> edges;
    std::int64_t next_vid = 0;
    for (int step = 0; step < 300; ++step) {
      int op = static_cast<int>(rng() % 10);
      if (op < 3 || live.empty()) {
        g.db.insert(g.v, {{next_vid, "x"}});
        live.insert(next_vid++);
      } else if (op < 7) {
        auto s = *std::next(live.begin(), rng() % live.size());
        auto t = *std::next(live.begin(), rng() % live.size());
        if (edges.count({s, t})) continue;
        g.db.insert(g.e, {g.edge(s, t)});
        edges.insert({s, t});
      } else if (op < 8 && !edges.empty()) {
        auto [s, t] = *std::next(edges.begin(), rng() % edges.size());
        g.db.delete_edge({g.e, g.v, s, g.v, t});
        edges.erase({s, t});
      } else if (op < 9) {
        auto x = *std::next(live.begin(), rng() % live.size());
        g.db.delete_vertex({g.v, x});
        live.erase(x);
        std::erase_if(edges, [&](const auto& e) { return e.first == x || e.second == x; });
      } else {
        auto x = *std::next(live.begin(), rng() % live.size());
        g.db.update(g.v, *g.db.find_vertex({g.v, x}), {x, "updated"});
      }
      const GraphTopology& t = g.db.topology("G");
      std::set<std::pair<std::int64_t, std::int64_t>> seen;
      for (auto v : live) {
        for (Nid n : t.neighbors(t.nid_of({g.v, v}), Direction::Forward)) seen.insert({v, t.vid_of(n)});
      }
      ASSERT_EQ(seen, edges) << "seed " << seed << " step " << step;
    }
    AuditReport r = g.db.audit("G");
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.edges, edges.size());
    EXPECT_EQ(r.vertices, live.size());
  }
}

TEST(Persistence, ReopenRestoresRecordsAndTopology) {
  auto dir = temp_dir("reopen");
  std::uint64_t sum = 0;
  {
    auto db = Database::open(dir);
    Oid v = db->create_collection(Schema::vertex_table("V", "V", {{"name", ColumnType::Text}})).oid;
    Oid e = db->create_collection(Schema::edge_table("E", "rel", {})).oid;
    db->create_graph({"G", {v}, e, "rel"});
    db->insert(v, {{0, "a"}, {1, "b"}, {2, "c"}});
    db->insert(e, {{std::int64_t(v), 0, std::int64_t(v), 1}, {std::int64_t(v), 1, std::int64_t(v), 2}});
    db->delete_vertex({v, 2});
    sum = db->topology("G").checksum();
    db->flush();
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "G.fwd.topo"));
  EXPECT_TRUE(std::filesystem::exists(dir / "G.rev.topo"));
  auto db = Database::open(dir);
  EXPECT_EQ(db->topology("G").checksum(), sum);
  EXPECT_TRUE(db->audit("G").ok());
  EXPECT_EQ(db->collection("V").live_count(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(Persistence, StaleTopologyFilesAreRebuilt) {
  auto dir = temp_dir("stale");
  {
    auto db = Database::open(dir);
    Oid v = db->create_collection(Schema::vertex_table("V", "V", {})).oid;
    Oid e = db->create_collection(Schema::edge_table("E", "rel", {})).oid;
    db->create_graph({"G", {v}, e, "rel"});
    db->flush();
    db->insert(v, {{0}, {1}});
    db->insert(e, {{std::int64_t(v), 0, std::int64_t(v), 1}});
  }
  auto db = Database::open(dir);
  EXPECT_EQ(db->topology("G").edge_count(), 1u);
  EXPECT_TRUE(db->audit("G").ok());
  std::filesystem::remove_all(dir);
}

TEST(Audit, RandomGraphFixturesAreConsistent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = fixture::make_random_graph(seed, 100, 500);
    EXPECT_TRUE(g.db->audit("G").ok());
  }
}
