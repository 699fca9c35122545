#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gredo/error.hpp"
#include "gredo/io.hpp"
#include "gredo/record_store.hpp"

using namespace gredo;

namespace {

Schema products() {
  return Schema::relation("Products", {{"id", ColumnType::Int}, {"title", ColumnType::Text}});
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gredo_rs_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Scan, PredicateSelectsYogurtRows) {
  Collection c(products());
  c.insert({{100, "Yogurt"}, {101, "Bread"}, {102, "Yogurt"}});
  Predicate p = Predicate::unary(Expr::cmp(CmpOp::Eq, Expr::col("P", "title"), Expr::lit("Yogurt")), c.schema());
  auto rows = c.scan_all(p);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]->values[0], Value(100));
  EXPECT_EQ(rows[1]->values[0], Value(102));
}

TEST(Scan, EmptyCollection) {
  Collection c(products());
  auto cur = c.scan();
  EXPECT_EQ(cur.next(), nullptr);
}

TEST(Scan, EqualsPostFilterOnRandomData) {
  Schema s = Schema::relation("T", {{"x", ColumnType::Int}});
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20; ++round) {
    Collection c(s);
    std::vector<std::vector<Value>> rows;
    int n = static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) rows.push_back({static_cast<std::int64_t>(rng() % 20)});
    c.insert(rows);
    for (Tid t = 0; t < c.next_tid(); t += 5) c.erase(t);
    Predicate p = Predicate::unary(Expr::cmp(CmpOp::Lt, Expr::col("t", "x"), Expr::lit(7)), s);
    std::vector<Tid> got, want;
    for (const Record* r : c.scan_all(p)) got.push_back(r->tid);
    for (const Record* r : c.scan_all()) {
      if (p(*r)) want.push_back(r->tid);
    }
    EXPECT_EQ(got, want);
  }
}

TEST(Scan, SmallBufferStreamsEverything) {
  Collection c(products());
  std::vector<std::vector<Value>> rows;
  for (int i = 0; i < 100; ++i) rows.push_back({i, "x"});
  c.insert(rows);
  auto cur = c.scan(std::nullopt, 7);
  int n = 0;
  Tid last = 0;
  while (const Record* r = cur.next()) {
    if (n > 0) EXPECT_GT(r->tid, last);
    last = r->tid;
    ++n;
  }
  EXPECT_EQ(n, 100);
}

TEST(Fetch, RoundTripAndTombstone) {
  Collection c(products());
  auto tids = c.insert({{1, "a"}});
  EXPECT_EQ(c.fetch(tids[0]).values[1], Value("a"));
  c.erase(tids[0]);
  EXPECT_THROW(c.fetch(tids[0]), NotFoundError);
  EXPECT_THROW(c.erase(tids[0]), NotFoundError);
  EXPECT_THROW(c.fetch(999), NotFoundError);
}

TEST(Fetch, RandomFetchesNeverScan) {
  Collection c(products());
  std::vector<std::vector<Value>> rows;
  for (int i = 0; i < 1000; ++i) rows.push_back({i, "x"});
  c.insert(rows);
  c.reset_counters();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100000; ++i) c.fetch(rng() % 1000);
  EXPECT_EQ(c.counters().scans, 0u);
  EXPECT_EQ(c.counters().scanned, 0u);
  EXPECT_EQ(c.counters().tid_fetches, 100000u);
}

TEST(Insert, TidsMonotoneAndNeverReused) {
  Collection c(products());
  EXPECT_TRUE(c.insert({}).empty());
  auto a = c.insert({{1, "a"}, {2, "b"}});
  c.erase(a[1]);
  auto b = c.insert({{3, "c"}});
  EXPECT_LT(a[0], a[1]);
  EXPECT_GT(b[0], a[1]);
  EXPECT_EQ(c.live_count(), 2u);
  bool seen = false;
  for (const Record* r : c.scan_all()) seen |= r->tid == b[0];
  EXPECT_TRUE(seen);
}

TEST(Insert, SchemaMismatchRejectsWholeBatch) {
  Collection c(products());
  EXPECT_THROW(c.insert({{1, "a"}, {"bad", "b"}}), SchemaError);
  EXPECT_EQ(c.live_count(), 0u);
}

TEST(Update, KeepsTid) {
  Collection c(products());
  auto t = c.insert({{1, "a"}})[0];
  c.update(t, {1, "b"});
  EXPECT_EQ(c.fetch(t).values[1], Value("b"));
  EXPECT_EQ(c.fetch(t).tid, t);
  EXPECT_THROW(c.update(t, {1}), SchemaError);
  c.erase(t);
  EXPECT_THROW(c.update(t, {1, "c"}), NotFoundError);
}

TEST(Delete, ExcludedFromScan) {
  Collection c(products());
  auto t = c.insert({{1, "a"}, {2, "b"}});
  c.erase(t[0]);
  auto rows = c.scan_all();
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]->tid, t[1]);
}

TEST(Log, ReplayRestoresState) {
  auto dir = temp_dir("log");
  auto path = dir / "t.log";
  {
    Collection c(products());
    c.attach_log(path);
    auto t = c.insert({{1, "a"}, {2, "b"}, {3, "c"}});
    c.update(t[0], {1, "z"});
    c.erase(t[1]);
  }
  Collection d(products());
  d.replay_log(path);
  EXPECT_EQ(d.live_count(), 2u);
  EXPECT_EQ(d.fetch(0).values[1], Value("z"));
  EXPECT_FALSE(d.is_live(1));
  EXPECT_EQ(d.next_tid(), 3u);
  std::filesystem::remove_all(dir);
}

TEST(Log, CorruptLineNamesLine) {
  auto dir = temp_dir("corrupt");
  auto path = dir / "t.log";
  {
    std::ofstream out(path);
    out << R"({"op":"i","tid":0,"v":[1,"a"]})" << "\n" << "garbage\n";
  }
  Collection d(products());
  try {
    d.replay_log(path);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(Csv, RoundTripPreservesMultiset) {
  Schema s = Schema::relation("T", {{"i", ColumnType::Int}, {"f", ColumnType::Float}, {"t", ColumnType::Text},
                                    {"b", ColumnType::Bool}, {"d", ColumnType::Document}, {"a", ColumnType::Array}});
  Collection c(s);
  Document doc;
  doc.set("k", Value("v, \"quoted\"\nline"));
  c.insert({{1, 0.1, "plain", true, Value(doc), Value(Array{Value(1), Value(2)})},
            {Value(), 1e300, "", false, Value(Document{}), Value(Array{})},
            {-5, -0.0, "a,b", Value(), Value(), Value()}});
  std::stringstream ss;
  write_csv(ss, c);
  auto rows = read_csv(ss, s, "t.csv");
  Collection back(s);
  back.insert(rows);
  auto a = c.scan_all();
  auto b = back.scan_all();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->values, b[i]->values);
}

TEST(Csv, MalformedLineNamed) {
  Schema s = Schema::relation("T", {{"i", ColumnType::Int}, {"t", ColumnType::Text}});
  std::stringstream ss("i,t\n1,a\n2,b,extra\n");
  try {
    read_csv(ss, s, "bad.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
  }
  std::stringstream ss2("i,t\nxx,a\n");
  EXPECT_THROW(read_csv(ss2, s, "bad.csv"), Error);
}

TEST(Jsonl, RoundTripDocumentsAndRelations) {
  Schema ds = Schema::document_collection("Orders");
  Collection c(ds);
  Document d;
  d.set("customer_id", Value(1));
  d.set("product_id", Value(100));
  c.insert({{Value(d)}, {Value(Document{})}});
  std::stringstream ss;
  write_jsonl(ss, c);
  auto rows = read_jsonl(ss, ds, "o.jsonl");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], Value(d));

  Schema rs = Schema::relation("T", {{"i", ColumnType::Int}, {"t", ColumnType::Text}});
  Collection r(rs);
  r.insert({{1, "a"}, {Value(), "b"}});
  std::stringstream s2;
  write_jsonl(s2, r);
  auto rrows = read_jsonl(s2, rs, "t.jsonl");
  ASSERT_EQ(rrows.size(), 2u);
  EXPECT_EQ(rrows[1][0], Value());
  EXPECT_EQ(rrows[1][1], Value("b"));
}
