#include <gtest/gtest.h>

#include <random>

#include "gredo/error.hpp"
#include "gredo/fixtures.hpp"
#include "gredo/query.hpp"
#include "query_gen.hpp"

using namespace gredo;

namespace {

std::set<std::pair<std::int64_t, std::int64_t>> pairs_of(const QueryResult& r) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& row : r.rows) out.insert({row[0].as_int(), row[1].as_int()});
  return out;
}

struct Yogurt {
  Database db;
  Yogurt() { fixtures::load_yogurt(db); }
};

std::vector<QueryOptions> all_variants() {
  std::vector<QueryOptions> out;
  for (int mask = 0; mask < 16; ++mask) {
    for (JoinShape s : {JoinShape::MatchFirst, JoinShape::PushDirect, JoinShape::PushAll}) {
      QueryOptions o;
      o.rules.predicate_pushdown = mask & 1;
      o.rules.match_trimming = mask & 2;
      o.rules.projection_trimming = mask & 4;
      o.rules.traversal_pruning = mask & 8;
      o.force_shape = s;
      out.push_back(o);
    }
  }
  QueryOptions off;
  off.mode = ExecMode::OptimizerOff;
  out.push_back(off);
  QueryOptions no_attr;
  no_attr.rules.attribute_pushdown = false;
  no_attr.rules.join_pushdown = false;
  out.push_back(no_attr);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- parser

TEST(Parser, RoundTrip) {
  const char* queries[] = {
      fixtures::kYogurtQuery,
      "SELECT * FROM Customers",
      "SELECT C.id AS x, O->>'items'->>0 FROM Customers AS C, Orders O WHERE NOT (C.id = 1 OR C.id <> -2.5)",
      "SELECT p.vid FROM G MATCH (p:Persons)<-[e:knows]-(q:Persons)-[f:knows]->(r:Persons) WHERE e.since >= 1e3",
  };
  for (const char* q : queries) {
    QueryAst a = parse_query(q);
    std::string printed = to_string(a);
    EXPECT_EQ(parse_query(printed), a) << printed;
    EXPECT_EQ(to_string(parse_query(printed)), printed);
  }
}

TEST(Parser, WhitespaceAndCaseInsensitiveKeywords) {
  EXPECT_EQ(parse_query("select C.id from Customers C where C.id=1"),
            parse_query("SELECT  C.id\n FROM Customers C\tWHERE C.id = 1"));
}

TEST(Parser, SyntaxErrorsCarryPositions) {
  try {
    parse_query("SELECT C.id\nFROM Customers C WHERE C.id = ");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 20u);
  }
  EXPECT_THROW(parse_query("SELECT FROM X"), SyntaxError);
  EXPECT_THROW(parse_query("SELECT a.b FROM X MATCH (p:P)-[e]-(q:P)"), SyntaxError);
  EXPECT_THROW(parse_query("SELECT a.b FROM X WHERE a.b = 'open"), SyntaxError);
  EXPECT_THROW(parse_query("SELECT a.b FROM X Y Z"), SyntaxError);
}

TEST(Parser, Statements) {
  auto s = parse_statement("EXPLAIN SELECT C.id FROM Customers C");
  EXPECT_EQ(s.kind, StatementAst::Kind::Explain);
  auto a = parse_statement("ANALYZE REGRESSION USING (SELECT C.id, C.person_id FROM Customers C) WITH (label='person_id')");
  ASSERT_EQ(a.kind, StatementAst::Kind::Analyze);
  EXPECT_EQ(a.analyze.op, AnalyzeOp::Regression);
  EXPECT_EQ(parse_analyze(to_string(a.analyze)), a.analyze);
  auto m = parse_statement("ANALYZE MULTIPLY USING (SELECT C.id FROM Customers C) AND (SELECT P.id FROM Products P)");
  EXPECT_TRUE(m.analyze.second.has_value());
}

// ----------------------------------------------------------- logical plan

TEST(LogicalPlan, ClassifiesConjuncts) {
  Yogurt f;
  LogicalPlan plan = build_logical_plan(parse_query(fixtures::kYogurtQuery), f.db.catalog());
  EXPECT_EQ(plan.joins.size(), 3u);
  ASSERT_EQ(plan.selections.size(), 1u);
  EXPECT_EQ(to_string(plan.selections[0]), "P.title = 'Yogurt'");
  EXPECT_EQ(plan.output_names, (std::vector<std::string>{"cid", "tid"}));
  std::string tree = render(logical_tree(plan));
  EXPECT_NE(tree.find("Projection"), std::string::npos);
  EXPECT_NE(tree.find("Match"), std::string::npos);
  EXPECT_NE(tree.find("GraphProjection"), std::string::npos);
}

TEST(LogicalPlan, SchemaErrors) {
  Yogurt f;
  auto plan = [&](const char* q) { return build_logical_plan(parse_query(q), f.db.catalog()); };
  EXPECT_THROW(plan("SELECT X.id FROM Nope X"), SchemaError);
  EXPECT_THROW(plan("SELECT C.nope FROM Customers C"), SchemaError);
  EXPECT_THROW(plan("SELECT p.vid FROM Interests MATCH (p:Robots)"), SchemaError);
  EXPECT_THROW(plan("SELECT p.vid FROM Interests MATCH (p:Persons)-[e:likes]->(t:Tags)"), SchemaError);
  EXPECT_THROW(plan("SELECT p.vid FROM Interests"), SchemaError);
  EXPECT_THROW(plan("SELECT C.id FROM Customers C MATCH (p:Persons)"), SchemaError);
  EXPECT_THROW(plan("SELECT p.vid FROM Interests MATCH (p:Persons)-[e]->(t:Tags)<-[f]-(p:Persons)"), SchemaError);
  EXPECT_THROW(plan("SELECT C.id FROM Customers C, Customers C"), SchemaError);
}

TEST(Rules, PredicatePushdownMovesGraphSelections) {
  Yogurt f;
  LogicalPlan plan = build_logical_plan(
      parse_query("SELECT p.vid FROM Customers C, Interests MATCH (p:Persons)-[e]->(t:Tags) "
                  "WHERE t.category = 'food' AND C.person_id = p.vid AND C.person_id = 3"),
      f.db.catalog());
  ASSERT_TRUE(rule_graph_predicate_pushdown(plan));
  const Pattern& p = plan.match->pattern;
  ASSERT_TRUE(p.vertices[1].pred.has_value());
  EXPECT_EQ(to_string(*p.vertices[1].pred), "t.category = 'food'");
  // the relational selection on the join column is replicated onto p and kept
  ASSERT_TRUE(p.vertices[0].pred.has_value());
  EXPECT_EQ(to_string(*p.vertices[0].pred), "p.vid = 3");
  ASSERT_EQ(plan.selections.size(), 1u);
  EXPECT_FALSE(rule_graph_predicate_pushdown(plan));
}

TEST(Rules, MatchTrimmingVertexScan) {
  Yogurt f;
  LogicalPlan plan = build_logical_plan(parse_query("SELECT p.name FROM Interests MATCH (p:Persons) WHERE p.age > 30"),
                                        f.db.catalog());
  ASSERT_TRUE(rule_match_trimming(plan, f.db.catalog()));
  EXPECT_EQ(plan.match->trim, TrimKind::VertexScan);
  auto r = run_query(f.db, "SELECT p.name FROM Interests MATCH (p:Persons) WHERE p.age > 30");
  EXPECT_EQ(r.row_count(), 2u);
}

TEST(Rules, MatchTrimmingEdgeScanRewritesVids) {
  Yogurt f;
  const char* q = "SELECT p.vid, t.vid FROM Interests MATCH (t:Tags)<-[e:Interested in]-(p:Persons) WHERE e.weight > 1";
  LogicalPlan plan = build_logical_plan(parse_query(q), f.db.catalog());
  ASSERT_TRUE(rule_match_trimming(plan, f.db.catalog()));
  EXPECT_EQ(plan.match->trim, TrimKind::EdgeScan);
  EXPECT_EQ(to_string(plan.projection[0].expr), "e.svid");
  EXPECT_EQ(to_string(plan.projection[1].expr), "e.tvid");
  QueryOptions off;
  off.rules.match_trimming = false;
  EXPECT_EQ(sorted_rows(run_query(f.db, q)), sorted_rows(run_query(f.db, q, off)));
  EXPECT_EQ(run_query(f.db, q).row_count(), 5u);
}

TEST(Rules, MatchTrimmingKeepsPatternsUsingVertexProperties) {
  Yogurt f;
  LogicalPlan plan = build_logical_plan(
      parse_query("SELECT p.name FROM Interests MATCH (p:Persons)-[e]->(t:Tags)"), f.db.catalog());
  EXPECT_FALSE(rule_match_trimming(plan, f.db.catalog()));
}

TEST(Rules, ProjectionTrimmingKeepsReferencedVariables) {
  Yogurt f;
  LogicalPlan plan = build_logical_plan(parse_query(fixtures::kYogurtQuery), f.db.catalog());
  ASSERT_TRUE(rule_projection_trimming(plan));
  EXPECT_EQ(plan.match->projected, (std::set<std::string>{"p", "t"}));
}

// -------------------------------------------------------------- execution

TEST(Query, YogurtScenario) {
  Yogurt f;
  QueryResult r = run_query(f.db, fixtures::kYogurtQuery);
  EXPECT_EQ(r.columns, (std::vector<std::string>{"cid", "tid"}));
  EXPECT_EQ(pairs_of(r), fixtures::yogurt_expected());
  EXPECT_EQ(r.row_count(), fixtures::yogurt_expected().size());
}

TEST(Query, YogurtEveryVariantAgrees) {
  Yogurt f;
  auto expected = fixtures::yogurt_expected();
  for (const auto& o : all_variants()) {
    QueryResult r = run_query(f.db, fixtures::kYogurtQuery, o);
    EXPECT_EQ(pairs_of(r), expected);
    EXPECT_EQ(r.row_count(), expected.size());
  }
  QueryOptions je;
  je.mode = ExecMode::JoinEmulation;
  EXPECT_EQ(pairs_of(run_query(f.db, fixtures::kYogurtQuery, je)), expected);
}

TEST(Query, YogurtIsTrimmedToAnEdgeScan) {
  Yogurt f;
  PhysicalPlan plan = optimize(f.db, build_logical_plan(parse_query(fixtures::kYogurtQuery), f.db.catalog()), {});
  EXPECT_EQ(plan.logical.match->trim, TrimKind::EdgeScan);
  EXPECT_NE(explain(plan).find("EdgeScan"), std::string::npos);
}

TEST(Query, ShapesAreEnumeratedAndForced) {
  Yogurt f;
  for (JoinShape s : {JoinShape::MatchFirst, JoinShape::PushDirect, JoinShape::PushAll}) {
    QueryOptions o;
    o.rules.match_trimming = false;
    o.force_shape = s;
    PhysicalPlan plan = optimize(f.db, build_logical_plan(parse_query(fixtures::kYogurtQuery), f.db.catalog()), o);
    EXPECT_EQ(plan.shape, s);
    EXPECT_EQ(plan.alternatives.size(), 3u);
  }
}

TEST(Query, ExplainFormat) {
  Yogurt f;
  QueryOptions o;
  o.rules.match_trimming = false;
  PhysicalPlan plan = optimize(f.db, build_logical_plan(parse_query(fixtures::kYogurtQuery), f.db.catalog()), o);
  std::string text = explain(plan);
  EXPECT_EQ(text.rfind("Project", 0), 0u);
  EXPECT_NE(text.find("PatternMatch"), std::string::npos);
  EXPECT_NE(text.find("cost="), std::string::npos);
  EXPECT_NE(text.find("\n  "), std::string::npos);
  EXPECT_NE(text.find("rules: projection_trimming"), std::string::npos);
  EXPECT_NE(text.find("shape: "), std::string::npos);

  QueryOptions off;
  off.mode = ExecMode::OptimizerOff;
  PhysicalPlan plain = optimize(f.db, build_logical_plan(parse_query(fixtures::kYogurtQuery), f.db.catalog()), off);
  EXPECT_NE(explain(plain), text);
  EXPECT_NE(explain(plain).find("rules: none"), std::string::npos);
}

TEST(Query, DocumentPathsAndWholeRecords) {
  Yogurt f;
  auto r = run_query(f.db, "SELECT O FROM Orders O WHERE O->>'qty' >= 3");
  ASSERT_EQ(r.row_count(), 1u);
  EXPECT_EQ(r.rows[0][0].as_document().find("customer_id")->as_int(), 4);
  auto c = run_query(f.db, "SELECT C FROM Customers C WHERE C.id = 2");
  ASSERT_EQ(c.row_count(), 1u);
  EXPECT_EQ(c.rows[0][0].as_document().find("person_id")->as_int(), 2);
}

TEST(Query, NullJoinKeysNeverMatch) {
  Yogurt f;
  auto r = run_query(f.db, "SELECT C.id FROM Customers C, Interests MATCH (p:Persons) WHERE C.person_id = p.vid");
  EXPECT_EQ(r.row_count(), 3u);
}

TEST(Query, CountersReflectPruning) {
  Yogurt f;
  const char* q = "SELECT t.name FROM Interests MATCH (p:Persons)-[e]->(t:Tags) WHERE p.name = 'Cleo'";
  QueryResult pruned = run_query(f.db, q);
  QueryOptions keep;
  keep.rules.traversal_pruning = false;
  QueryResult full = run_query(f.db, q, keep);
  EXPECT_EQ(sorted_rows(pruned), sorted_rows(full));
  EXPECT_GT(pruned.counters.pruned_emissions, 0u);
  EXPECT_EQ(full.counters.tid_fetches - pruned.counters.tid_fetches, pruned.counters.pruned_emissions);
}

TEST(Query, FingerprintIgnoresFormattingAndAliases) {
  Yogurt f;
  auto fp = [&](const char* q) { return fingerprint(build_logical_plan(parse_query(q), f.db.catalog())); };
  EXPECT_EQ(fp("SELECT C.id FROM Customers C WHERE C.id = 1 AND C.person_id = 2"),
            fp("select   X.id from Customers X where X.person_id = 2 and X.id = 1"));
  EXPECT_NE(fp("SELECT C.id FROM Customers C WHERE C.id = 1"), fp("SELECT C.id FROM Customers C WHERE C.id = 2"));
}

TEST(Query, CrossModelJoinPairs) {
  Yogurt f;
  auto pairs = cross_model_join(f.db.collection("Customers"), "C", f.db.collection("Orders"), "O",
                                parse_expr(*std::make_unique<TokenStream>(tokenize("O->>'customer_id' = C.id"))));
  EXPECT_EQ(pairs.size(), 5u);
  for (const auto& [c, o] : pairs) {
    EXPECT_EQ(c->values[0].as_int(), o->values[0].as_document().find("customer_id")->as_int());
  }
}

TEST(Query, RandomQueriesAgreeAcrossModes) {
  Database db;
  fixtures::load_commerce(db, 7, {});
  std::mt19937_64 rng(99);
  QueryOptions je;
  je.mode = ExecMode::JoinEmulation;
  std::vector<QueryOptions> variants = all_variants();
  for (int i = 0; i < 25; ++i) {
    std::string q = fixture::random_commerce_query(rng);
    auto expected = sorted_rows(run_query(db, q, je));
    for (std::size_t v = 0; v < variants.size(); v += 7) {
      ASSERT_EQ(sorted_rows(run_query(db, q, variants[v])), expected) << q << " variant " << v;
    }
  }
}
