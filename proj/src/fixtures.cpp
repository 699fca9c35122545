#include "gredo/fixtures.hpp"

#include <random>
#include <set>

namespace gredo::fixtures {

const char* const kYogurtQuery =
    "SELECT C.id AS cid, t.vid AS tid FROM Customers C, Orders O, Products P, Interests "
    "MATCH (p:Persons)-[e:Interested in]->(t:Tags) "
    "WHERE C.person_id = p.vid AND O->>'customer_id' = C.id AND O->>'product_id' = P.id AND P.title = 'Yogurt'";

const char* const kSocialQuery =
    "SELECT C.id AS cid, p.name AS person FROM Customers C, Interests "
    "MATCH (p:Persons)-[e:Interested in]->(t:Tags) WHERE C.person_id = p.vid AND t.name = 'tag7'";

namespace {

struct Tables {
  Oid customers, persons, tags, interests, products, orders;
};

Tables create_schema(Database& db) {
  Tables t{};
  t.customers = db.create_collection(Schema::relation("Customers", {{"id", ColumnType::Int}, {"person_id", ColumnType::Int}})).oid;
  t.persons = db.create_collection(Schema::vertex_table("Persons", "Persons", {{"name", ColumnType::Text}, {"age", ColumnType::Int}})).oid;
  t.tags = db.create_collection(Schema::vertex_table("Tags", "Tags", {{"name", ColumnType::Text}, {"category", ColumnType::Text}})).oid;
  t.interests = db.create_collection(Schema::edge_table("InterestedIn", "Interested in", {{"weight", ColumnType::Int}})).oid;
  t.products = db.create_collection(Schema::relation("Products", {{"id", ColumnType::Int}, {"title", ColumnType::Text}, {"price", ColumnType::Float}})).oid;
  t.orders = db.create_collection(Schema::document_collection("Orders")).oid;
  db.create_graph(GraphDef{"Interests", {t.persons, t.tags}, t.interests, "Interested in"});
  return t;
}

Value order_doc(std::int64_t customer, std::int64_t product, std::int64_t qty) {
  Document d;
  d.set("customer_id", Value(customer));
  d.set("product_id", Value(product));
  d.set("qty", Value(qty));
  return Value(std::move(d));
}

std::vector<Value> edge(const Tables& t, std::int64_t person, std::int64_t tag, std::int64_t weight) {
  return {Value(static_cast<std::int64_t>(t.persons)), Value(person), Value(static_cast<std::int64_t>(t.tags)), Value(tag),
          Value(weight)};
}

}  // namespace

void load_yogurt(Database& db) {
  Tables t = create_schema(db);
  db.insert(t.customers, {{1, 1}, {2, 2}, {3, 3}, {4, Value{}}});
  db.insert(t.persons, {{1, "Ann", 34}, {2, "Ben", 27}, {3, "Cleo", 45}});
  db.insert(t.tags, {{10, "milk", "food"}, {11, "cheese", "food"}, {12, "football", "sport"}});
  db.insert(t.interests, {edge(t, 1, 10, 3), edge(t, 1, 12, 1), edge(t, 2, 11, 2), edge(t, 3, 10, 5), edge(t, 3, 11, 4),
                          edge(t, 3, 12, 2)});
  db.insert(t.products, {{100, "Yogurt", 1.5}, {101, "Bread", 2.25}, {102, "Soap", 3.0}});
  db.insert(t.orders, {{order_doc(1, 100, 2)}, {order_doc(2, 101, 1)}, {order_doc(3, 100, 1)}, {order_doc(4, 100, 3)},
                       {order_doc(1, 102, 1)}});
}

std::set<std::pair<std::int64_t, std::int64_t>> yogurt_expected() {
  // yogurt buyers are customers 1, 3 and 4; customer 4 has no person
  return {{1, 10}, {1, 12}, {3, 10}, {3, 11}, {3, 12}};
}

void load_commerce(Database& db, std::uint64_t seed, const CommerceScale& s) {
  static const char* kTagNames[] = {"milk", "cheese", "football", "chess", "jazz", "tea", "hiking", "wine"};
  static const char* kCategories[] = {"food", "sport", "music", "outdoor"};
  static const char* kTitles[] = {"Yogurt", "Bread", "Soap", "Apples", "Coffee", "Rice"};
  Tables t = create_schema(db);
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<std::int64_t>(std::uniform_int_distribution<int>(0, n - 1)(rng)); };

  std::vector<std::vector<Value>> rows;
  for (int i = 1; i <= s.persons; ++i) rows.push_back({i, "person" + std::to_string(i), 18 + pick(60)});
  db.insert(t.persons, std::move(rows));
  rows.clear();
  for (int i = 1; i <= s.tags; ++i) rows.push_back({100 + i, kTagNames[pick(8)], kCategories[pick(4)]});
  db.insert(t.tags, std::move(rows));
  rows.clear();
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (int i = 0; i < s.edges && s.persons > 0 && s.tags > 0; ++i) {
    std::int64_t p = 1 + pick(s.persons), g = 101 + pick(s.tags);
    if (!seen.insert({p, g}).second) continue;
    rows.push_back(edge(t, p, g, 1 + pick(9)));
  }
  db.insert(t.interests, std::move(rows));
  rows.clear();
  for (int i = 1; i <= s.customers; ++i) {
    // a few customers have no person
    Value person = pick(10) == 0 ? Value{} : Value(1 + pick(std::max(1, s.persons)));
    rows.push_back({i, person});
  }
  db.insert(t.customers, std::move(rows));
  rows.clear();
  for (int i = 1; i <= s.products; ++i) rows.push_back({1000 + i, kTitles[pick(6)], 0.5 * (1 + pick(20))});
  db.insert(t.products, std::move(rows));
  rows.clear();
  for (int i = 0; i < s.orders && s.customers > 0 && s.products > 0; ++i) {
    rows.push_back({order_doc(1 + pick(s.customers), 1001 + pick(s.products), 1 + pick(5))});
  }
  db.insert(t.orders, std::move(rows));
}

void load_social(Database& db, std::uint64_t seed, int persons, int tags, int edges) {
  Tables t = create_schema(db);
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<std::int64_t>(std::uniform_int_distribution<int>(0, n - 1)(rng)); };
  std::vector<std::vector<Value>> rows;
  rows.reserve(persons);
  for (int i = 1; i <= persons; ++i) rows.push_back({i, "person" + std::to_string(i), 18 + pick(60)});
  db.insert(t.persons, std::move(rows));
  rows.clear();
  for (int i = 1; i <= tags; ++i) rows.push_back({i, "tag" + std::to_string(i), "cat" + std::to_string(i % 10)});
  db.insert(t.tags, std::move(rows));
  rows.clear();
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  while (static_cast<int>(rows.size()) < edges && persons > 0 && tags > 0 &&
         seen.size() < static_cast<std::size_t>(persons) * static_cast<std::size_t>(tags)) {
    std::int64_t p = 1 + pick(persons), g = 1 + pick(tags);
    if (!seen.insert({p, g}).second) continue;
    rows.push_back(edge(t, p, g, 1 + pick(9)));
  }
  db.insert(t.interests, std::move(rows));
  rows.clear();
  for (int i = 1; i <= persons / 10; ++i) rows.push_back({i, 1 + pick(std::max(1, persons))});
  db.insert(t.customers, std::move(rows));
}

}  // namespace gredo::fixtures
