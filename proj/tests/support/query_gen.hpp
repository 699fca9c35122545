#pragma once

// Random cross-model queries over the commerce fixture.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace gredo::fixture {

inline std::string random_commerce_query(std::mt19937_64& rng) {
  auto coin = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng) == 0; };
  auto pick = [&](const std::vector<std::string>& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };

  // pattern shape: 0 single vertex, 1 one edge, 2 two edges
  int shape = std::uniform_int_distribution<int>(0, 5)(rng);
  shape = shape == 0 ? 0 : shape <= 3 ? 1 : 2;
  bool backward = coin(4);
  std::string match;
  std::vector<std::string> graph_vars{"p"};
  if (shape == 0) {
    match = "(p:Persons)";
  } else if (!backward) {
    match = "(p:Persons)-[e:Interested in]->(t:Tags)";
    graph_vars = {"p", "e", "t"};
  } else {
    match = "(t:Tags)<-[e:Interested in]-(p:Persons)";
    graph_vars = {"p", "e", "t"};
  }
  if (shape == 2) {
    match += coin(2) ? "<-[e2:Interested in]-(q:Persons)" : "";
    if (match.find("q:") == std::string::npos) {
      match = "(p:Persons)-[e:Interested in]->(t:Tags)<-[e2:Interested in]-(q:Persons)";
    }
    graph_vars = {"p", "e", "t", "e2", "q"};
  }
  auto has = [&](const std::string& v) { return std::find(graph_vars.begin(), graph_vars.end(), v) != graph_vars.end(); };

  int rel = std::uniform_int_distribution<int>(0, 3)(rng);  // none, C, C+O, C+O+P
  std::vector<std::string> from{"Interests"};
  std::vector<std::string> where;
  std::vector<std::string> vars = graph_vars;
  if (rel >= 1) {
    from.push_back("Customers C");
    vars.push_back("C");
    where.push_back(coin(2) ? "C.person_id = p.vid" : "p.vid = C.person_id");
  }
  if (rel >= 2) {
    from.push_back("Orders O");
    vars.push_back("O");
    where.push_back("O->>'customer_id' = C.id");
  }
  if (rel >= 3) {
    from.push_back("Products P");
    vars.push_back("P");
    where.push_back("O->>'product_id' = P.id");
  }
  std::shuffle(from.begin(), from.end(), rng);

  std::vector<std::string> preds;
  if (has("t")) {
    preds.insert(preds.end(), {"t.category = 'food'", "t.name <> 'milk'", "t.vid > 105", "t.vid <= 103", "t.name = 'jazz'"});
  }
  preds.insert(preds.end(), {"p.age < 40", "p.age >= 30", "p.name = 'person3'", "p.vid <> 7"});
  if (has("e")) preds.insert(preds.end(), {"e.weight > 4", "e.weight = 3", "e.weight <= 2"});
  if (has("q")) preds.insert(preds.end(), {"q.age > 50", "q.vid < 20"});
  if (has("C")) preds.insert(preds.end(), {"C.id < 40", "C.id >= 10"});
  if (has("O")) preds.insert(preds.end(), {"O->>'qty' > 2", "O->>'qty' = 1"});
  if (has("P")) preds.insert(preds.end(), {"P.title = 'Yogurt'", "P.price < 5"});
  if (has("t")) preds.push_back("(t.category = 'sport' OR p.age < 30)");
  if (has("e")) preds.push_back("e.weight < p.age");
  int npred = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < npred; ++i) where.push_back(pick(preds));
  std::shuffle(where.begin(), where.end(), rng);

  std::vector<std::string> cols{"p.vid"};
  if (!coin(3)) {
    cols.push_back("p.name");
    if (has("t")) cols.insert(cols.end(), {"t.vid", "t.name"});
    if (has("e")) cols.push_back("e.weight");
    if (has("q")) cols.push_back("q.vid");
    if (has("C")) cols.push_back("C.id");
    if (has("O")) cols.push_back("O->>'qty'");
    if (has("P")) cols.push_back("P.title");
  } else if (has("t")) {
    cols.push_back("t.vid");
  }
  std::shuffle(cols.begin(), cols.end(), rng);
  cols.resize(std::uniform_int_distribution<std::size_t>(1, cols.size())(rng));

  std::string q = "SELECT ";
  for (std::size_t i = 0; i < cols.size(); ++i) q += (i ? ", " : "") + cols[i];
  q += " FROM ";
  for (std::size_t i = 0; i < from.size(); ++i) q += (i ? ", " : "") + from[i];
  q += " MATCH " + match;
  for (std::size_t i = 0; i < where.size(); ++i) q += (i ? " AND " : " WHERE ") + where[i];
  return q;
}

}  // namespace gredo::fixture
