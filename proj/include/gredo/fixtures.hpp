#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "gredo/database.hpp"

namespace gredo::fixtures {

/// Hand-built e-commerce fixture: customers, orders (documents), products and
/// a Persons -[Interested in]-> Tags graph named Interests.
void load_yogurt(Database& db);

/// Customers who bought yogurt, paired with the tags their person likes.
extern const char* const kYogurtQuery;
/// Hand-enumerated (cid, tid) pairs of kYogurtQuery over load_yogurt.
std::set<std::pair<std::int64_t, std::int64_t>> yogurt_expected();

struct CommerceScale {
  int persons = 60;
  int tags = 12;
  int edges = 200;
  int customers = 80;
  int products = 15;
  int orders = 240;
};

/// Randomized fixture with the same schema as load_yogurt. Deterministic in seed.
void load_commerce(Database& db, std::uint64_t seed, const CommerceScale& scale);

/// Large social fixture for timing: Persons/Tags/Interests plus Customers.
/// Tag names are "tag<i>", so `t.name = 'tag7'` selects one tag.
void load_social(Database& db, std::uint64_t seed, int persons, int tags, int edges);

/// Selective cross-model query over load_social.
extern const char* const kSocialQuery;

}  // namespace gredo::fixtures
